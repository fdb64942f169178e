#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "aqec/css.hpp"
#include "aqec/entropy.hpp"

using namespace aqec;

namespace {

Mat hamming_parity(const FieldSpec& f2) {
    // columns are the binary digits of 1..7
    Mat h(f2, 3, 7);
    for (std::size_t j = 0; j < 7; ++j)
        for (std::size_t r = 0; r < 3; ++r) h.at(r, j) = ((j + 1) >> r) & 1u;
    return h;
}

LinearCode full_space_code(const FieldSpec& f, std::size_t n) {
    return make_linear_code(f, n, 1, Mat::identity(f, n), Mat(f, 0, n));
}

PauliFrame random_error_of_weight(const FieldSpec& f, std::size_t n, std::uint32_t ext,
                                  std::size_t w, std::mt19937_64& rng) {
    return random_pauli_of_weight(f, n, ext, w, rng);
}

bool list_has_equivalent(const CSSCode& css, const std::vector<PauliFrame>& list,
                         const PauliFrame& e) {
    for (const auto& cand : list)
        if (is_stabilizer_equivalent(css.stab, cand, e)) return true;
    return false;
}

}  // namespace

TEST_CASE("steane assembly from nested hamming components") {
    const FieldSpec& f2 = FieldSpec::get(2, 1);
    LinearCode hamming = make_linear_code_from_parity(f2, 7, 1, hamming_parity(f2));
    CSSCode css = build_css(hamming, hamming);

    CHECK(css.n == 7);
    CHECK(css.stab.r() == 6);
    CHECK(css.kappa() == 1);
    CHECK(css.logical_blocks() == 1.0);

    // X-type generators first, spanning the dual of C2, then Z-type
    std::vector<std::vector<fq>> xrows, zrows;
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(vec_is_zero(css.stab.generators[i].z_part));
        xrows.push_back(css.stab.generators[i].x_part);
    }
    for (std::size_t i = 3; i < 6; ++i) {
        CHECK(vec_is_zero(css.stab.generators[i].x_part));
        zrows.push_back(css.stab.generators[i].z_part);
    }
    CHECK(rowspace_equal(Mat::from_rows(f2, xrows), hamming.parity));
    CHECK(rowspace_equal(Mat::from_rows(f2, zrows), hamming.parity));

    CHECK(brute_force_distance(css.stab) == 3);

    // fast syndrome path equals the symplectic one
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<fq> bit(0, 1);
    for (int t = 0; t < 60; ++t) {
        std::vector<fq> x(7), z(7);
        for (auto& v : x) v = bit(rng);
        for (auto& v : z) v = bit(rng);
        PauliFrame e = make_pauli(f2, x, z);
        CHECK(css_syndrome(css, x, z) == syndrome(css.stab, e));
    }

    // dictionary round trip and stabilizer absorption
    PauliFrame msg = make_pauli(f2, {1}, {1});
    PauliFrame enc = encode_pauli(css.stab, msg);
    PauliFrame act = logical_action(css, enc);
    CHECK(act.x_part == msg.x_part);
    CHECK(act.z_part == msg.z_part);
    PauliFrame shifted = pauli_mul(enc, css.stab.generators[0]);
    PauliFrame act2 = logical_action(css, shifted);
    CHECK(act2.x_part == msg.x_part);
    CHECK(act2.z_part == msg.z_part);
    CHECK(classify(css.stab, enc) == PauliClass::Logical);
    PauliFrame weight_one = make_pauli(f2, {1, 0, 0, 0, 0, 0, 0},
                                       std::vector<fq>(7, 0));
    CHECK_THROWS_AS(logical_action(css, weight_one), std::invalid_argument);
}

TEST_CASE("full-space components yield a stabilizer-free code") {
    const FieldSpec& f3 = FieldSpec::get(3, 1);
    CSSCode css = build_css(full_space_code(f3, 4), full_space_code(f3, 4));
    CHECK(css.stab.r() == 0);
    CHECK(css.kappa() == 4);
    CHECK(css.logical_blocks() == 4.0);

    QLDResult res = qld_decode(css, Syndrome{}, 0.0);
    REQUIRE(res.list.size() == 1);
    CHECK(pauli_weight(res.list[0]) == 0);
    CHECK(res.raw_pairs == 1);

    // with no stabilizers, every class count equals the ball size: 1 + n(q^2-1)
    QLDVerification rep = verify_qld(css, 0.25, 40);
    CHECK(rep.radius == 1);
    CHECK(rep.max_count == 1 + 4 * 8);
    CHECK(rep.counts.size() == 1);
    CHECK(rep.within);
}

TEST_CASE("quantum GRS construction over F7") {
    const FieldSpec& f7 = FieldSpec::get(7, 1);
    FQRSCode qrs = build_fqrs(f7, 6, 1.0 / 3.0, 1);
    const CSSCode& css = qrs.css;

    CHECK(css.n == 6);
    CHECK(css.stab.r() == 4);
    CHECK(css.kappa() == 2);
    CHECK(css.logical_blocks() == 2.0);

    // same object as assembling the nested pair by hand
    GRSSpec g1 = make_grs_spec(f7, 6, 4, f7.primitive);
    GRSSpec g2p = make_grs_spec(f7, 6, 2, f7.primitive);
    CSSCode manual = build_css(grs_build(g1), grs_build(grs_dual(g2p)));
    CHECK(css.c1.code.generator == manual.c1.code.generator);
    CHECK(css.c2.code.generator == manual.c2.code.generator);
    CHECK(rowspace_equal(css.stab.symp_gens, manual.stab.symp_gens));

    // monomial dictionary: X-side representatives evaluate x^{k2+i}
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(css.logical_x_basis.row(i) == css.c1.code.generator.row(2 + i));

    // nested-distance floor and the exact value
    CHECK(distance_bruteforce(css.c1.code) == 3);   // [6,4] -> d = 3
    CHECK(distance_bruteforce(css.c2.code) == 3);
    CHECK(brute_force_distance(css.stab) == 3);

    // below half distance, a weight-1 error is pinned down exactly
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        PauliFrame e = random_error_of_weight(f7, 6, 1, 1, rng);
        QLDResult res = qld_decode(css, css_syndrome(css, e), 1.0 / 6.0);
        REQUIRE(res.list.size() == 1);
        CHECK(is_stabilizer_equivalent(css.stab, res.list[0], e));
    }
}

TEST_CASE("quantum folding re-blocks without changing checks") {
    const FieldSpec& f2 = FieldSpec::get(2, 1);
    const FieldSpec& f7 = FieldSpec::get(7, 1);
    LinearCode hamming = make_linear_code_from_parity(f2, 7, 1, hamming_parity(f2));
    CSSCode steane = build_css(hamming, hamming);

    SECTION("identity fold") {
        CSSCode same = fold_quantum(steane, 1);
        CHECK(same.n == steane.n);
        CHECK(same.stab.check_mat == steane.stab.check_mat);
    }

    SECTION("full fold collapses to one block") {
        CSSCode folded = fold_quantum(steane, 7);
        CHECK(folded.n == 1);
        CHECK(folded.ext == 7);
        CHECK(folded.stab.check_mat == steane.stab.check_mat);
        CHECK(brute_force_distance(folded.stab) == 1);
    }

    SECTION("fold commutes with assembly") {
        FQRSCode qrs = build_fqrs(f7, 6, 1.0 / 3.0, 1);
        CSSCode folded = fold_quantum(qrs.css, 2);
        CHECK(folded.n == 3);
        CHECK(folded.ext == 2);
        CHECK(folded.logical_blocks() == 1.0);

        FQRSCode direct = build_fqrs(f7, 6, 1.0 / 3.0, 2);
        CHECK(folded.c1.code.generator == direct.css.c1.code.generator);
        CHECK(rowspace_equal(folded.stab.symp_gens, direct.css.stab.symp_gens));
        CHECK(folded.logical_x_basis == direct.css.logical_x_basis);

        // syndromes are computed from the same vectors regardless of blocking
        std::mt19937_64 rng(9);
        std::uniform_int_distribution<fq> d(0, 6);
        for (int t = 0; t < 25; ++t) {
            std::vector<fq> x(6), z(6);
            for (auto& v : x) v = d(rng);
            for (auto& v : z) v = d(rng);
            CHECK(css_syndrome(qrs.css, x, z) == css_syndrome(folded, x, z));
        }
    }

    SECTION("bundle size must divide") {
        CHECK_THROWS_AS(fold_quantum(steane, 2), std::invalid_argument);
    }
}

TEST_CASE("qld matches exhaustive class enumeration on a toy code") {
    const FieldSpec& f2 = FieldSpec::get(2, 1);
    Mat ones(f2, 1, 4);
    for (std::size_t j = 0; j < 4; ++j) ones.at(0, j) = 1;
    LinearCode even = make_linear_code_from_parity(f2, 4, 1, ones);
    CSSCode css = build_css(even, even);
    CHECK(css.kappa() == 2);
    CHECK(brute_force_distance(css.stab) == 2);

    // independent oracle: enumerate all 256 (x,z) bit patterns
    const auto indep_synd = [&](unsigned x, unsigned z) {
        const unsigned px = __builtin_popcount(x) & 1u;
        const unsigned pz = __builtin_popcount(z) & 1u;
        return std::make_pair(pz, px);  // X check reads z, Z check reads x
    };
    const auto canon = [](unsigned v) { return std::min(v, v ^ 0xFu); };
    std::map<std::pair<unsigned, unsigned>, std::set<std::pair<unsigned, unsigned>>>
        oracle;  // syndrome -> canonical (x,z) classes at weight <= 2
    for (unsigned x = 0; x < 16; ++x)
        for (unsigned z = 0; z < 16; ++z) {
            if (__builtin_popcount(x | z) > 2) continue;
            oracle[indep_synd(x, z)].insert({canon(x), canon(z)});
        }

    QLDVerification rep = verify_qld(css, 0.5, 100);
    CHECK(rep.radius == 2);
    REQUIRE(rep.counts.size() == oracle.size());
    std::size_t oracle_max = 0;
    for (const auto& [sy, classes] : oracle) {
        Syndrome key{static_cast<fq>(sy.first), static_cast<fq>(sy.second)};
        REQUIRE(rep.counts.count(key) == 1);
        CHECK(rep.counts.at(key) == classes.size());
        oracle_max = std::max(oracle_max, classes.size());
    }
    CHECK(rep.max_count == oracle_max);
    CHECK(rep.worst_classes.size() == rep.max_count);
    for (const auto& w : rep.worst_classes) CHECK(w.weight <= 2);

    // decoder vs enumeration, for every syndrome value
    for (unsigned sx = 0; sx < 2; ++sx)
        for (unsigned sz = 0; sz < 2; ++sz) {
            Syndrome s{static_cast<fq>(sx), static_cast<fq>(sz)};
            QLDResult res = qld_decode(css, s, 0.5);
            CHECK(res.deduplicated == res.list.size());
            CHECK(res.deduplicated <= res.raw_pairs);
            CHECK(res.list.size() >= 2);  // beyond half distance

            // soundness: right syndrome, pairwise distinct classes
            for (std::size_t i = 0; i < res.list.size(); ++i) {
                CHECK(css_syndrome(css, res.list[i]) == s);
                for (std::size_t j = i + 1; j < res.list.size(); ++j)
                    CHECK_FALSE(
                        is_stabilizer_equivalent(css.stab, res.list[i], res.list[j]));
            }

            // completeness: every enumerated low-weight error is covered
            for (unsigned x = 0; x < 16; ++x)
                for (unsigned z = 0; z < 16; ++z) {
                    if (__builtin_popcount(x | z) > 2) continue;
                    if (indep_synd(x, z) != std::make_pair(static_cast<unsigned>(s[0]),
                                                           static_cast<unsigned>(s[1])))
                        continue;
                    std::vector<fq> xv(4), zv(4);
                    for (std::size_t b = 0; b < 4; ++b) {
                        xv[b] = (x >> b) & 1u;
                        zv[b] = (z >> b) & 1u;
                    }
                    CHECK(list_has_equivalent(css, res.list,
                                              make_pauli(f2, xv, zv)));
                }

            // exact equality after dropping classes with no low-weight member
            std::size_t with_light_member = 0;
            for (const auto& cand : res.list)
                if (min_weight_in_class(css, cand).first <= 2) ++with_light_member;
            Syndrome key = s;
            const auto it = rep.counts.find(key);
            const std::size_t expected = it == rep.counts.end() ? 0 : it->second;
            CHECK(with_light_member == expected);
        }
}

TEST_CASE("qld on the F7 quantum GRS agrees with enumeration") {
    const FieldSpec& f7 = FieldSpec::get(7, 1);
    CSSCode css = build_fqrs(f7, 6, 1.0 / 3.0, 1).css;

    const double tau = 1.0 / 3.0;  // radius 2 of 6
    QLDVerification rep = verify_qld(css, tau, 1u << 20);
    CHECK(rep.radius == 2);
    CHECK(rep.max_count >= 1);

    // spot equality against the decoder on a prefix of the syndrome table
    std::size_t audited = 0;
    for (const auto& [s, count] : rep.counts) {
        if (audited == 150) break;
        ++audited;
        QLDResult res = qld_decode(css, s, tau);
        CHECK(res.list.size() >= count);
        std::size_t light = 0;
        for (const auto& cand : res.list) {
            CHECK(css_syndrome(css, cand) == s);
            if (min_weight_in_class(css, cand).first <= rep.radius) ++light;
        }
        CHECK(light == count);
    }

    // coverage on random planted errors of weight up to the radius
    std::mt19937_64 rng(17);
    for (int t = 0; t < 120; ++t) {
        PauliFrame e = random_error_of_weight(f7, 6, 1, 1 + (t % 2), rng);
        QLDResult res = qld_decode(css, css_syndrome(css, e), tau);
        CHECK(list_has_equivalent(css, res.list, e));
    }
}

TEST_CASE("qlr handles its special cases") {
    const FieldSpec& f2 = FieldSpec::get(2, 1);
    Mat ones(f2, 1, 4);
    for (std::size_t j = 0; j < 4; ++j) ones.at(0, j) = 1;
    LinearCode even = make_linear_code_from_parity(f2, 4, 1, ones);
    CSSCode css = build_css(even, even);
    const PauliFrame block_id = pauli_identity(f2, 1);

    SECTION("identity sets with zero syndrome give the identity") {
        std::vector<std::vector<PauliFrame>> sets(4, {block_id});
        auto out = qlr_decode(css, Syndrome{0, 0}, sets, 1.0, 1);
        REQUIRE(out.size() == 1);
        CHECK(pauli_weight(out[0]) == 0);
    }

    SECTION("singleton sets of a known error recover exactly its class") {
        std::mt19937_64 rng(23);
        for (int t = 0; t < 15; ++t) {
            PauliFrame e = random_error_of_weight(f2, 4, 1, 2, rng);
            std::vector<std::vector<PauliFrame>> sets;
            for (std::size_t b = 0; b < 4; ++b)
                sets.push_back({make_pauli(f2, {e.x_part[b]}, {e.z_part[b]})});
            auto out = qlr_decode(css, css_syndrome(css, e), sets, 1.0, 1);
            REQUIRE(out.size() == 1);
            CHECK(is_stabilizer_equivalent(css.stab, out[0], e));
        }
    }

    SECTION("pair sets cover the exhaustive recovery oracle") {
        std::mt19937_64 rng(29);
        std::uniform_int_distribution<fq> bit(0, 1);
        for (int t = 0; t < 10; ++t) {
            PauliFrame e = random_error_of_weight(f2, 4, 1, 2, rng);
            std::vector<std::vector<PauliFrame>> sets;
            for (std::size_t b = 0; b < 4; ++b) {
                PauliFrame truth = make_pauli(f2, {e.x_part[b]}, {e.z_part[b]});
                PauliFrame decoy = make_pauli(f2, {bit(rng)}, {bit(rng)});
                if (decoy == truth)
                    decoy = make_pauli(f2, {static_cast<fq>(1 - truth.x_part[0])},
                                       {truth.z_part[0]});
                sets.push_back({truth, decoy});
            }
            const Syndrome s = css_syndrome(css, e);
            auto out = qlr_decode(css, s, sets, 1.0, 2);

            for (const auto& cand : out) CHECK(css_syndrome(css, cand) == s);
            for (std::size_t i = 0; i < out.size(); ++i)
                for (std::size_t j = i + 1; j < out.size(); ++j)
                    CHECK_FALSE(is_stabilizer_equivalent(css.stab, out[i], out[j]));

            // oracle: all 256 patterns, matching syndrome and all-position
            // joint agreement with one of the candidates
            for (unsigned x = 0; x < 16; ++x)
                for (unsigned z = 0; z < 16; ++z) {
                    std::vector<fq> xv(4), zv(4);
                    for (std::size_t b = 0; b < 4; ++b) {
                        xv[b] = (x >> b) & 1u;
                        zv[b] = (z >> b) & 1u;
                    }
                    PauliFrame cand = make_pauli(f2, xv, zv);
                    if (css_syndrome(css, cand) != s) continue;
                    bool agrees_everywhere = true;
                    for (std::size_t b = 0; b < 4 && agrees_everywhere; ++b) {
                        bool hit = false;
                        for (const auto& opt : sets[b])
                            hit |= (opt.x_part[0] == xv[b] && opt.z_part[0] == zv[b]);
                        agrees_everywhere = hit;
                    }
                    if (!agrees_everywhere) continue;
                    CHECK(list_has_equivalent(css, out, cand));
                }
        }
    }

    SECTION("identity sets at threshold eta contain the qld list at 1 - eta") {
        // with identity candidate sets, agreement on >= eta*n blocks means
        // per-side weight <= (1-eta)*n, a superset of the joint-weight ball
        std::mt19937_64 rng(31);
        for (int t = 0; t < 10; ++t) {
            PauliFrame e = random_error_of_weight(f2, 4, 1, 1, rng);
            std::vector<std::vector<PauliFrame>> sets(4, {block_id});
            const Syndrome s = css_syndrome(css, e);
            auto lr = qlr_decode(css, s, sets, 0.75, 4);
            QLDResult ld = qld_decode(css, s, 0.25);
            CHECK(lr.size() >= ld.list.size());
            for (const auto& cand : ld.list)
                CHECK(list_has_equivalent(css, lr, cand));
            for (const auto& cand : lr) CHECK(css_syndrome(css, cand) == s);
        }
    }

    SECTION("oversized sets are rejected") {
        std::vector<std::vector<PauliFrame>> sets(4, {block_id, block_id});
        CHECK_THROWS_AS(qlr_decode(css, Syndrome{0, 0}, sets, 1.0, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("fqrs parameter checks and algebraic decoding") {
    const FieldSpec& f17 = FieldSpec::get(17, 1);

    SECTION("shape of the folded F17 instance") {
        FQRSCode qrs = build_fqrs(f17, 8, 0.5, 2);
        CHECK(qrs.css.n == 4);
        CHECK(qrs.css.ext == 2);
        CHECK(qrs.css.kappa() == 4);
        CHECK(qrs.css.logical_blocks() == 2.0);
        CHECK(qrs.css.stab.r() == 4);
        REQUIRE(qrs.css.c1.grs.has_value());
        CHECK(qrs.css.c1.grs->k == 6);
        CHECK(qrs.css.c1.fold_m == 2);

        // unfolded variant shares the same base matrices
        FQRSCode flat = build_fqrs(f17, 8, 0.5, 1);
        CHECK(flat.css.c1.code.generator == qrs.css.c1.code.generator);
        CHECK(flat.css.c2.code.generator == qrs.css.c2.code.generator);

        // the zero syndrome at radius zero decodes algebraically to identity
        QLDResult res = qld_decode(qrs.css, Syndrome(4, 0), 0.0, DecodeMode::Algebraic);
        REQUIRE(res.list.size() == 1);
        CHECK(pauli_weight(res.list[0]) == 0);

        // at this size no covering parameter exists for one whole-block error
        CHECK_THROWS_AS(qld_decode(qrs.css, Syndrome(4, 0), 0.25, DecodeMode::Algebraic),
                        std::invalid_argument);
    }

    SECTION("infeasible parameters name the violated constraint") {
        CHECK_THROWS_WITH(build_fqrs(f17, 8, 0.3, 2),
                          Catch::Matchers::ContainsSubstring("not an integer"));
        CHECK_THROWS_WITH(build_fqrs(f17, 20, 0.5, 2),
                          Catch::Matchers::ContainsSubstring("n < q"));
        CHECK_THROWS_WITH(build_fqrs(f17, 8, 0.5, 3),
                          Catch::Matchers::ContainsSubstring("divide"));
    }

    SECTION("algebraic list decoding at one block of errors over F64") {
        const FieldSpec& f64 = FieldSpec::get(2, 6);
        FQRSCode qrs = build_fqrs(f64, 48, 0.25, 6);
        const CSSCode& css = qrs.css;
        CHECK(css.n == 8);
        CHECK(css.kappa() == 12);

        std::mt19937_64 rng(41);
        std::uniform_int_distribution<fq> sym(0, 63);
        for (int t = 0; t < 12; ++t) {
            // random single-block error
            std::vector<fq> x(48, 0), z(48, 0);
            const std::size_t b = rng() % 8;
            bool nz = false;
            for (std::uint32_t i = 0; i < 6; ++i) {
                x[b * 6 + i] = sym(rng);
                z[b * 6 + i] = sym(rng);
                nz |= (x[b * 6 + i] != 0 || z[b * 6 + i] != 0);
            }
            if (!nz) x[b * 6] = 1;
            PauliFrame e = make_pauli(f64, x, z, 0, 6);

            QLDResult res =
                qld_decode(css, css_syndrome(css, e), 1.0 / 8.0, DecodeMode::Algebraic);
            REQUIRE(res.list.size() == 1);  // radius below half the folded distance
            CHECK(is_stabilizer_equivalent(css.stab, res.list[0], e));
        }

        // two-block errors exceed every covering parameter at this size
        CHECK_THROWS_AS(
            qld_decode(css, Syndrome(css.stab.r(), 0), 0.25, DecodeMode::Algebraic),
            std::invalid_argument);
    }

    SECTION("algebraic quantum list recovery from singleton sets") {
        FQRSCode qrs = build_fqrs(f17, 8, 0.5, 2);
        const CSSCode& css = qrs.css;
        std::mt19937_64 rng(43);
        std::uniform_int_distribution<fq> sym(0, 16);
        for (int t = 0; t < 10; ++t) {
            std::vector<fq> x(8), z(8);
            for (auto& v : x) v = sym(rng);
            for (auto& v : z) v = sym(rng);
            PauliFrame e = make_pauli(f17, x, z, 0, 2);
            std::vector<std::vector<PauliFrame>> sets;
            for (std::size_t b = 0; b < 4; ++b)
                sets.push_back({make_pauli(f17, {x[2 * b], x[2 * b + 1]},
                                           {z[2 * b], z[2 * b + 1]}, 0, 2)});
            auto out = qlr_decode(css, css_syndrome(css, e), sets, 1.0, 1,
                                  DecodeMode::Algebraic);
            CHECK(list_has_equivalent(css, out, e));
            for (const auto& cand : out)
                CHECK(css_syndrome(css, cand) == css_syndrome(css, e));
        }
    }
}

TEST_CASE("random css sampling and the nested distance bound") {
    SECTION("shape and determinism at the reference parameters") {
        const FieldSpec& f4 = FieldSpec::get(2, 2);
        std::mt19937_64 rng(47);
        CSSCode css = sample_random_css(f4, 8, 2, rng);
        CHECK(css.n == 8);
        CHECK(css.kappa() == 2);
        CHECK(css.logical_blocks() == 2.0);

        std::mt19937_64 r1(123), r2(123);
        CSSCode a = sample_random_css(f4, 8, 2, r1);
        CSSCode b = sample_random_css(f4, 8, 2, r2);
        CHECK(a.c1.code.generator == b.c1.code.generator);
        CHECK(a.c2.code.generator == b.c2.code.generator);

        CHECK_THROWS_AS(sample_random_css(f4, 8, 3, rng), std::invalid_argument);

        // reference-scale bound value: at n=8, k=2, delta=1/8 the failure
        // bound 2q^{-n((1-R)/2 - H_q(delta))} exceeds one, so any draw is
        // consistent; pin the formula's value instead of a vacuous assert
        const double margin = (1.0 - 0.25) / 2.0 - hq(4.0, 0.125);
        const double bound = 2.0 * std::pow(4.0, -8.0 * margin);
        CHECK(bound > 1.0);
    }

    SECTION("distance at least 2 with the predicted frequency") {
        // GF(16), n=12, k=2, delta=1/6: the failure bound is about 0.095,
        // so a 200-draw run stays under bound + 3 sigma with room
        const FieldSpec& f16 = FieldSpec::get(2, 4);
        const double margin = (1.0 - 2.0 / 12.0) / 2.0 - hq(16.0, 1.0 / 6.0);
        REQUIRE(margin > 0.0);
        const double bound = 2.0 * std::pow(16.0, -12.0 * margin);
        REQUIRE(bound < 0.2);

        std::mt19937_64 rng(53);
        const int trials = 200;
        int failures = 0;
        for (int t = 0; t < trials; ++t) {
            CSSCode css = sample_random_css(f16, 12, 2, rng);
            bool weight_one_logical = false;
            for (std::size_t b = 0; b < 12 && !weight_one_logical; ++b)
                for (fq xv = 0; xv < 16 && !weight_one_logical; ++xv)
                    for (fq zv = 0; zv < 16; ++zv) {
                        if (xv == 0 && zv == 0) continue;
                        std::vector<fq> x(12, 0), z(12, 0);
                        x[b] = xv;
                        z[b] = zv;
                        if (!vec_is_zero(css_syndrome(css, x, z))) continue;
                        const auto cls =
                            canonical_class_pair(css, make_pauli(f16, x, z));
                        if (!vec_is_zero(cls.first) || !vec_is_zero(cls.second)) {
                            weight_one_logical = true;
                            break;
                        }
                    }
            if (weight_one_logical) ++failures;
        }
        const double sigma = std::sqrt(bound * (1.0 - bound) / trials);
        CHECK(static_cast<double>(failures) / trials <= bound + 3.0 * sigma);
    }
}

TEST_CASE("qwozencraft sampling flattens to dual components") {
    SECTION("binary reference shape") {
        const FieldSpec& f2 = FieldSpec::get(2, 1);
        std::mt19937_64 rng(59);
        for (int t = 0; t < 25; ++t) {
            CSSCode css = sample_qwozencraft(f2, 2, 4, rng);
            CHECK(css.n == 8);
            CHECK(css.kappa() == 4);  // rate 1 - 2/s = 1/2
            CHECK(css.stab.r() == 4);
            CHECK(css.c1.code.k_fq == 6);
            CHECK(css.c2.code.k_fq == 6);
        }
        CHECK_THROWS_AS(sample_qwozencraft(f2, 2, 2, rng), std::invalid_argument);
    }

    SECTION("distance bound at the GF(4) reference point") {
        // threshold H_q^{-1}(1/s - gamma): numerically about 0.052 at q=4,
        // s=4, gamma=1/16, so the guaranteed distance floor at n=8 is 1 and
        // the frequency bound 1 - 2q^{-gamma n} is 0; the draw statistics
        // can only sit above both.  The check pins the numbers honestly.
        const double gamma = 1.0 / 16.0;
        const double delta = hq_inv(4.0, 0.25 - gamma);
        CHECK(delta == Catch::Approx(0.0515).margin(0.004));
        const std::size_t floor_dist =
            static_cast<std::size_t>(std::ceil(delta * 8.0 - 1e-9));
        const double freq_bound = 1.0 - 2.0 * std::pow(4.0, -gamma * 8.0);

        const FieldSpec& f4 = FieldSpec::get(2, 2);
        std::mt19937_64 rng(61);
        const int trials = 40;
        int ok = 0;
        for (int t = 0; t < trials; ++t) {
            CSSCode css = sample_qwozencraft(f4, 2, 4, rng);
            if (brute_force_distance(css.stab) >= floor_dist) ++ok;
        }
        CHECK(static_cast<double>(ok) / trials >= freq_bound);
        CHECK(ok == trials);  // floor distance is 1 here, met by construction
    }
}

TEST_CASE("entropy helpers") {
    CHECK(h2(0.5) == Catch::Approx(1.0));
    CHECK(h2(0.0) == 0.0);
    CHECK(hq(7.0, 6.0 / 7.0) == Catch::Approx(1.0));
    for (double y : {0.05, 0.3, 0.7, 0.95})
        CHECK(hq(4.0, hq_inv(4.0, y)) == Catch::Approx(y).margin(1e-9));
    CHECK(hq_inv(2.0, 0.0) == 0.0);
    CHECK(hq_inv(2.0, 1.0) == Catch::Approx(0.5));
    CHECK_THROWS_AS(h2(1.5), std::domain_error);
}
