#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "aqec/classical.hpp"

using namespace aqec;

namespace {

std::vector<fq> random_word(const FieldSpec& f, std::size_t len, std::mt19937_64& rng) {
    std::uniform_int_distribution<fq> d(0, f.q - 1);
    std::vector<fq> w(len);
    for (auto& x : w) x = d(rng);
    return w;
}

/// Corrupt `count` distinct bundles of width m, guaranteeing each touched
/// bundle actually changes.
std::vector<fq> corrupt_bundles(const FieldSpec& f, std::vector<fq> w, std::uint32_t m,
                                std::size_t count, std::mt19937_64& rng) {
    const std::size_t nb = w.size() / m;
    std::vector<std::size_t> idx(nb);
    for (std::size_t i = 0; i < nb; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_int_distribution<fq> d(0, f.q - 1);
    std::uniform_int_distribution<fq> dnz(1, f.q - 1);
    for (std::size_t c = 0; c < count; ++c) {
        const std::size_t b = idx[c];
        w[b * m] = f.add(w[b * m], dnz(rng));  // forces a difference
        for (std::uint32_t j = 1; j < m; ++j) w[b * m + j] = d(rng);
    }
    return w;
}

}  // namespace

TEST_CASE("evaluation code construction and frozen codeword") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g = make_grs_spec(f5, 4, 2, 2);
    LinearCode c = grs_build(g);

    CHECK(c.n == 4);
    CHECK(c.k_fq == 2);
    CHECK(c.ext == 1);
    // evaluation points 1, 2, 4, 3
    CHECK(g.eval_points() == std::vector<fq>{1, 2, 4, 3});
    CHECK(c.generator.row(0) == std::vector<fq>{1, 1, 1, 1});
    CHECK(c.generator.row(1) == std::vector<fq>{1, 2, 4, 3});

    // message 1 + x evaluates to the frozen codeword
    CHECK(encode(c, {1, 1}) == std::vector<fq>{2, 3, 0, 4});
    CHECK(contains(c, {2, 3, 0, 4}));
    CHECK(encode(c, {0, 0}) == std::vector<fq>(4, 0));

    // minimum distance is n-k+1, by enumerating all 25 codewords
    CHECK(distance_bruteforce(c) == 3);
}

TEST_CASE("evaluation code construction guards") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    CHECK_THROWS_AS(make_grs_spec(f5, 4, 4, 2), std::invalid_argument);   // k >= n
    CHECK_THROWS_AS(make_grs_spec(f5, 5, 2, 2), std::invalid_argument);   // n >= q
    CHECK_THROWS_AS(make_grs_spec(f5, 4, 2, 0), std::invalid_argument);   // gamma not a unit
    CHECK_THROWS_AS(make_grs_spec(f5, 4, 2, 4), std::invalid_argument);   // order-2 gamma collides
    CHECK_THROWS_AS(make_grs_spec(f5, 4, 2, 2, {1, 0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(make_grs_spec(f5, 4, 2, 2, {1, 1}), std::invalid_argument);
}

TEST_CASE("dual multipliers annihilate the code") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g = make_grs_spec(f5, 4, 2, 2);
    GRSSpec d = grs_dual(g);
    CHECK(d.k == 2);
    CHECK(d.multipliers == std::vector<fq>{4, 3, 1, 2});

    // at full length n = q-1 with unit multipliers, the dual code coincides
    // with the same-gamma code using multipliers (1, gamma, gamma^2, ...)
    GRSSpec geom = make_grs_spec(f5, 4, 2, 2, {1, 2, 4, 3});
    CHECK(rowspace_equal(grs_build(d).generator, grs_build(geom).generator));

    const FieldSpec& f7 = FieldSpec::get(7, 1);
    GRSSpec g7 = make_grs_spec(f7, 4, 2, 3);
    CHECK(grs_dual(g7).multipliers == std::vector<fq>{2, 1, 2, 2});

    // exhaustive row orthogonality for a shape with non-unit multipliers
    const FieldSpec& f11 = FieldSpec::get(11, 1);
    std::vector<fq> mult(7);
    for (std::size_t j = 0; j < 7; ++j) mult[j] = static_cast<fq>((j % 9) + 1);
    GRSSpec g11 = make_grs_spec(f11, 7, 3, 2, mult);
    LinearCode c11 = grs_build(g11);
    LinearCode d11 = grs_build(grs_dual(g11));
    CHECK(d11.k_fq == 4);
    for (std::size_t i = 0; i < c11.k_fq; ++i)
        for (std::size_t j = 0; j < d11.k_fq; ++j)
            CHECK(vec_dot(f11, c11.generator.row(i), d11.generator.row(j)) == 0);

    // biduality: dual of dual generates the original code
    CHECK(rowspace_equal(grs_build(grs_dual(grs_dual(g11))).generator, c11.generator));
}

TEST_CASE("folding re-blocks without touching the matrices") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g = make_grs_spec(f5, 4, 2, 2);
    LinearCode base = grs_build(g);

    FoldedCode f1 = fold(base, 1);
    CHECK(f1.code.n == 4);
    CHECK(f1.code.ext == 1);
    CHECK(f1.code.generator == base.generator);

    FoldedCode f2 = fold(base, 2, g);
    CHECK(f2.code.n == 2);
    CHECK(f2.code.ext == 2);
    CHECK(f2.code.k_fq == 2);
    CHECK(f2.code.generator == base.generator);
    // every nonzero polynomial of degree <= 1 hits both bundles
    CHECK(distance_bruteforce(f2.code) == 2);

    // folding then dualizing equals dualizing then folding: as F_q matrices
    // the dual of the folded code is generated by the base code's parity rows
    LinearCode dual_base = grs_build(grs_dual(g));
    FoldedCode folded_dual = fold(dual_base, 2);
    CHECK(rowspace_equal(folded_dual.code.generator, base.parity));

    CHECK_THROWS_AS(fold(base, 3), std::invalid_argument);

    // degenerate single-bundle fold: every nonzero codeword has weight 1
    const FieldSpec& f2f = FieldSpec::get(2, 1);
    Mat H(f2f, 3, 7);
    for (std::size_t col = 0; col < 7; ++col)
        for (std::size_t bit = 0; bit < 3; ++bit)
            H.at(bit, col) = static_cast<fq>(((col + 1) >> bit) & 1);
    LinearCode hamming = make_linear_code_from_parity(f2f, 7, 1, H);
    CHECK(hamming.k_fq == 4);
    CHECK(distance_bruteforce(hamming) == 3);
    FoldedCode all_in_one = fold(hamming, 7);
    CHECK(all_in_one.code.n == 1);
    CHECK(distance_bruteforce(all_in_one.code) == 1);
}

TEST_CASE("unique decoding: exhaustive and algebraic modes agree") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g = make_grs_spec(f5, 4, 2, 2);
    FoldedCode fc = unfolded(grs_build(g), g);
    const std::vector<fq> cw{2, 3, 0, 4};

    // radius 0 returns a codeword verbatim
    auto r0 = unique_decode(fc, cw, 0, DecodeMode::BruteForce);
    REQUIRE(r0.codeword.has_value());
    CHECK(*r0.codeword == cw);
    auto r0a = unique_decode(fc, cw, 0, DecodeMode::Algebraic);
    REQUIRE(r0a.codeword.has_value());
    CHECK(*r0a.codeword == cw);

    // frozen example: position 2 corrupted to 1
    auto rb = unique_decode(fc, {2, 3, 1, 4}, 1, DecodeMode::BruteForce);
    auto ra = unique_decode(fc, {2, 3, 1, 4}, 1, DecodeMode::Algebraic);
    REQUIRE(rb.codeword.has_value());
    REQUIRE(ra.codeword.has_value());
    CHECK(*rb.codeword == cw);
    CHECK(*ra.codeword == cw);

    // every single-symbol corruption decodes back, in both modes
    for (std::size_t pos = 0; pos < 4; ++pos)
        for (fq delta = 1; delta < 5; ++delta) {
            std::vector<fq> w = cw;
            w[pos] = f5.add(w[pos], delta);
            auto b = unique_decode(fc, w, 1, DecodeMode::BruteForce);
            auto a = unique_decode(fc, w, 1, DecodeMode::Algebraic);
            REQUIRE(b.codeword.has_value());
            REQUIRE(a.codeword.has_value());
            CHECK(*b.codeword == cw);
            CHECK(*a.codeword == cw);
        }

    // the algebraic mode rejects radii past its guarantee
    CHECK_THROWS_AS(unique_decode(fc, cw, 2, DecodeMode::Algebraic), std::invalid_argument);
}

TEST_CASE("unique decoding agreement on a larger random sample") {
    const FieldSpec& f11 = FieldSpec::get(11, 1);
    GRSSpec g = make_grs_spec(f11, 10, 4, f11.primitive);
    FoldedCode fc = unfolded(grs_build(g), g);
    std::mt19937_64 rng(0xC0DEC0DEULL);

    for (int trial = 0; trial < 50; ++trial) {
        std::vector<fq> w;
        if (trial % 4 == 3) {
            w = random_word(f11, 10, rng);  // usually far from the code
        } else {
            auto msg = random_word(f11, 4, rng);
            w = corrupt_bundles(f11, encode(fc.code, msg), 1, trial % 4, rng);
        }
        auto b = unique_decode(fc, w, 3, DecodeMode::BruteForce);
        auto a = unique_decode(fc, w, 3, DecodeMode::Algebraic);
        CHECK(b.codeword.has_value() == a.codeword.has_value());
        if (b.codeword && a.codeword) {
            CHECK(*b.codeword == *a.codeword);
            CHECK(blocked_distance(*b.codeword, w, 1) <= 3);
        }
    }
}

TEST_CASE("ambiguity flag matches a hand count of nearest codewords") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g = make_grs_spec(f5, 4, 2, 2);
    LinearCode c = grs_build(g);
    FoldedCode fc = unfolded(c, g);

    std::vector<std::vector<fq>> codewords;
    for_each_in_rowspace(c.generator, [&](const std::vector<fq>& w) { codewords.push_back(w); });
    REQUIRE(codewords.size() == 25);

    std::size_t ambiguous_seen = 0;
    std::vector<fq> w(4, 0);
    for (w[0] = 0; w[0] < 5; ++w[0])
        for (w[1] = 0; w[1] < 5; ++w[1])
            for (w[2] = 0; w[2] < 5; ++w[2])
                for (w[3] = 0; w[3] < 5; ++w[3]) {
                    std::size_t best = 99, ties = 0;
                    for (const auto& cw : codewords) {
                        const std::size_t d = blocked_distance(cw, w, 1);
                        if (d < best) { best = d; ties = 1; }
                        else if (d == best) ++ties;
                    }
                    auto res = unique_decode(fc, w, 2, DecodeMode::BruteForce);
                    if (best <= 2) {
                        REQUIRE(res.codeword.has_value());
                        CHECK(blocked_distance(*res.codeword, w, 1) == best);
                        CHECK(res.ambiguous == (ties >= 2));
                        if (res.ambiguous) ++ambiguous_seen;
                    } else {
                        CHECK_FALSE(res.codeword.has_value());
                    }
                }
    // beyond half distance, equidistant received words must exist
    CHECK(ambiguous_seen > 0);
}

TEST_CASE("exhaustive list decoding basics") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g = make_grs_spec(f5, 4, 2, 2);
    FoldedCode fc = unfolded(grs_build(g), g);
    const std::vector<fq> cw{2, 3, 0, 4};

    CHECK(list_decode(fc, cw, 0.0, DecodeMode::BruteForce) ==
          std::vector<std::vector<fq>>{cw});
    CHECK(list_decode(fc, {2, 3, 1, 4}, 0.0, DecodeMode::BruteForce).empty());
    // one corrupted position at radius n/4 = 1: exactly the planted codeword
    CHECK(list_decode(fc, {2, 3, 1, 4}, 0.25, DecodeMode::BruteForce) ==
          std::vector<std::vector<fq>>{cw});
}

TEST_CASE("folded algebraic list decoding matches the exhaustive oracle") {
    const FieldSpec& f37 = FieldSpec::get(37, 1);
    REQUIRE(f37.primitive == 2);
    GRSSpec g = make_grs_spec(f37, 32, 4, 2);
    LinearCode base = grs_build(g);
    FoldedCode fc = fold(base, 4, g);
    // folded [8,1] code with bundle distance 8; radius 4 exceeds the unique
    // decoding radius 3
    const double tau = 0.5;

    std::mt19937_64 rng(0xF01DEDULL);
    for (std::uint32_t s : {2u, 3u}) {
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<fq> w;
            if (trial == 4) {
                w = random_word(f37, 32, rng);
            } else {
                auto msg = random_word(f37, 4, rng);
                w = corrupt_bundles(f37, encode(base, msg), 4, 3 + trial % 2, rng);
            }
            auto algebraic = list_decode(fc, w, tau, DecodeMode::Algebraic, s);
            auto oracle = list_decode(fc, w, tau, DecodeMode::BruteForce);
            CHECK(algebraic == oracle);
        }
    }

    // automatic interpolation-order selection agrees with an explicit order
    auto msg = random_word(f37, 4, rng);
    auto w = corrupt_bundles(f37, encode(base, msg), 4, 4, rng);
    CHECK(list_decode(fc, w, tau, DecodeMode::Algebraic, 0) ==
          list_decode(fc, w, tau, DecodeMode::Algebraic, 2));
    // a planted weight-4 error is always recovered
    auto lst = list_decode(fc, w, tau, DecodeMode::Algebraic, 0);
    CHECK(std::find(lst.begin(), lst.end(), encode(base, msg)) != lst.end());
}

TEST_CASE("algebraic list decoding at the guaranteed radius of a short code") {
    const FieldSpec& f17 = FieldSpec::get(17, 1);
    REQUIRE(f17.primitive == 3);
    GRSSpec g = make_grs_spec(f17, 16, 4, 3);
    LinearCode base = grs_build(g);
    FoldedCode fc = fold(base, 4, g);

    std::mt19937_64 rng(0xBEEF17ULL);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<fq> w;
        if (trial % 3 == 2) {
            w = random_word(f17, 16, rng);
        } else {
            auto msg = random_word(f17, 4, rng);
            w = corrupt_bundles(f17, encode(base, msg), 4, trial % 2, rng);
        }
        CHECK(list_decode(fc, w, 0.25, DecodeMode::Algebraic, 2) ==
              list_decode(fc, w, 0.25, DecodeMode::BruteForce));
    }

    // no interpolation order covers half the bundles on this short code
    CHECK_THROWS_AS(list_decode(fc, std::vector<fq>(16, 0), 0.5, DecodeMode::Algebraic, 0),
                    std::invalid_argument);
    // algebraic mode needs the evaluation structure
    FoldedCode blind = fold(base, 4);
    CHECK_THROWS_AS(list_decode(blind, std::vector<fq>(16, 0), 0.25, DecodeMode::Algebraic, 2),
                    std::invalid_argument);
}

TEST_CASE("list recovery: planted symbols and oracle agreement") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g = make_grs_spec(f5, 4, 2, 2);
    FoldedCode fc = unfolded(grs_build(g), g);
    const std::vector<fq> cw{2, 3, 0, 4};

    // sets of size 2 holding the true symbol at every position
    std::vector<std::vector<std::vector<fq>>> sets(4);
    for (std::size_t i = 0; i < 4; ++i)
        sets[i] = {{cw[i]}, {f5.add(cw[i], 1)}};
    auto lst = list_recover(fc, sets, 1.0, 2, DecodeMode::BruteForce);
    CHECK(std::find(lst.begin(), lst.end(), cw) != lst.end());

    // singleton sets reduce list recovery to list decoding
    std::mt19937_64 rng(0x5E75ULL);
    auto w = random_word(f5, 4, rng);
    std::vector<std::vector<std::vector<fq>>> singles(4);
    for (std::size_t i = 0; i < 4; ++i) singles[i] = {{w[i]}};
    CHECK(list_recover(fc, singles, 0.5, 1, DecodeMode::BruteForce) ==
          list_decode(fc, w, 0.5, DecodeMode::BruteForce));

    // full-alphabet sets accept every codeword
    std::vector<std::vector<std::vector<fq>>> full(4);
    for (std::size_t i = 0; i < 4; ++i)
        for (fq v = 0; v < 5; ++v) full[i].push_back({v});
    CHECK(list_recover(fc, full, 1.0, 5, DecodeMode::BruteForce).size() == 25);

    // set-size violations are rejected
    CHECK_THROWS_AS(list_recover(fc, full, 1.0, 4, DecodeMode::BruteForce),
                    std::invalid_argument);
}

TEST_CASE("algebraic list recovery on a folded code") {
    const FieldSpec& f37 = FieldSpec::get(37, 1);
    GRSSpec g = make_grs_spec(f37, 32, 4, 2);
    LinearCode base = grs_build(g);
    FoldedCode fc = fold(base, 4, g);

    std::mt19937_64 rng(0x11575ULL);
    for (int trial = 0; trial < 3; ++trial) {
        auto msg = random_word(f37, 4, rng);
        auto cw = encode(base, msg);
        // true bundle present in 6 of 8 position sets, junk elsewhere
        std::vector<std::vector<std::vector<fq>>> sets(8);
        for (std::size_t i = 0; i < 8; ++i) {
            std::vector<fq> truth(cw.begin() + i * 4, cw.begin() + (i + 1) * 4);
            std::vector<fq> junk = random_word(f37, 4, rng);
            if (i < 6)
                sets[i] = {truth, junk};
            else
                sets[i] = {random_word(f37, 4, rng), junk};
        }
        auto algebraic = list_recover(fc, sets, 0.75, 2, DecodeMode::Algebraic, 3);
        auto oracle = list_recover(fc, sets, 0.75, 2, DecodeMode::BruteForce);
        CHECK(algebraic == oracle);
        CHECK(std::find(algebraic.begin(), algebraic.end(), cw) != algebraic.end());
    }
}

TEST_CASE("coset representatives are canonical and cover the ball") {
    const FieldSpec& f5 = FieldSpec::get(5, 1);
    GRSSpec g2 = make_grs_spec(f5, 4, 2, 2);
    GRSSpec g1 = make_grs_spec(f5, 4, 1, 2);
    LinearCode c = grs_build(g2);
    LinearCode sub = grs_build(g1);
    CosetCode cc = make_coset_code(c, sub);

    // a code with a row outside the span is rejected
    GRSSpec gbad = make_grs_spec(f5, 4, 1, 2, {2, 2, 2, 1});
    CHECK_THROWS_AS(make_coset_code(c, grs_build(gbad)), std::invalid_argument);

    std::mt19937_64 rng(0xC05E7ULL);
    auto w = random_word(f5, 4, rng);
    auto reps = coset_list_decode(cc, w, 0.5, DecodeMode::BruteForce);
    auto full = list_decode(unfolded(c), w, 0.5, DecodeMode::BruteForce);
    CHECK(reps.size() <= full.size());
    CHECK(reps.size() <= 5);  // at most q^{k-k'} cosets exist
    std::set<std::vector<fq>> distinct(reps.begin(), reps.end());
    CHECK(distinct.size() == reps.size());
    for (const auto& r : reps) {
        CHECK(coset_rep(cc, r) == r);  // canonical form is a fixed point
        // the represented coset meets the ball
        bool meets = false;
        for_each_in_rowspace(sub.generator, [&](const std::vector<fq>& s) {
            if (blocked_distance(vec_add(f5, r, s), w, 1) <= 2) meets = true;
        });
        CHECK(meets);
    }

    // quotient by the whole code: at most one representative
    CosetCode trivial = make_coset_code(c, c);
    CHECK(coset_list_decode(trivial, w, 0.5, DecodeMode::BruteForce).size() <= 1);

    // quotient by the zero code: exactly list decoding
    Mat zero_gen(f5, 0, 4);
    LinearCode zero = make_linear_code(f5, 4, 1, zero_gen);
    CosetCode by_zero = make_coset_code(c, zero);
    CHECK(coset_list_decode(by_zero, w, 0.5, DecodeMode::BruteForce) == full);
}

TEST_CASE("coset decoding of a dual-containing binary code") {
    const FieldSpec& f2 = FieldSpec::get(2, 1);
    Mat H(f2, 3, 7);
    for (std::size_t col = 0; col < 7; ++col)
        for (std::size_t bit = 0; bit < 3; ++bit)
            H.at(bit, col) = static_cast<fq>(((col + 1) >> bit) & 1);
    LinearCode hamming = make_linear_code_from_parity(f2, 7, 1, H);
    LinearCode simplex = make_linear_code(f2, 7, 1, H);  // the dual, inside the code
    CosetCode cc = make_coset_code(hamming, simplex);

    std::mt19937_64 rng(0x4A77ULL);
    auto msg = random_word(f2, 4, rng);
    auto cw = encode(hamming, msg);
    auto w = cw;
    w[3] = f2.add(w[3], 1);
    auto reps = coset_list_decode(cc, w, 1.0 / 7.0, DecodeMode::BruteForce);
    REQUIRE(reps.size() == 1);
    CHECK(coset_rep(cc, cw) == reps[0]);
}

TEST_CASE("random nested pairs nest and have the right dimensions") {
    std::mt19937_64 rng(0x7E57ULL);

    const FieldSpec& f2 = FieldSpec::get(2, 1);
    for (int trial = 0; trial < 20; ++trial) {
        auto [c1, c2] = sample_nested_pair(f2, 4, 2, 2, rng);
        CHECK(c1.k_fq == 2);
        CHECK(c2.k_fq == 2);
        // rows generating the dual of c2 sit inside c1
        CHECK(rowspace_contained(c2.parity, c1.generator));
    }

    const FieldSpec& f4 = FieldSpec::get(2, 2);
    auto [c1, c2] = sample_nested_pair(f4, 6, 4, 2, rng);
    CHECK(c1.k_fq == 4);
    CHECK(c2.k_fq == 4);
    CHECK(rowspace_contained(c2.parity, c1.generator));

    // determinism: one seed, one pair
    std::mt19937_64 ra(42), rb(42);
    auto [a1, a2] = sample_nested_pair(f4, 6, 4, 2, ra);
    auto [b1, b2] = sample_nested_pair(f4, 6, 4, 2, rb);
    CHECK(a1.generator == b1.generator);
    CHECK(a2.generator == b2.generator);

    CHECK_THROWS_AS(sample_nested_pair(f4, 6, 4, 3, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_nested_pair(f4, 6, 2, 4, rng), std::invalid_argument);
}

TEST_CASE("random nested pairs meet the distance tail bound") {
    // Random [8,4] codes over GF(16): both codes in the pair should reach
    // distance >= 2 except with probability <= 2*q^{-n((1-R)/2 - H_q(1/4))}
    // ~ 0.617; the observed failure rate over 1000 samples stays below that
    // plus three sigma.
    const FieldSpec& f16 = FieldSpec::get(2, 4);
    std::mt19937_64 rng(0xD157ULL);
    const int trials = 1000;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
        auto [c1, c2] = sample_nested_pair(f16, 8, 4, 4, rng);
        if (distance_bruteforce(c1) < 2 || distance_bruteforce(c2) < 2) ++failures;
    }
    const double bound = 0.617;
    const double sigma = std::sqrt(bound * (1 - bound) / trials);
    CHECK(static_cast<double>(failures) / trials <= bound + 3 * sigma);
}
