// Unit tests for the finite field layer: fixed small-field values worked out
// by hand, exhaustive identities on every field small enough to sweep, and
// the subfield embedding maps.

#include <catch2/catch_amalgamated.hpp>

#include <aqec/gf.hpp>

#include <random>
#include <set>

using namespace aqec;

TEST_CASE("GF(4) matches the hand table") {
    const FieldSpec& f = FieldSpec::get(2, 2);
    REQUIRE(f.q == 4);
    // codes: 0, 1, 2 = x (call it w), 3 = x+1 = w^2
    const fq w = 2, w2 = 3;
    CHECK(f.mul(w, w) == w2);
    CHECK(f.mul(w, w2) == 1);        // w * w^2 = w^3 = 1
    CHECK(f.add(w, w2) == 1);        // x + (x+1)
    CHECK(f.inv(w) == w2);
    CHECK(f.trace(0) == 0);
    CHECK(f.trace(1) == 0);          // 1 + 1^2
    CHECK(f.trace(w) == 1);          // w + w^2 = 1
    CHECK(f.trace(w2) == 1);

    // {w, w^2} is self-dual with respect to the trace form.
    auto beta = f.dual_basis({w, w2});
    CHECK(beta == std::vector<fq>{w, w2});
}

TEST_CASE("GF(5) inverse and primitive root") {
    const FieldSpec& f = FieldSpec::get(5, 1);
    CHECK(f.inv(3) == 2);
    CHECK(f.primitive == 2);  // smallest primitive root mod 5
    CHECK(f.mul(4, 4) == 1);
    CHECK(f.neg(2) == 3);
    CHECK(f.pow(2, 4) == 1);
    CHECK(f.pow(2, -1) == 3);  // 2 * 3 = 6 = 1
}

TEST_CASE("field axioms and Frobenius on all sweepable fields") {
    const std::vector<std::pair<std::uint32_t, std::uint32_t>> shapes = {
        {2, 1}, {2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6},
        {3, 1}, {3, 2}, {3, 3}, {5, 1}, {5, 2}, {7, 1}, {13, 1}, {17, 1},
    };
    for (auto [p, m] : shapes) {
        const FieldSpec& f = FieldSpec::get(p, m);
        INFO("GF(" << p << "^" << m << ")");
        REQUIRE(f.q <= 729u);

        for (fq a = 0; a < f.q; ++a) {
            CHECK(f.add(a, 0) == a);
            CHECK(f.mul(a, 1) == a);
            CHECK(f.add(a, f.neg(a)) == 0);
            CHECK(f.pow(a, f.q) == a);                     // Frobenius fixed point
            if (a != 0) {
                CHECK(f.mul(a, f.inv(a)) == 1);
                CHECK(f.pow(a, static_cast<std::int64_t>(f.q) - 1) == 1);
            }
            // trace is Frobenius-invariant and lands in the prime field
            CHECK(f.trace(a) == f.trace(f.pow(a, p)));
            CHECK(f.trace(a) < p);
        }
        // distributivity on a sample grid
        for (fq a = 0; a < f.q; a += 3)
            for (fq b = 0; b < f.q; b += 5)
                for (fq c = 0; c < f.q; c += 7)
                    CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        // trace additivity
        for (fq a = 0; a < f.q; a += 2)
            for (fq b = 0; b < f.q; b += 3)
                CHECK(f.trace(f.add(a, b)) == (f.trace(a) + f.trace(b)) % p);
        // primitive element really generates
        std::set<fq> seen;
        fq acc = 1;
        for (std::uint32_t i = 0; i + 1 < f.q; ++i) {
            seen.insert(acc);
            acc = f.mul(acc, f.primitive);
        }
        CHECK(acc == 1);
        CHECK(seen.size() == f.q - 1);
    }
}

TEST_CASE("dual bases satisfy the coordinate inner-product identity") {
    // With a = sum a_i alpha_i and b = sum b_j beta_j, the trace form
    // contracts to the plain dot product of the coordinate vectors.
    for (auto [p, m] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 2}, {2, 3}, {2, 4}, {2, 6}, {3, 2}, {3, 3}, {5, 2}}) {
        const FieldSpec& f = FieldSpec::get(p, m);
        INFO("GF(" << p << "^" << m << ")");
        const DualBasisPair& pd = f.poly_dual();
        REQUIRE(pd.alpha.size() == m);

        // duality of the cached pair
        for (std::uint32_t i = 0; i < m; ++i)
            for (std::uint32_t j = 0; j < m; ++j)
                CHECK(f.trace(f.mul(pd.alpha[i], pd.beta[j])) == (i == j ? 1u : 0u));

        for (fq a = 0; a < f.q; ++a) {
            // reconstruction from alpha coordinates
            auto ca = f.coords(a, pd, true);
            fq rebuilt = 0;
            for (std::uint32_t i = 0; i < m; ++i)
                rebuilt = f.add(rebuilt, f.mul(ca[i], pd.alpha[i]));
            REQUIRE(rebuilt == a);

            for (fq b = 0; b < f.q; ++b) {
                auto cb = f.coords(b, pd, false);
                std::uint32_t dot = 0;
                for (std::uint32_t i = 0; i < m; ++i) dot += ca[i] * cb[i];
                CHECK(dot % p == f.trace(f.mul(a, b)));
            }
        }
    }
}

TEST_CASE("dual_basis is an involution on random bases") {
    std::mt19937 rng(12345);
    for (auto [p, m] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 3}, {3, 2}, {2, 4}}) {
        const FieldSpec& f = FieldSpec::get(p, m);
        int built = 0;
        while (built < 5) {
            std::vector<fq> alpha(m);
            for (auto& v : alpha) v = rng() % f.q;
            std::vector<fq> beta;
            try {
                beta = f.dual_basis(alpha);
            } catch (const std::invalid_argument&) {
                continue;  // random tuple happened to be dependent
            }
            ++built;
            for (std::uint32_t i = 0; i < m; ++i)
                for (std::uint32_t j = 0; j < m; ++j)
                    CHECK(f.trace(f.mul(alpha[i], beta[j])) == (i == j ? 1u : 0u));
            CHECK(f.dual_basis(beta) == alpha);
        }
    }
}

TEST_CASE("shipped moduli are valid and keep x primitive") {
    for (auto [p, m] : std::vector<std::pair<std::uint32_t, std::uint32_t>>{
             {2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6}, {2, 7}, {2, 8},
             {3, 2}, {3, 3}, {3, 4}, {5, 2}, {5, 3}, {7, 2},
             {11, 2}, {13, 2}, {17, 2}}) {
        const FieldSpec& f = FieldSpec::get(p, m);
        INFO("GF(" << p << "^" << m << ")");
        CHECK(f.primitive == p);  // code of x
    }
}

TEST_CASE("search fallback constructs fields not in the table") {
    const FieldSpec& f = FieldSpec::get(2, 10);
    REQUIRE(f.q == 1024);
    std::mt19937 rng(99);
    for (int t = 0; t < 50; ++t) {
        fq a = 1 + rng() % (f.q - 1);
        fq b = 1 + rng() % (f.q - 1);
        CHECK(f.mul(a, f.inv(a)) == 1);
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.pow(a, 3) == f.mul(a, f.mul(a, a)));
    }
}

TEST_CASE("polynomial fallback beyond the table size") {
    // 2^17 exceeds the log-table cutoff, exercising the slow path.
    const FieldSpec& f = FieldSpec::get(2, 17);
    REQUIRE(f.q == 131072);
    std::mt19937 rng(7);
    for (int t = 0; t < 10; ++t) {
        fq a = 1 + rng() % (f.q - 1);
        fq b = 1 + rng() % (f.q - 1);
        CHECK(f.mul(a, f.inv(a)) == 1);
        // characteristic-2 freshman's dream
        fq s = f.add(a, b);
        CHECK(f.mul(s, s) == f.add(f.mul(a, a), f.mul(b, b)));
    }
}

TEST_CASE("construction rejects bad input") {
    CHECK_THROWS_AS(FieldSpec::make_with_modulus(2, 2, {1, 0, 1}),  // x^2+1 = (x+1)^2
                    std::invalid_argument);
    CHECK_THROWS_AS(FieldSpec::make_with_modulus(4, 1, {1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(FieldSpec::make_with_modulus(3, 2, {5, 0, 1}), std::invalid_argument);

    const FieldSpec& f = FieldSpec::get(2, 3);
    CHECK_THROWS_AS(f.inv(0), std::domain_error);
    CHECK_THROWS_AS(f.dual_basis({1, 2, 3}), std::invalid_argument);  // 3 = 1+2, dependent
    CHECK_THROWS_AS(f.dual_basis({1, 2}), std::invalid_argument);
}

TEST_CASE("FieldElement sugar") {
    const FieldSpec& f = FieldSpec::get(7, 1);
    FieldElement a(f, 3), b(f, 5);
    CHECK((a * b).value() == 1);
    CHECK((a + b).value() == 1);
    CHECK((a - b).value() == 5);
    CHECK((a / b).value() == (a * b.inverse()).value());
    CHECK(a.pow(6).value() == 1);
    CHECK((-a).value() == 4);
}

TEST_CASE("subfield bridge GF(4) into GF(16)") {
    const FieldSpec& sub = FieldSpec::get(2, 2);
    const FieldSpec& big = FieldSpec::get(2, 4);
    SubfieldBridge br(sub, big);
    REQUIRE(br.degree() == 2);

    // ring homomorphism, exhaustively
    for (fq a = 0; a < sub.q; ++a) {
        CHECK(br.project(br.embed(a)) == a);
        for (fq b = 0; b < sub.q; ++b) {
            CHECK(br.embed(sub.add(a, b)) == big.add(br.embed(a), br.embed(b)));
            CHECK(br.embed(sub.mul(a, b)) == big.mul(br.embed(a), br.embed(b)));
        }
    }
    CHECK(br.embed(1) == 1);

    // coordinate round trips and the trace tower
    for (fq A = 0; A < big.q; ++A) {
        CHECK(br.unvec(br.vec(A)) == A);
        CHECK(br.unvec_dual(br.vec_dual(A)) == A);
        CHECK(big.trace(A) == sub.trace(br.tr_rel(A)));
    }

    // the pairing identity vec/vec_dual is built for
    for (fq u = 0; u < big.q; ++u)
        for (fq v = 0; v < big.q; ++v) {
            auto cu = br.vec(u);
            auto dv = br.vec_dual(v);
            fq dot = 0;
            for (std::uint32_t j = 0; j < br.degree(); ++j)
                dot = sub.add(dot, sub.mul(cu[j], dv[j]));
            CHECK(dot == br.tr_rel(big.mul(u, v)));
        }
}

TEST_CASE("subfield bridge with non-prime bottom field GF(4) into GF(64)") {
    const FieldSpec& sub = FieldSpec::get(2, 2);
    const FieldSpec& big = FieldSpec::get(2, 6);
    SubfieldBridge br(sub, big);
    REQUIRE(br.degree() == 3);
    for (fq a = 0; a < sub.q; ++a)
        for (fq b = 0; b < sub.q; ++b)
            CHECK(br.embed(sub.mul(a, b)) == big.mul(br.embed(a), br.embed(b)));
    for (fq A = 0; A < big.q; ++A) {
        CHECK(br.unvec(br.vec(A)) == A);
        CHECK(br.unvec_dual(br.vec_dual(A)) == A);
        CHECK(big.trace(A) == sub.trace(br.tr_rel(A)));
    }
    // relative trace is F_q-linear
    for (fq c = 0; c < sub.q; ++c)
        for (fq A = 0; A < big.q; A += 5)
            CHECK(br.tr_rel(big.mul(br.embed(c), A)) == sub.mul(c, br.tr_rel(A)));
}

TEST_CASE("subfield bridge odd characteristic GF(3) into GF(9)") {
    const FieldSpec& sub = FieldSpec::get(3, 1);
    const FieldSpec& big = FieldSpec::get(3, 2);
    SubfieldBridge br(sub, big);
    for (fq a = 0; a < 3; ++a) CHECK(br.embed(a) == a);  // prime subfield is literal
    for (fq u = 0; u < big.q; ++u)
        for (fq v = 0; v < big.q; ++v) {
            auto cu = br.vec(u);
            auto dv = br.vec_dual(v);
            fq dot = 0;
            for (std::uint32_t j = 0; j < br.degree(); ++j)
                dot = sub.add(dot, sub.mul(cu[j], dv[j]));
            CHECK(dot == br.tr_rel(big.mul(u, v)));
        }
}

TEST_CASE("bridge rejects a non-subfield relation") {
    CHECK_THROWS_AS(SubfieldBridge(FieldSpec::get(2, 2), FieldSpec::get(2, 3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(SubfieldBridge(FieldSpec::get(2, 1), FieldSpec::get(3, 1)),
                    std::invalid_argument);
}
