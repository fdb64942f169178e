#pragma once

/**
 * @file gf.hpp
 * @brief Arithmetic for finite extension fields GF(p^m), dual bases, and
 *        subfield embeddings.
 *
 * Elements are stored as integer codes in [0, p^m): the base-p digits of a
 * code are the coefficients of the element in the polynomial basis
 * {1, x, ..., x^{m-1}} of GF(p)[x]/(modulus).  Multiplication runs through
 * log/antilog tables whenever p^m fits in 16 bits, which covers every field
 * this library touches in anger; beyond that a direct polynomial fallback
 * keeps the semantics identical at reduced speed.
 *
 * A FieldSpec validates itself on construction: the modulus is checked for
 * irreducibility and the stored generator for primitivity, so a corrupted
 * table entry or a bad config file fails loudly instead of silently
 * corrupting math downstream.
 */

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aqec {

/// Element code of a finite field element (digits base p = polynomial coeffs).
using fq = std::uint32_t;

namespace detail {

/// Dense matrix over the prime field F_p, used for the small linear solves
/// (dual bases, subfield coordinate maps) that the field layer itself needs.
struct PrimeMat {
    std::uint32_t p = 2;
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint32_t> a;  // row-major, entries in [0, p)

    PrimeMat() = default;
    PrimeMat(std::uint32_t p_, std::size_t r, std::size_t c)
        : p(p_), rows(r), cols(c), a(r * c, 0) {}

    std::uint32_t& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    std::uint32_t at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }
};

inline std::uint32_t prime_inv(std::uint32_t x, std::uint32_t p) {
    // Extended Euclid on word-sized values; p is prime and x != 0 (mod p).
    std::int64_t t = 0, nt = 1, r = p, nr = x % p;
    while (nr != 0) {
        std::int64_t qd = r / nr;
        t -= qd * nt; std::swap(t, nt);
        r -= qd * nr; std::swap(r, nr);
    }
    if (r != 1) throw std::domain_error("prime_inv: argument not invertible");
    if (t < 0) t += p;
    return static_cast<std::uint32_t>(t);
}

/// In-place Gauss-Jordan over F_p; returns rank.  Only the first
/// `cols_reduced` columns are eligible for pivots, so trailing columns can
/// carry an augment.
inline std::size_t prime_rref(PrimeMat& m, std::size_t cols_reduced) {
    const std::uint32_t p = m.p;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols_reduced && rank < m.rows; ++col) {
        std::size_t piv = rank;
        while (piv < m.rows && m.at(piv, col) == 0) ++piv;
        if (piv == m.rows) continue;
        if (piv != rank)
            for (std::size_t c = 0; c < m.cols; ++c)
                std::swap(m.at(piv, c), m.at(rank, c));
        const std::uint32_t inv = prime_inv(m.at(rank, col), p);
        for (std::size_t c = 0; c < m.cols; ++c)
            m.at(rank, c) = static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(m.at(rank, c)) * inv) % p);
        for (std::size_t r = 0; r < m.rows; ++r) {
            if (r == rank || m.at(r, col) == 0) continue;
            const std::uint64_t f = m.at(r, col);
            for (std::size_t c = 0; c < m.cols; ++c) {
                std::uint64_t v = m.at(r, c) +
                    (p - static_cast<std::uint32_t>((f * m.at(rank, c)) % p));
                m.at(r, c) = static_cast<std::uint32_t>(v % p);
            }
        }
        ++rank;
    }
    return rank;
}

/// Solve M x = b over F_p for square invertible M (throws otherwise).
inline std::vector<std::uint32_t> prime_solve(const PrimeMat& mat,
                                              const std::vector<std::uint32_t>& b) {
    if (mat.rows != mat.cols || b.size() != mat.rows)
        throw std::invalid_argument("prime_solve: shape mismatch");
    PrimeMat w(mat.p, mat.rows, mat.cols + 1);
    for (std::size_t r = 0; r < mat.rows; ++r) {
        for (std::size_t c = 0; c < mat.cols; ++c) w.at(r, c) = mat.at(r, c);
        w.at(r, mat.cols) = b[r] % mat.p;
    }
    if (prime_rref(w, mat.cols) != mat.cols)
        throw std::domain_error("prime_solve: singular system");
    std::vector<std::uint32_t> x(mat.cols);
    for (std::size_t r = 0; r < mat.cols; ++r) x[r] = w.at(r, mat.cols);
    return x;
}

/// Inverse of a square matrix over F_p.
inline PrimeMat prime_inverse(const PrimeMat& mat) {
    if (mat.rows != mat.cols)
        throw std::invalid_argument("prime_inverse: matrix not square");
    const std::size_t n = mat.rows;
    PrimeMat w(mat.p, n, 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) w.at(r, c) = mat.at(r, c);
        w.at(r, n + r) = 1;
    }
    if (prime_rref(w, n) != n)
        throw std::domain_error("prime_inverse: singular matrix");
    PrimeMat out(mat.p, n, n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out.at(r, c) = w.at(r, n + c);
    return out;
}

// --- polynomial helpers over F_p (coefficient vectors, low degree first) ---

inline void poly_trim(std::vector<std::uint32_t>& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline std::vector<std::uint32_t> poly_mod(std::vector<std::uint32_t> f,
                                           const std::vector<std::uint32_t>& g,
                                           std::uint32_t p) {
    poly_trim(f);
    const std::size_t dg = g.size() - 1;  // g monic of degree >= 1
    while (f.size() > dg) {
        const std::uint64_t lead = f.back();
        const std::size_t shift = f.size() - 1 - dg;
        for (std::size_t i = 0; i <= dg; ++i) {
            std::uint64_t v = f[shift + i] +
                (p - static_cast<std::uint32_t>((lead * g[i]) % p));
            f[shift + i] = static_cast<std::uint32_t>(v % p);
        }
        poly_trim(f);
    }
    return f;
}

inline std::vector<std::uint32_t> poly_mulmod(const std::vector<std::uint32_t>& a,
                                              const std::vector<std::uint32_t>& b,
                                              const std::vector<std::uint32_t>& g,
                                              std::uint32_t p) {
    if (a.empty() || b.empty()) return {};
    std::vector<std::uint32_t> prod(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            prod[i + j] = static_cast<std::uint32_t>(
                (prod[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
    }
    return poly_mod(std::move(prod), g, p);
}

inline std::vector<std::uint32_t> poly_gcd(std::vector<std::uint32_t> a,
                                           std::vector<std::uint32_t> b,
                                           std::uint32_t p) {
    poly_trim(a); poly_trim(b);
    while (!b.empty()) {
        const std::uint32_t inv = prime_inv(b.back(), p);
        std::vector<std::uint32_t> bm(b.size());
        for (std::size_t i = 0; i < b.size(); ++i)
            bm[i] = static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(b[i]) * inv) % p);
        a = poly_mod(std::move(a), bm, p);
        std::swap(a, b);
    }
    return a;
}

/// x^(p^e) mod g by e rounds of p-th powering.
inline std::vector<std::uint32_t> poly_frob_x(std::size_t e,
                                              const std::vector<std::uint32_t>& g,
                                              std::uint32_t p) {
    std::vector<std::uint32_t> r = poly_mod({0, 1}, g, p);
    for (std::size_t i = 0; i < e; ++i) {
        std::vector<std::uint32_t> acc{1};
        std::vector<std::uint32_t> base = r;
        std::uint32_t exp = p;
        while (exp) {
            if (exp & 1) acc = poly_mulmod(acc, base, g, p);
            base = poly_mulmod(base, base, g, p);
            exp >>= 1;
        }
        r = std::move(acc);
    }
    return r;
}

/// Rabin irreducibility test for a monic polynomial of degree m over F_p.
inline bool poly_irreducible(const std::vector<std::uint32_t>& g, std::uint32_t p) {
    const std::size_t m = g.size() - 1;
    if (m == 0) return false;
    if (m == 1) return true;
    auto diff_x = [&](const std::vector<std::uint32_t>& f) {
        std::vector<std::uint32_t> d(std::max<std::size_t>(f.size(), 2), 0);
        for (std::size_t i = 0; i < d.size(); ++i) {
            std::uint32_t fv = i < f.size() ? f[i] : 0;
            std::uint32_t xv = i == 1 ? 1 : 0;
            d[i] = (fv + p - xv) % p;
        }
        poly_trim(d);
        return d;
    };
    // x^(p^m) == x mod g
    if (!diff_x(poly_frob_x(m, g, p)).empty()) return false;
    // gcd(x^(p^(m/r)) - x, g) == 1 for every prime divisor r of m
    std::size_t mm = m;
    std::vector<std::size_t> primes;
    for (std::size_t r = 2; r * r <= mm; ++r)
        if (mm % r == 0) { primes.push_back(r); while (mm % r == 0) mm /= r; }
    if (mm > 1) primes.push_back(mm);
    for (std::size_t r : primes) {
        auto d = diff_x(poly_frob_x(m / r, g, p));
        if (poly_gcd(std::move(d), g, p).size() != 1) return false;
    }
    return true;
}

inline std::vector<std::uint32_t> factor_u64(std::uint64_t n) {
    std::vector<std::uint32_t> primes;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            primes.push_back(static_cast<std::uint32_t>(d));
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) primes.push_back(static_cast<std::uint32_t>(n));
    return primes;
}

/// Known irreducible moduli with x primitive (Conway polynomials for the
/// small cases); anything else falls back to a deterministic search.
inline std::optional<std::vector<std::uint32_t>> modulus_table(std::uint32_t p,
                                                               std::uint32_t m) {
    struct Entry { std::uint32_t p, m; std::vector<std::uint32_t> c; };
    static const std::vector<Entry> tab = {
        {2, 2, {1, 1, 1}},
        {2, 3, {1, 1, 0, 1}},
        {2, 4, {1, 1, 0, 0, 1}},
        {2, 5, {1, 0, 1, 0, 0, 1}},
        {2, 6, {1, 1, 0, 1, 1, 0, 1}},
        {2, 7, {1, 1, 0, 0, 0, 0, 0, 1}},
        {2, 8, {1, 0, 1, 1, 1, 0, 0, 0, 1}},
        {3, 2, {2, 2, 1}},
        {3, 3, {1, 2, 0, 1}},
        {3, 4, {2, 0, 0, 2, 1}},
        {5, 2, {2, 4, 1}},
        {5, 3, {3, 3, 0, 1}},
        {7, 2, {3, 6, 1}},
        {11, 2, {2, 7, 1}},
        {13, 2, {2, 12, 1}},
        {17, 2, {3, 16, 1}},
    };
    for (const auto& e : tab)
        if (e.p == p && e.m == m) return e.c;
    return std::nullopt;
}

inline std::vector<std::uint32_t> search_modulus(std::uint32_t p, std::uint32_t m) {
    // Enumerate monic degree-m polynomials by their low-coefficient code and
    // return the first irreducible one: deterministic and reproducible.
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < m; ++i) count *= p;
    for (std::uint64_t code = 1; code < count; ++code) {
        std::vector<std::uint32_t> f(m + 1, 0);
        std::uint64_t c = code;
        for (std::uint32_t i = 0; i < m; ++i) { f[i] = static_cast<std::uint32_t>(c % p); c /= p; }
        f[m] = 1;
        if (f[0] == 0) continue;  // divisible by x
        if (poly_irreducible(f, p)) return f;
    }
    throw std::logic_error("search_modulus: no irreducible polynomial found");
}

}  // namespace detail

/// A basis of GF(p^m) over F_p together with its trace-dual:
/// tr(alpha_i * beta_j) = delta_ij.
struct DualBasisPair {
    std::vector<fq> alpha;
    std::vector<fq> beta;
};

/**
 * Immutable description of GF(p^m) together with precomputed arithmetic
 * tables.  Obtain instances through FieldSpec::get (cached, stable address)
 * or the make factories; the constructor re-verifies every invariant.
 */
class FieldSpec {
public:
    std::uint32_t p;                      ///< characteristic (prime)
    std::uint32_t m;                      ///< extension degree
    std::uint32_t q;                      ///< field size p^m
    std::vector<std::uint32_t> modulus;   ///< monic irreducible, degree m, low-first
    fq primitive;                         ///< fixed generator of the unit group

    /// Cached spec for GF(p^m) with the library's default modulus; the
    /// returned reference stays valid for the lifetime of the process.
    static const FieldSpec& get(std::uint32_t p, std::uint32_t m);

    /// Build with the table modulus (or a deterministic search fallback).
    static FieldSpec make(std::uint32_t p, std::uint32_t m);

    /// Build with an explicit modulus, e.g. when loading a field from a file.
    static FieldSpec make_with_modulus(std::uint32_t p, std::uint32_t m,
                                       std::vector<std::uint32_t> mod) {
        return FieldSpec(p, m, std::move(mod));
    }

    // --- element arithmetic on codes ---

    fq add(fq a, fq b) const {
        if (p == 2) return a ^ b;
        if (!add_tab_.empty()) return add_tab_[static_cast<std::size_t>(a) * q + b];
        return add_slow(a, b);
    }
    fq neg(fq a) const {
        if (p == 2) return a;
        return neg_tab_[a];
    }
    fq sub(fq a, fq b) const { return add(a, neg(b)); }

    fq mul(fq a, fq b) const {
        if (a == 0 || b == 0) return 0;
        if (!log_.empty()) return antilog_[static_cast<std::size_t>(log_[a]) + log_[b]];
        return mul_slow(a, b);
    }
    fq inv(fq a) const {
        if (a == 0) throw std::domain_error("FieldSpec::inv: zero has no inverse");
        if (!log_.empty()) return antilog_[q - 1 - log_[a]];
        return pow(a, static_cast<std::int64_t>(q) - 2);
    }
    fq div(fq a, fq b) const { return mul(a, inv(b)); }

    /// a^e with the exponent reduced mod (q-1); a != 0 required when e < 0.
    fq pow(fq a, std::int64_t e) const {
        if (a == 0) {
            if (e < 0) throw std::domain_error("FieldSpec::pow: zero to negative power");
            return e == 0 ? 1u : 0u;
        }
        const std::int64_t ord = static_cast<std::int64_t>(q) - 1;
        std::int64_t r = e % ord;
        if (r < 0) r += ord;
        if (!log_.empty())
            return antilog_[static_cast<std::size_t>(
                (static_cast<std::uint64_t>(log_[a]) * static_cast<std::uint64_t>(r)) %
                static_cast<std::uint64_t>(ord))];
        fq acc = 1, base = a;
        while (r) {
            if (r & 1) acc = mul(acc, base);
            base = mul(base, base);
            r >>= 1;
        }
        return acc;
    }

    /// Absolute trace down to F_p, value in [0, p).
    std::uint32_t trace(fq a) const { return trace_[a]; }

    /// Discrete log base `primitive` (a != 0).
    std::uint32_t log(fq a) const {
        if (a == 0) throw std::domain_error("FieldSpec::log: log of zero");
        if (log_.empty()) throw std::logic_error("FieldSpec::log: no table for this size");
        return log_[a];
    }

    // --- digit access (coefficients in the polynomial basis) ---

    std::uint32_t digit(fq a, std::uint32_t i) const { return (a / p_pow_[i]) % p; }
    fq from_digits(const std::vector<std::uint32_t>& d) const {
        fq v = 0;
        for (std::uint32_t i = 0; i < m && i < d.size(); ++i)
            v += (d[i] % p) * p_pow_[i];
        return v;
    }
    std::vector<std::uint32_t> digits(fq a) const {
        std::vector<std::uint32_t> d(m);
        for (std::uint32_t i = 0; i < m; ++i) d[i] = digit(a, i);
        return d;
    }

    /// Code of x^l for l < m (the l-th polynomial basis element).
    fq poly_basis_elt(std::uint32_t l) const { return p_pow_[l]; }

    // --- bases ---

    /// Canonical polynomial basis {1, x, ..., x^{m-1}} with its trace-dual,
    /// computed once at construction and cached here.
    const DualBasisPair& poly_dual() const { return *poly_dual_; }

    /// Trace-dual of an arbitrary basis (throws if `alpha` is not a basis).
    std::vector<fq> dual_basis(const std::vector<fq>& alpha) const {
        if (alpha.size() != m)
            throw std::invalid_argument("dual_basis: need exactly m elements");
        detail::PrimeMat tm(p, m, m);
        for (std::uint32_t i = 0; i < m; ++i)
            for (std::uint32_t l = 0; l < m; ++l)
                tm.at(i, l) = trace(mul(alpha[i], p_pow_[l]));
        std::vector<fq> beta(m);
        try {
            for (std::uint32_t j = 0; j < m; ++j) {
                std::vector<std::uint32_t> e(m, 0);
                e[j] = 1;
                beta[j] = from_digits(detail::prime_solve(tm, e));
            }
        } catch (const std::domain_error&) {
            throw std::invalid_argument("dual_basis: elements do not form a basis");
        }
        return beta;
    }

    /// Coordinates of `a` in basis.alpha (or basis.beta when in_alpha=false),
    /// extracted through the dual: c_i = tr(a * beta_i).
    std::vector<std::uint32_t> coords(fq a, const DualBasisPair& basis,
                                      bool in_alpha = true) const {
        const auto& other = in_alpha ? basis.beta : basis.alpha;
        std::vector<std::uint32_t> c(m);
        for (std::uint32_t i = 0; i < m; ++i) c[i] = trace(mul(a, other[i]));
        return c;
    }

    bool operator==(const FieldSpec& o) const {
        return p == o.p && m == o.m && modulus == o.modulus;
    }
    bool operator!=(const FieldSpec& o) const { return !(*this == o); }

private:
    FieldSpec(std::uint32_t p_, std::uint32_t m_, std::vector<std::uint32_t> mod)
        : p(p_), m(m_), modulus(std::move(mod)) {
        if (m == 0 || m > 20)
            throw std::invalid_argument("FieldSpec: degree out of range");
        std::uint64_t qq = 1;
        for (std::uint32_t i = 0; i < m; ++i) {
            qq *= p;
            if (qq > (1u << 20))
                throw std::invalid_argument("FieldSpec: fields beyond 2^20 unsupported");
        }
        q = static_cast<std::uint32_t>(qq);
        p_pow_.resize(m + 1);
        p_pow_[0] = 1;
        for (std::uint32_t i = 1; i <= m; ++i) p_pow_[i] = p_pow_[i - 1] * p;
        verify();
        build_tables();
    }

    fq mul_slow(fq a, fq b) const {
        auto prod = detail::poly_mulmod(digits(a), digits(b), modulus, p);
        return from_digits(prod);
    }
    fq add_slow(fq a, fq b) const {
        fq v = 0;
        for (std::uint32_t i = 0; i < m; ++i)
            v += ((digit(a, i) + digit(b, i)) % p) * p_pow_[i];
        return v;
    }
    fq neg_slow(fq a) const {
        fq v = 0;
        for (std::uint32_t i = 0; i < m; ++i)
            v += ((p - digit(a, i)) % p) * p_pow_[i];
        return v;
    }

    void verify() const {
        if (p < 2) throw std::invalid_argument("FieldSpec: characteristic must be prime");
        for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= p; ++d)
            if (p % d == 0)
                throw std::invalid_argument("FieldSpec: characteristic must be prime");
        if (modulus.size() != m + 1 || modulus.back() != 1)
            throw std::invalid_argument("FieldSpec: modulus must be monic of degree m");
        for (auto c : modulus)
            if (c >= p)
                throw std::invalid_argument("FieldSpec: modulus coefficient out of range");
        if (!detail::poly_irreducible(modulus, p))
            throw std::invalid_argument("FieldSpec: modulus is reducible");
    }

    void build_tables() {
        const auto ord_factors = detail::factor_u64(q - 1);
        auto slow_pow = [&](fq a, std::uint64_t e) {
            fq acc = 1, base = a;
            while (e) {
                if (e & 1) acc = mul_slow(acc, base);
                base = mul_slow(base, base);
                e >>= 1;
            }
            return acc;
        };
        auto is_primitive = [&](fq g) {
            if (g == 0) return false;
            if (q == 2) return g == 1;
            for (auto r : ord_factors)
                if (slow_pow(g, (q - 1) / r) == 1) return false;
            return true;
        };
        // Prefer x as generator (true for the shipped moduli), otherwise the
        // smallest primitive code.
        fq gen = (m >= 2) ? static_cast<fq>(p) : 0;
        if (m == 1 || !is_primitive(gen)) {
            gen = 0;
            for (fq c = 1; c < q && gen == 0; ++c)
                if (is_primitive(c)) gen = c;
            if (gen == 0) throw std::logic_error("FieldSpec: no primitive element");
        }
        primitive = gen;

        if (q <= 65536) {
            log_.assign(q, 0);
            antilog_.assign(2 * (q - 1), 0);
            fq acc = 1;
            for (std::uint32_t i = 0; i < q - 1; ++i) {
                antilog_[i] = acc;
                antilog_[i + (q - 1)] = acc;
                log_[acc] = static_cast<std::uint16_t>(i);
                acc = mul_slow(acc, primitive);
            }
            if (acc != 1) throw std::logic_error("FieldSpec: generator order mismatch");
        }
        if (p != 2) {
            neg_tab_.resize(q);
            for (fq a = 0; a < q; ++a) neg_tab_[a] = neg_slow(a);
            if (static_cast<std::uint64_t>(q) * q <= (1u << 22)) {
                add_tab_.resize(static_cast<std::size_t>(q) * q);
                for (fq a = 0; a < q; ++a)
                    for (fq b = 0; b < q; ++b)
                        add_tab_[static_cast<std::size_t>(a) * q + b] = add_slow(a, b);
            }
        }
        trace_.resize(q);
        for (fq a = 0; a < q; ++a) {
            fq t = 0, f = a;
            for (std::uint32_t i = 0; i < m; ++i) {
                t = add_slow(t, f);
                f = slow_pow(f, p);
            }
            if (t >= p) throw std::logic_error("FieldSpec: trace left the prime field");
            trace_[a] = t;
        }

        // Dual of the polynomial basis: solve tr(x^i beta_j) = delta_ij.
        detail::PrimeMat tm(p, m, m);
        for (std::uint32_t i = 0; i < m; ++i)
            for (std::uint32_t l = 0; l < m; ++l)
                tm.at(i, l) = trace_[mul_slow(p_pow_[i], p_pow_[l])];
        auto dual = std::make_unique<DualBasisPair>();
        dual->alpha.resize(m);
        dual->beta.resize(m);
        for (std::uint32_t j = 0; j < m; ++j) {
            dual->alpha[j] = p_pow_[j];
            std::vector<std::uint32_t> e(m, 0);
            e[j] = 1;
            dual->beta[j] = from_digits(detail::prime_solve(tm, e));
        }
        poly_dual_ = std::move(dual);
    }

    std::vector<std::uint32_t> p_pow_;       // p^0 .. p^m
    std::vector<std::uint16_t> log_;         // empty when q > 65536
    std::vector<fq> antilog_;                // doubled length to skip a mod
    std::vector<fq> add_tab_, neg_tab_;      // small non-binary fields only
    std::vector<std::uint32_t> trace_;
    std::unique_ptr<DualBasisPair> poly_dual_;
};

inline FieldSpec FieldSpec::make(std::uint32_t p, std::uint32_t m) {
    if (m == 1) {
        // GF(p) proper: bootstrap once to learn the primitive root g, then
        // store the linear modulus x - g for serialization round-trips.
        FieldSpec boot(p, 1, std::vector<std::uint32_t>{0, 1});
        std::vector<std::uint32_t> mod{(p - boot.primitive % p) % p, 1};
        return FieldSpec(p, 1, std::move(mod));
    }
    if (auto mod = detail::modulus_table(p, m)) {
        try {
            return FieldSpec(p, m, std::move(*mod));
        } catch (const std::invalid_argument&) {
            // fall through to the search: a bad table entry must not be fatal
        }
    }
    return FieldSpec(p, m, detail::search_modulus(p, m));
}

inline const FieldSpec& FieldSpec::get(std::uint32_t p, std::uint32_t m) {
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, std::uint32_t>,
                    std::unique_ptr<FieldSpec>> cache;
    std::lock_guard<std::mutex> lock(mu);
    const auto key = std::make_pair(p, m);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::unique_ptr<FieldSpec>(
                                    new FieldSpec(FieldSpec::make(p, m)))).first;
    return *it->second;
}

/**
 * Convenience value type wrapping (code, field) with operator sugar.  The
 * library internals pass raw codes plus a FieldSpec for speed; this wrapper
 * is for demos, tests and call sites where clarity wins.
 */
class FieldElement {
public:
    FieldElement(const FieldSpec& spec, fq v) : spec_(&spec), v_(v % spec.q) {}

    fq value() const { return v_; }
    const FieldSpec& spec() const { return *spec_; }

    FieldElement operator+(const FieldElement& o) const { return with(spec_->add(v_, o.v_)); }
    FieldElement operator-(const FieldElement& o) const { return with(spec_->sub(v_, o.v_)); }
    FieldElement operator*(const FieldElement& o) const { return with(spec_->mul(v_, o.v_)); }
    FieldElement operator/(const FieldElement& o) const { return with(spec_->div(v_, o.v_)); }
    FieldElement operator-() const { return with(spec_->neg(v_)); }
    FieldElement pow(std::int64_t e) const { return with(spec_->pow(v_, e)); }
    FieldElement inverse() const { return with(spec_->inv(v_)); }
    std::uint32_t trace() const { return spec_->trace(v_); }

    bool operator==(const FieldElement& o) const {
        return v_ == o.v_ && *spec_ == *o.spec_;
    }
    bool operator!=(const FieldElement& o) const { return !(*this == o); }

private:
    FieldElement with(fq v) const { return FieldElement(*spec_, v); }
    const FieldSpec* spec_;
    fq v_;
};

/**
 * Embedding of GF(q) = GF(p^m) into GF(Q) = GF(p^{m*k}), with coordinate
 * maps in both directions.  `vec` writes a big-field element in the relative
 * basis {1, X, ..., X^{k-1}} (X the big field's polynomial generator);
 * `vec_dual` gives the trace-dual coordinates, so that
 *
 *   sum_j  vec(u)[j] * vec_dual(v)[j]  =  tr_rel(u * v)
 *
 * holds exactly -- the identity the symplectic unfolding machinery needs.
 */
class SubfieldBridge {
public:
    SubfieldBridge(const FieldSpec& sub, const FieldSpec& big)
        : sub_(&sub), big_(&big) {
        if (sub.p != big.p || big.m % sub.m != 0)
            throw std::invalid_argument("SubfieldBridge: not a subfield relation");
        k_ = big.m / sub.m;

        // A root of sub's modulus inside big.  The subfield of order q is
        // {0} together with the powers of g^((Q-1)/(q-1)); scan it.
        bool found = false;
        const std::int64_t step = (big.q - 1) / (sub.q - 1);
        const fq g_step = big.pow(big.primitive, step);
        fq cand = 1;
        for (std::uint32_t t = 0; t < sub.q - 1; ++t) {
            if (eval_sub_modulus(cand) == 0) { root_ = cand; found = true; break; }
            cand = big.mul(cand, g_step);
        }
        if (!found)
            throw std::logic_error("SubfieldBridge: modulus has no root in big field");

        build_coordinate_maps();
    }

    std::uint32_t degree() const { return k_; }
    const FieldSpec& sub() const { return *sub_; }
    const FieldSpec& big() const { return *big_; }

    /// F_q -> F_Q, a ring homomorphism fixing F_p.
    fq embed(fq a) const { return embed_tab_[a]; }

    /// Inverse of embed on its image; throws if A is outside the subfield.
    fq project(fq A) const {
        auto it = project_tab_.find(A);
        if (it == project_tab_.end())
            throw std::domain_error("SubfieldBridge::project: element not in subfield");
        return it->second;
    }

    /// Relative trace F_Q -> F_q (returned as a small-field code).
    fq tr_rel(fq A) const {
        fq s = 0, f = A;
        for (std::uint32_t i = 0; i < k_; ++i) {
            s = big_->add(s, f);
            f = big_->pow(f, sub_->q);
        }
        return project(s);
    }

    /// Coordinates of A in the relative basis {X^j}: A = sum embed(c_j) X^j.
    std::vector<fq> vec(fq A) const {
        auto c = detail::prime_solve(coord_mat_, big_->digits(A));
        std::vector<fq> out(k_);
        for (std::uint32_t j = 0; j < k_; ++j) {
            std::vector<std::uint32_t> d(c.begin() + j * sub_->m,
                                         c.begin() + (j + 1) * sub_->m);
            out[j] = sub_->from_digits(d);
        }
        return out;
    }

    fq unvec(const std::vector<fq>& c) const {
        if (c.size() != k_)
            throw std::invalid_argument("SubfieldBridge::unvec: bad length");
        fq A = 0;
        for (std::uint32_t j = 0; j < k_; ++j)
            A = big_->add(A, big_->mul(embed(c[j]), xpow_[j]));
        return A;
    }

    /// Trace-dual coordinates: vec_dual(v)[j] = tr_rel(v * X^j).
    std::vector<fq> vec_dual(fq A) const {
        std::vector<fq> out(k_);
        for (std::uint32_t j = 0; j < k_; ++j)
            out[j] = tr_rel(big_->mul(A, xpow_[j]));
        return out;
    }

    fq unvec_dual(const std::vector<fq>& d) const {
        if (d.size() != k_)
            throw std::invalid_argument("SubfieldBridge::unvec_dual: bad length");
        std::vector<std::uint32_t> rhs(big_->m);
        for (std::uint32_t j = 0; j < k_; ++j)
            for (std::uint32_t l = 0; l < sub_->m; ++l)
                rhs[j * sub_->m + l] = sub_->digit(d[j], l);
        auto v = detail::prime_solve(dual_mat_, rhs);
        return big_->from_digits(v);
    }

private:
    fq eval_sub_modulus(fq z) const {
        // sub's modulus has F_p coefficients, which embed as themselves.
        fq acc = 0, zp = 1;
        for (std::size_t i = 0; i < sub_->modulus.size(); ++i) {
            acc = big_->add(acc, big_->mul(sub_->modulus[i], zp));
            zp = big_->mul(zp, z);
        }
        return acc;
    }

    void build_coordinate_maps() {
        const std::uint32_t M = big_->m;
        xpow_.resize(k_);
        const fq X = big_->m >= 2 ? static_cast<fq>(big_->p) : 1u;
        xpow_[0] = 1;
        for (std::uint32_t j = 1; j < k_; ++j) xpow_[j] = big_->mul(xpow_[j - 1], X);

        embed_tab_.resize(sub_->q);
        for (fq a = 0; a < sub_->q; ++a) {
            fq A = 0, rp = 1;
            for (std::uint32_t l = 0; l < sub_->m; ++l) {
                A = big_->add(A, big_->mul(sub_->digit(a, l), rp));
                rp = big_->mul(rp, root_);
            }
            embed_tab_[a] = A;
            project_tab_[A] = a;
        }
        if (project_tab_.size() != sub_->q)
            throw std::logic_error("SubfieldBridge: embedding not injective");

        coord_mat_ = detail::PrimeMat(big_->p, M, M);
        for (std::uint32_t j = 0; j < k_; ++j)
            for (std::uint32_t l = 0; l < sub_->m; ++l) {
                const fq base = big_->mul(embed_tab_[sub_->poly_basis_elt(l)], xpow_[j]);
                for (std::uint32_t r = 0; r < M; ++r)
                    coord_mat_.at(r, j * sub_->m + l) = big_->digit(base, r);
            }

        dual_mat_ = detail::PrimeMat(big_->p, M, M);
        for (std::uint32_t col = 0; col < M; ++col) {
            std::vector<std::uint32_t> e(M, 0);
            e[col] = 1;
            const fq v = big_->from_digits(e);
            for (std::uint32_t j = 0; j < k_; ++j) {
                const fq t = tr_rel(big_->mul(v, xpow_[j]));
                for (std::uint32_t l = 0; l < sub_->m; ++l)
                    dual_mat_.at(j * sub_->m + l, col) = sub_->digit(t, l);
            }
        }
        // Both coordinate maps must be bijective; fail now rather than on use.
        (void)detail::prime_inverse(coord_mat_);
        (void)detail::prime_inverse(dual_mat_);
    }

    const FieldSpec* sub_;
    const FieldSpec* big_;
    std::uint32_t k_ = 1;
    fq root_ = 0;
    std::vector<fq> xpow_;
    std::vector<fq> embed_tab_;
    std::map<fq, fq> project_tab_;
    detail::PrimeMat coord_mat_, dual_mat_;
};

}  // namespace aqec
