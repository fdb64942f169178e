#pragma once

/**
 * @file classical.hpp
 * @brief Classical linear codes over GF(q): generalized Reed-Solomon
 *        construction and duality, symbol folding, unique/list decoding
 *        (exhaustive oracles plus algebraic decoders), coset codes, list
 *        recovery, and random nested code pairs.
 *
 * Block length is counted in alphabet symbols: a code with ext = e lives in
 * (F_q^e)^n and is F_q-linear, so the generator is a k_fq x (n*e) matrix of
 * base-field entries and k_fq is the dimension over F_q.  Folding a code
 * only re-blocks columns (ext *= m, n /= m); the matrices are untouched.
 * Storing the F_q dimension rather than the alphabet dimension keeps folded
 * codes with fractional alphabet dimension (e.g. a [7,4] code folded by 7)
 * representable without special cases.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "gf.hpp"
#include "linalg.hpp"

namespace aqec {

// ---------------------------------------------------------------------------
// core types
// ---------------------------------------------------------------------------

/// F_q-linear code in (F_q^ext)^n.
struct LinearCode {
    const FieldSpec* spec = nullptr;
    std::size_t n = 0;        ///< block length in alphabet symbols
    std::uint32_t ext = 1;    ///< alphabet = F_q^ext
    std::size_t k_fq = 0;     ///< dimension over F_q
    Mat generator;            ///< k_fq x (n*ext)
    Mat parity;               ///< (n*ext - k_fq) x (n*ext)

    std::size_t width() const { return n * ext; }
    double rate() const { return static_cast<double>(k_fq) / width(); }
};

/// Evaluation-code description: codewords (u_j * f(gamma^j))_{j<n} for
/// polynomials f of degree < k.  gamma must generate the unit group.
struct GRSSpec {
    const FieldSpec* spec = nullptr;
    std::size_t n = 0;
    std::size_t k = 0;
    fq gamma = 0;
    std::vector<fq> multipliers;  ///< u_j, all nonzero

    std::vector<fq> eval_points() const {
        std::vector<fq> pts(n);
        fq x = 1;
        for (std::size_t j = 0; j < n; ++j) {
            pts[j] = x;
            x = spec->mul(x, gamma);
        }
        return pts;
    }
};

/// A linear code viewed with its symbols bundled into groups of fold_m.
/// When the base code came from a GRS description, that description rides
/// along so algebraic decoders can use the evaluation structure.
struct FoldedCode {
    LinearCode code;
    std::optional<GRSSpec> grs;
    std::uint32_t fold_m = 1;
};

enum class DecodeMode { BruteForce, Algebraic };

// ---------------------------------------------------------------------------
// construction and validation
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_linear_code(const LinearCode& c) {
    if (!c.spec) throw std::invalid_argument("LinearCode: missing field");
    if (c.generator.rows != c.k_fq || c.generator.cols != c.width())
        throw std::invalid_argument("LinearCode: generator shape mismatch");
    if (c.parity.rows != c.width() - c.k_fq || c.parity.cols != c.width())
        throw std::invalid_argument("LinearCode: parity shape mismatch");
    if (mat_rank(c.generator) != c.k_fq)
        throw std::invalid_argument("LinearCode: generator rows are dependent");
    if (mat_rank(c.parity) != c.width() - c.k_fq)
        throw std::invalid_argument("LinearCode: parity rows are dependent");
    // orthogonality G H^T = 0, checked entry by entry
    const Mat prod = mat_mul(c.generator, mat_transpose(c.parity));
    for (fq v : prod.a)
        if (v != 0) throw std::invalid_argument("LinearCode: parity does not annihilate generator");
}

// polynomial helpers over a general FieldSpec (coefficients low-first)

inline fq poly_eval(const FieldSpec& f, const std::vector<fq>& c, fq x) {
    fq acc = 0;
    for (std::size_t i = c.size(); i-- > 0;) acc = f.add(f.mul(acc, x), c[i]);
    return acc;
}

inline void poly_trim_fq(std::vector<fq>& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

/// Quotient and remainder of a / b over F_q; b nonzero.
inline std::pair<std::vector<fq>, std::vector<fq>> poly_divmod(
    const FieldSpec& f, std::vector<fq> a, std::vector<fq> b) {
    poly_trim_fq(a);
    poly_trim_fq(b);
    if (b.empty()) throw std::domain_error("poly_divmod: division by zero polynomial");
    if (a.size() < b.size()) return {{}, std::move(a)};
    std::vector<fq> qout(a.size() - b.size() + 1, 0);
    const fq lead_inv = f.inv(b.back());
    while (a.size() >= b.size() && !a.empty()) {
        const fq coef = f.mul(a.back(), lead_inv);
        const std::size_t shift = a.size() - b.size();
        qout[shift] = coef;
        for (std::size_t i = 0; i < b.size(); ++i)
            a[shift + i] = f.sub(a[shift + i], f.mul(coef, b[i]));
        poly_trim_fq(a);
        if (a.size() < b.size()) break;
    }
    return {std::move(qout), std::move(a)};
}

}  // namespace detail

/// Assemble a code from a generator matrix; the parity matrix is derived as
/// the kernel unless supplied.  All invariants are re-checked.
inline LinearCode make_linear_code(const FieldSpec& spec, std::size_t n,
                                   std::uint32_t ext, Mat generator,
                                   std::optional<Mat> parity = std::nullopt) {
    LinearCode c;
    c.spec = &spec;
    c.n = n;
    c.ext = ext;
    c.k_fq = generator.rows;
    c.generator = std::move(generator);
    c.parity = parity ? std::move(*parity) : mat_nullspace(c.generator);
    detail::validate_linear_code(c);
    return c;
}

/// Assemble a code from its parity-check matrix.
inline LinearCode make_linear_code_from_parity(const FieldSpec& spec, std::size_t n,
                                               std::uint32_t ext, Mat parity) {
    Mat gen = mat_nullspace(parity);
    LinearCode c;
    c.spec = &spec;
    c.n = n;
    c.ext = ext;
    c.k_fq = gen.rows;
    c.generator = std::move(gen);
    c.parity = std::move(parity);
    detail::validate_linear_code(c);
    return c;
}

inline GRSSpec make_grs_spec(const FieldSpec& spec, std::size_t n, std::size_t k,
                             fq gamma, std::vector<fq> multipliers = {}) {
    if (!(k < n && n < spec.q))
        throw std::invalid_argument("GRSSpec: need k < n < q");
    if (multipliers.empty()) multipliers.assign(n, 1);
    if (multipliers.size() != n)
        throw std::invalid_argument("GRSSpec: multiplier count != n");
    for (fq u : multipliers)
        if (u == 0) throw std::invalid_argument("GRSSpec: zero multiplier");
    // gamma must have large enough order that the evaluation points are distinct
    GRSSpec g{&spec, n, k, gamma, std::move(multipliers)};
    if (spec.pow(gamma, static_cast<std::int64_t>(spec.q) - 1) != 1 || gamma == 0)
        throw std::invalid_argument("GRSSpec: gamma not a unit");
    std::vector<fq> pts = g.eval_points();
    std::vector<fq> sorted = pts;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("GRSSpec: evaluation points collide (gamma not primitive enough)");
    return g;
}

/// Dual multipliers: v_i = (u_i * prod_{j != i} (alpha_i - alpha_j))^{-1}.
inline GRSSpec grs_dual(const GRSSpec& g) {
    const FieldSpec& f = *g.spec;
    const auto pts = g.eval_points();
    std::vector<fq> v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        fq prod = g.multipliers[i];
        for (std::size_t j = 0; j < g.n; ++j) {
            if (j == i) continue;
            prod = f.mul(prod, f.sub(pts[i], pts[j]));
        }
        v[i] = f.inv(prod);
    }
    GRSSpec d{g.spec, g.n, g.n - g.k, g.gamma, std::move(v)};
    return d;
}

/// Generator rows (u_j alpha_j^i)_{i<k}; parity rows are the dual code's
/// generator, so orthogonality is validated structurally.
inline LinearCode grs_build(const GRSSpec& g) {
    const FieldSpec& f = *g.spec;
    const auto pts = g.eval_points();
    auto vander = [&](const GRSSpec& s, std::size_t rows) {
        Mat m(f, rows, s.n);
        for (std::size_t j = 0; j < s.n; ++j) {
            fq acc = s.multipliers[j];
            for (std::size_t i = 0; i < rows; ++i) {
                m.at(i, j) = acc;
                acc = f.mul(acc, pts[j]);
            }
        }
        return m;
    };
    Mat gen = vander(g, g.k);
    GRSSpec d = grs_dual(g);
    Mat par = vander(d, d.k);
    return make_linear_code(f, g.n, 1, std::move(gen), std::move(par));
}

/// Re-block symbols into bundles of m; matrices are shared unchanged.
inline FoldedCode fold(const LinearCode& base, std::uint32_t m,
                       std::optional<GRSSpec> grs = std::nullopt) {
    if (m == 0 || base.n % m != 0)
        throw std::invalid_argument("fold: bundle size must divide the length");
    FoldedCode fc;
    fc.code = base;
    fc.code.n = base.n / m;
    fc.code.ext = base.ext * m;
    fc.grs = std::move(grs);
    fc.fold_m = m;
    return fc;
}

/// Convenience wrapper for a code taken as-is (fold factor 1).
inline FoldedCode unfolded(const LinearCode& base,
                           std::optional<GRSSpec> grs = std::nullopt) {
    return fold(base, 1, std::move(grs));
}

/// Bundle an already-folded view further; fold_m tracks the total bundle
/// size relative to the original (e.g. GRS) base code.
inline FoldedCode refold(const FoldedCode& fc, std::uint32_t extra_m) {
    FoldedCode out = fold(fc.code, extra_m, fc.grs);
    out.fold_m = fc.fold_m * extra_m;
    return out;
}

// ---------------------------------------------------------------------------
// weights, membership, brute-force distance
// ---------------------------------------------------------------------------

inline std::size_t blocked_weight(const std::vector<fq>& word, std::uint32_t ext) {
    std::size_t w = 0;
    for (std::size_t b = 0; b * ext < word.size(); ++b) {
        for (std::uint32_t i = 0; i < ext; ++i)
            if (word[b * ext + i] != 0) { ++w; break; }
    }
    return w;
}

inline std::size_t blocked_distance(const std::vector<fq>& u, const std::vector<fq>& v,
                                    std::uint32_t ext) {
    if (u.size() != v.size()) throw std::invalid_argument("blocked_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t b = 0; b * ext < u.size(); ++b) {
        for (std::uint32_t i = 0; i < ext; ++i)
            if (u[b * ext + i] != v[b * ext + i]) { ++d; break; }
    }
    return d;
}

inline std::vector<fq> encode(const LinearCode& c, const std::vector<fq>& msg) {
    return row_times_mat(msg, c.generator);
}

inline bool contains(const LinearCode& c, const std::vector<fq>& word) {
    return vec_is_zero(mat_apply(c.parity, word));
}

/// Minimum blocked weight over all nonzero codewords, by full enumeration.
/// Cost q^k_fq; callers are responsible for keeping that sane.
inline std::size_t distance_bruteforce(const LinearCode& c) {
    if (c.k_fq == 0)
        throw std::domain_error("distance_bruteforce: code has no nonzero codewords");
    std::size_t best = c.n + 1;
    for_each_in_rowspace(c.generator, [&](const std::vector<fq>& w) {
        if (vec_is_zero(w)) return;
        best = std::min(best, blocked_weight(w, c.ext));
    });
    return best;
}

// ---------------------------------------------------------------------------
// unique decoding
// ---------------------------------------------------------------------------

struct UniqueDecodeResult {
    std::optional<std::vector<fq>> codeword;  ///< nearest codeword if within radius
    bool ambiguous = false;                   ///< another codeword ties at the same distance
};

namespace detail {

inline UniqueDecodeResult unique_decode_bruteforce(const LinearCode& c,
                                                   const std::vector<fq>& received,
                                                   std::size_t radius) {
    UniqueDecodeResult res;
    std::size_t best = radius + 1;
    for_each_in_rowspace(c.generator, [&](const std::vector<fq>& w) {
        const std::size_t d = blocked_distance(w, received, c.ext);
        if (d < best) {
            best = d;
            res.codeword = w;
            res.ambiguous = false;
        } else if (d == best && best <= radius && res.codeword && w != *res.codeword) {
            res.ambiguous = true;
        }
    });
    return res;
}

/// Berlekamp-Welch: find f of degree < k agreeing with the normalized
/// received word except in at most `radius` places.
inline UniqueDecodeResult grs_unique_decode(const GRSSpec& g,
                                            const std::vector<fq>& received,
                                            std::size_t radius) {
    const FieldSpec& f = *g.spec;
    const std::size_t n = g.n, k = g.k, e = radius;
    if (k + 2 * e > n)
        throw std::invalid_argument("grs_unique_decode: radius beyond (n-k)/2");
    const auto pts = g.eval_points();
    std::vector<fq> rp(n);
    for (std::size_t j = 0; j < n; ++j) rp[j] = f.div(received[j], g.multipliers[j]);

    // N(alpha_j) = r'_j E(alpha_j), E monic of degree e, deg N < k + e.
    // Unknowns: N_0..N_{k+e-1}, E_0..E_{e-1}; RHS carries the monic term.
    const std::size_t nN = k + e;
    Mat A(f, n, nN + e);
    std::vector<fq> rhs(n);
    for (std::size_t j = 0; j < n; ++j) {
        fq xp = 1;
        for (std::size_t i = 0; i < nN; ++i) {
            A.at(j, i) = xp;
            xp = f.mul(xp, pts[j]);
        }
        xp = 1;
        for (std::size_t i = 0; i < e; ++i) {
            A.at(j, nN + i) = f.neg(f.mul(rp[j], xp));
            xp = f.mul(xp, pts[j]);
        }
        rhs[j] = f.mul(rp[j], f.pow(pts[j], static_cast<std::int64_t>(e)));
    }
    auto sol = mat_solve(A, rhs);
    UniqueDecodeResult res;
    if (!sol) return res;
    std::vector<fq> N(sol->begin(), sol->begin() + nN);
    std::vector<fq> E(sol->begin() + nN, sol->end());
    E.push_back(1);  // monic
    auto [quot, rem] = detail::poly_divmod(f, N, E);
    if (!rem.empty()) return res;
    if (quot.size() > k) return res;
    std::vector<fq> cw(n);
    for (std::size_t j = 0; j < n; ++j)
        cw[j] = f.mul(g.multipliers[j], detail::poly_eval(f, quot, pts[j]));
    if (blocked_distance(cw, received, 1) > radius) return res;
    res.codeword = std::move(cw);
    return res;
}

}  // namespace detail

/// Nearest-codeword decoding within a blocked-Hamming radius.  The algebraic
/// mode requires the GRS structure and an unfolded view; the exhaustive mode
/// works for every code this library can enumerate.
inline UniqueDecodeResult unique_decode(const FoldedCode& fc,
                                        const std::vector<fq>& received,
                                        std::size_t radius, DecodeMode mode) {
    if (received.size() != fc.code.width())
        throw std::invalid_argument("unique_decode: received length mismatch");
    if (mode == DecodeMode::BruteForce)
        return detail::unique_decode_bruteforce(fc.code, received, radius);
    if (!fc.grs || fc.fold_m != 1)
        throw std::invalid_argument("unique_decode: algebraic mode needs an unfolded GRS code");
    return detail::grs_unique_decode(*fc.grs, received, radius);
}

// ---------------------------------------------------------------------------
// list decoding and list recovery
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::vector<fq>> list_decode_bruteforce(const LinearCode& c,
                                                           const std::vector<fq>& received,
                                                           std::size_t radius) {
    std::vector<std::vector<fq>> out;
    for_each_in_rowspace(c.generator, [&](const std::vector<fq>& w) {
        if (blocked_distance(w, received, c.ext) <= radius) out.push_back(w);
    });
    std::sort(out.begin(), out.end());
    return out;
}

/// Core of the linear-algebraic folded-RS decoder.  `targets[i]` lists the
/// candidate bundles (normalized by the multipliers) for folded position i;
/// returns all degree-<k polynomials consistent with one interpolation
/// polynomial, as coefficient vectors.  The caller filters by agreement.
inline std::vector<std::vector<fq>> frs_solve(const GRSSpec& g, std::uint32_t m,
                                              std::uint32_t s,
                                              const std::vector<std::vector<std::vector<fq>>>& targets,
                                              std::size_t enumeration_cap) {
    const FieldSpec& f = *g.spec;
    const std::size_t K = g.k;
    const std::size_t nf = g.n / m;
    if (s < 1 || s > m) throw std::invalid_argument("frs_solve: need 1 <= s <= m");

    std::size_t constraints = 0;
    for (const auto& t : targets) constraints += t.size() * (m - s + 1);
    if (constraints < K)
        throw std::invalid_argument("frs_solve: too few constraints for the degree");
    // D(s+1) + K > #constraints guarantees a nonzero interpolation solution.
    const std::size_t D = (constraints - K) / (s + 1) + 1;

    const auto pts = g.eval_points();
    Mat A(f, constraints, D * s + (D + K));
    std::size_t row = 0;
    for (std::size_t i = 0; i < nf; ++i) {
        for (const auto& z : targets[i]) {
            if (z.size() != m) throw std::invalid_argument("frs_solve: bad bundle size");
            for (std::uint32_t j = 0; j + s <= m; ++j) {
                const fq x = pts[i * m + j];
                fq xp = 1;
                for (std::size_t r = 0; r < D + K; ++r) {
                    A.at(row, r) = xp;
                    xp = f.mul(xp, x);
                }
                for (std::uint32_t t = 1; t <= s; ++t) {
                    xp = 1;
                    const fq zt = z[j + t - 1];
                    for (std::size_t r = 0; r < D; ++r) {
                        A.at(row, (D + K) + (t - 1) * D + r) = f.mul(zt, xp);
                        xp = f.mul(xp, x);
                    }
                }
                ++row;
            }
        }
    }
    Mat null = mat_nullspace(A);
    if (null.rows == 0)
        throw std::logic_error("frs_solve: interpolation space unexpectedly empty");
    const auto Q = null.row(0);
    std::vector<fq> A0(Q.begin(), Q.begin() + (D + K));
    std::vector<std::vector<fq>> Ai(s);
    for (std::uint32_t t = 1; t <= s; ++t)
        Ai[t - 1].assign(Q.begin() + (D + K) + (t - 1) * D,
                         Q.begin() + (D + K) + t * D);

    // Functional equation A_0(x) + sum_t A_t(x) f(gamma^{t-1} x) = 0:
    // row per power of x, unknowns f_0..f_{K-1}.
    Mat M(f, D + K, K);
    std::vector<fq> rhs(D + K);
    for (std::size_t r = 0; r < D + K; ++r) rhs[r] = f.neg(A0[r]);
    for (std::uint32_t t = 1; t <= s; ++t) {
        for (std::size_t a = 0; a < D; ++a) {
            const fq c = Ai[t - 1][a];
            if (c == 0) continue;
            for (std::size_t b = 0; b < K && a + b < D + K; ++b) {
                const fq gb = f.pow(g.gamma, static_cast<std::int64_t>(b) * (t - 1));
                M.at(a + b, b) = f.add(M.at(a + b, b), f.mul(c, gb));
            }
        }
    }
    auto part = mat_solve(M, rhs);
    std::vector<std::vector<fq>> polys;
    if (!part) return polys;  // no consistent message polynomial at all
    Mat ker = mat_nullspace(M);
    // candidate space is part + span(ker); enumerate within budget
    std::size_t count = 1;
    for (std::size_t i = 0; i < ker.rows; ++i) {
        count *= f.q;
        if (count > enumeration_cap)
            throw std::runtime_error("frs_solve: candidate space exceeds enumeration cap");
    }
    for_each_in_rowspace(ker, [&](const std::vector<fq>& kv) {
        polys.push_back(vec_add(f, *part, kv));
    });
    return polys;
}

inline std::vector<fq> grs_encode_poly(const GRSSpec& g, const std::vector<fq>& poly) {
    const FieldSpec& f = *g.spec;
    const auto pts = g.eval_points();
    std::vector<fq> cw(g.n);
    for (std::size_t j = 0; j < g.n; ++j)
        cw[j] = f.mul(g.multipliers[j], detail::poly_eval(f, poly, pts[j]));
    return cw;
}

}  // namespace detail

/// All codewords within blocked radius floor(tau * n) of the received word.
/// Algebraic mode runs the linear-algebraic folded-RS decoder with the given
/// interpolation order s (s = 0 picks the smallest s whose agreement
/// guarantee covers the radius).
inline std::vector<std::vector<fq>> list_decode(const FoldedCode& fc,
                                                const std::vector<fq>& received,
                                                double tau, DecodeMode mode,
                                                std::uint32_t s = 0,
                                                std::size_t enumeration_cap = 1u << 20) {
    if (received.size() != fc.code.width())
        throw std::invalid_argument("list_decode: received length mismatch");
    // floor(tau*n), guarded against floating-point representation of rationals
    const std::size_t radius =
        static_cast<std::size_t>(tau * static_cast<double>(fc.code.n) + 1e-9);
    if (mode == DecodeMode::BruteForce)
        return detail::list_decode_bruteforce(fc.code, received, radius);

    if (!fc.grs) throw std::invalid_argument("list_decode: algebraic mode needs GRS structure");
    const GRSSpec& g = *fc.grs;
    const FieldSpec& f = *g.spec;
    const std::uint32_t m = fc.fold_m;
    const std::size_t nf = fc.code.n, K = g.k;

    auto agreement_needed = [&](std::uint32_t ss) -> std::size_t {
        const std::size_t constraints = nf * (m - ss + 1);
        if (constraints < K) return nf + 1;  // unusable
        const std::size_t D = (constraints - K) / (ss + 1) + 1;
        // t (m-s+1) >= D + K  <=>  every agreeing position forces the
        // functional equation to vanish identically
        return (D + K + (m - ss + 1) - 1) / (m - ss + 1);
    };
    std::uint32_t use_s = s;
    if (use_s == 0) {
        for (std::uint32_t ss = 1; ss <= m; ++ss)
            if (agreement_needed(ss) <= nf - radius) { use_s = ss; break; }
        if (use_s == 0)
            throw std::invalid_argument("list_decode: no interpolation order covers this radius");
    }

    // normalize the received word by the multipliers
    std::vector<std::vector<std::vector<fq>>> targets(nf);
    for (std::size_t i = 0; i < nf; ++i) {
        std::vector<fq> z(m);
        for (std::uint32_t j = 0; j < m; ++j)
            z[j] = f.div(received[i * m + j], g.multipliers[i * m + j]);
        targets[i] = {std::move(z)};
    }
    auto polys = detail::frs_solve(g, m, use_s, targets, enumeration_cap);
    std::vector<std::vector<fq>> out;
    for (const auto& poly : polys) {
        auto cw = detail::grs_encode_poly(g, poly);
        if (blocked_distance(cw, received, fc.code.ext) <= radius) out.push_back(cw);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// All codewords whose bundle lands in sets[i] for at least ceil(eta * n)
/// folded positions i.  Each sets[i] holds at most `ell` bundles of fold_m
/// alphabet symbols.
inline std::vector<std::vector<fq>> list_recover(const FoldedCode& fc,
                                                 const std::vector<std::vector<std::vector<fq>>>& sets,
                                                 double eta, std::size_t ell,
                                                 DecodeMode mode, std::uint32_t s = 1,
                                                 std::size_t enumeration_cap = 1u << 20) {
    const std::size_t nf = fc.code.n;
    if (sets.size() != nf) throw std::invalid_argument("list_recover: need one set per position");
    for (const auto& S : sets)
        if (S.size() > ell) throw std::invalid_argument("list_recover: set exceeds ell");
    const std::size_t need = static_cast<std::size_t>(
        std::max<double>(0.0, std::ceil(eta * static_cast<double>(nf) - 1e-9)));

    auto agreements = [&](const std::vector<fq>& w) {
        std::size_t t = 0;
        const std::uint32_t ext = fc.code.ext;
        for (std::size_t i = 0; i < nf; ++i) {
            std::vector<fq> bundle(w.begin() + i * ext, w.begin() + (i + 1) * ext);
            for (const auto& cand : sets[i])
                if (cand == bundle) { ++t; break; }
        }
        return t;
    };

    if (mode == DecodeMode::BruteForce) {
        std::vector<std::vector<fq>> out;
        for_each_in_rowspace(fc.code.generator, [&](const std::vector<fq>& w) {
            if (agreements(w) >= need) out.push_back(w);
        });
        std::sort(out.begin(), out.end());
        return out;
    }

    if (!fc.grs) throw std::invalid_argument("list_recover: algebraic mode needs GRS structure");
    const GRSSpec& g = *fc.grs;
    const FieldSpec& f = *g.spec;
    const std::uint32_t m = fc.fold_m;
    std::vector<std::vector<std::vector<fq>>> targets(nf);
    for (std::size_t i = 0; i < nf; ++i)
        for (const auto& cand : sets[i]) {
            std::vector<fq> z(m);
            for (std::uint32_t j = 0; j < m; ++j)
                z[j] = f.div(cand[j], g.multipliers[i * m + j]);
            targets[i].push_back(std::move(z));
        }
    auto polys = detail::frs_solve(g, m, s, targets, enumeration_cap);
    std::vector<std::vector<fq>> out;
    for (const auto& poly : polys) {
        auto cw = detail::grs_encode_poly(g, poly);
        if (agreements(cw) >= need) out.push_back(cw);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// coset codes
// ---------------------------------------------------------------------------

/// Quotient view C / C' for a subcode C' of C; canonical representatives
/// are obtained by eliminating the subcode's pivot positions.  The ambient
/// code is kept as a FoldedCode so that algebraic list decoding stays
/// available when C is a (folded) GRS code.
struct CosetCode {
    FoldedCode code;  ///< the ambient code C, with any decoder structure
    LinearCode sub;   ///< the subcode C'
    RREF sub_rref;    ///< cached elimination data for canonicalization
};

inline CosetCode make_coset_code(FoldedCode code, LinearCode sub) {
    if (code.code.spec != sub.spec || code.code.n != sub.n ||
        code.code.ext != sub.ext)
        throw std::invalid_argument("make_coset_code: mismatched codes");
    if (!rowspace_contained(sub.generator, code.code.generator))
        throw std::invalid_argument("make_coset_code: not a subcode");
    CosetCode cc;
    cc.sub_rref = make_rref(sub.generator);
    cc.code = std::move(code);
    cc.sub = std::move(sub);
    return cc;
}

inline CosetCode make_coset_code(LinearCode code, LinearCode sub) {
    return make_coset_code(unfolded(std::move(code)), std::move(sub));
}

/// Canonical representative of word + C'.
inline std::vector<fq> coset_rep(const CosetCode& cc, const std::vector<fq>& word) {
    return rref_reduce(cc.sub_rref, word);
}

/// Representatives of every coset of C' in C that meets the blocked-Hamming
/// ball of radius floor(tau*n) around `received`.  Deduplicated, sorted.
/// When `raw_codewords` is given it receives the number of ball codewords
/// found before collapsing them into cosets.
inline std::vector<std::vector<fq>> coset_list_decode(const CosetCode& cc,
                                                      const std::vector<fq>& received,
                                                      double tau, DecodeMode mode,
                                                      std::uint32_t s = 0,
                                                      std::size_t* raw_codewords = nullptr) {
    std::vector<std::vector<fq>> raw;
    if (mode == DecodeMode::BruteForce) {
        const std::size_t radius = static_cast<std::size_t>(
            tau * static_cast<double>(cc.code.code.n) + 1e-9);
        for_each_in_rowspace(cc.code.code.generator, [&](const std::vector<fq>& w) {
            if (blocked_distance(w, received, cc.code.code.ext) <= radius)
                raw.push_back(coset_rep(cc, w));
        });
    } else {
        for (auto& w : list_decode(cc.code, received, tau, mode, s))
            raw.push_back(coset_rep(cc, w));
    }
    if (raw_codewords) *raw_codewords = raw.size();
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
    return raw;
}

// ---------------------------------------------------------------------------
// random nested pairs
// ---------------------------------------------------------------------------

/// Sample C1 = span(v_1..v_k1) from independent uniform vectors and let C2 be
/// the code whose parity rows are v_1..v_{n-k1}: then C2-perp = span of those
/// rows sits inside C1, and both codes have dimension k1.
inline std::pair<LinearCode, LinearCode> sample_nested_pair(const FieldSpec& spec,
                                                            std::size_t n, std::size_t k1,
                                                            std::size_t k2,
                                                            std::mt19937_64& rng) {
    if (k1 == 0 || k1 > n) throw std::invalid_argument("sample_nested_pair: bad k1");
    if (k1 + k2 != n || k1 < k2)
        throw std::invalid_argument("sample_nested_pair: need k1 + k2 = n with k1 >= k2");
    std::uniform_int_distribution<fq> dist(0, spec.q - 1);
    Mat rowsm(spec, k1, n);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        for (auto& v : rowsm.a) v = dist(rng);
        if (mat_rank(rowsm) == k1) {
            LinearCode c1 = make_linear_code(spec, n, 1, rowsm);
            Mat par(spec, k2, n);
            for (std::size_t r = 0; r < k2; ++r) par.set_row(r, rowsm.row(r));
            LinearCode c2 = make_linear_code_from_parity(spec, n, 1, std::move(par));
            return {std::move(c1), std::move(c2)};
        }
    }
    throw std::runtime_error("sample_nested_pair: could not draw independent vectors");
}

}  // namespace aqec
