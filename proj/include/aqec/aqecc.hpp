#pragma once

/**
 * @file aqecc.hpp
 * @brief Authenticated quantum error correction: keyed stabilizer families,
 *        private decoders, robust secret-shared keys, and the composed and
 *        direct authenticated codes built from them.
 *
 * The pieces fit together as follows.
 *
 *  - A PTCFamily is a keyed collection of small stabilizer groups on kappa
 *    qudits.  Its defining figure of merit is eps: for every fixed
 *    nonidentity Pauli E, the fraction of keys whose group detects-or-owns E
 *    incorrectly (E normalizes the group without belonging to it) is at most
 *    eps.  Keys with that property make syndrome bits act as authentication
 *    tags: an adversary who does not know the key cannot aim a logical
 *    operator at the kernel of the checks except with probability eps.
 *
 *  - PrivateAQECC couples a CSS code with a PTCFamily installed on its
 *    logical qudits.  Decoding first lists every error class within the
 *    decoding radius that matches the measured CSS syndrome, then keeps the
 *    classes whose key-dependent syndrome matches as well, and returns the
 *    canonically smallest survivor.  With list size L and family quality
 *    eps, a fixed adversary beats the decoder with probability at most
 *    2*L*eps over the key draw.
 *
 *  - RSSScheme is a robust secret-sharing layer (threshold polynomials plus
 *    pairwise authentication tags) used to store the key itself among the
 *    same parties that hold the code blocks, so that corrupting a few
 *    blocks corrupts neither the quantum state nor the key.
 *
 *  - AQECC composes the two layers; build_direct_aqecc instead builds the
 *    one-shot construction, where an inner private code is concatenated
 *    with an outer CSS code through a spreading permutation and the outer
 *    code repairs the blocks whose private decode failed.
 *
 * Everything here is exact F_q linear algebra; no floating point enters any
 * decoding decision.  Doubles appear only in rates, bounds, and planning.
 */

#include "aqec/ael.hpp"
#include "aqec/entropy.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>

namespace aqec {

// ---------------------------------------------------------------------------
// F_q-valued symplectic form
// ---------------------------------------------------------------------------

/// <x_a, z_b> - <x_b, z_a> over F_q.  commutation_phase() is the trace of
/// this; the untraced value is what key-dependent syndromes are made of.
inline fq symplectic_form(const FieldSpec& f, const PauliFrame& a, const PauliFrame& b) {
    detail::check_same_shape(a, b, "symplectic_form");
    return f.sub(vec_dot(f, a.x_part, b.z_part), vec_dot(f, b.x_part, a.z_part));
}

// ---------------------------------------------------------------------------
// keyed stabilizer families
// ---------------------------------------------------------------------------

enum class PTCMode {
    ExplicitPolynomial,  ///< algebraic keys; eps certified by a degree count
    VerifiedRandom       ///< random keys; eps established by measurement
};

/**
 * @brief Keyed family of isotropic F_q row sets on `n` qudits.
 *
 * Key k carries `lambda` pairwise-commuting, F_q-independent Pauli rows;
 * their F_q span (q^lambda frames) is the stabilizer group of key k modulo
 * phases, and the full group on the prime level is generated by the
 * lambda*m polynomial-basis multiples of the rows (see code()).
 *
 * `eps` is stored as an exact fraction eps_num/eps_den.  When
 * eps_exhaustive is true it is the measured maximum over all nonidentity
 * Paulis of the key fraction that confuses that Pauli; otherwise it is a
 * certified upper bound (the root count of the membership polynomial).
 */
struct PTCFamily {
    const FieldSpec* spec = nullptr;
    std::size_t n = 0;           ///< qudits per keyed code
    std::uint32_t lambda = 0;    ///< F_q rows per key
    PTCMode mode = PTCMode::ExplicitPolynomial;

    std::vector<std::vector<PauliFrame>> rows;  ///< [key][0..lambda)
    std::vector<RREF> row_spans;                ///< per key: RREF of (x|z) rows

    std::size_t eps_num = 1, eps_den = 1;
    bool eps_exhaustive = false;

    std::size_t key_count() const { return rows.size(); }
    double eps() const {
        return static_cast<double>(eps_num) / static_cast<double>(eps_den);
    }
    /// The generic guarantee this family's parameters promise: 2n/(lambda q^lambda).
    double analytic_target() const {
        double d = static_cast<double>(lambda);
        for (std::uint32_t i = 0; i < lambda; ++i) d *= spec->q;
        return std::min(1.0, 2.0 * static_cast<double>(n) / d);
    }

    /// Stabilizer code of one key, assembled on demand; the factory
    /// re-validates commutation and independence of the lambda*m generators.
    StabilizerCode code(std::size_t key) const {
        std::vector<PauliFrame> gens;
        gens.reserve(rows[key].size() * spec->m);
        for (const auto& r : rows[key])
            for (std::uint32_t l = 0; l < spec->m; ++l)
                gens.push_back(pauli_scale(spec->poly_basis_elt(l), r));
        return make_stabilizer_code(*spec, n, 1, std::move(gens));
    }

    /// N(Q_k) membership modulo phases: E commutes (untraced form) with all rows.
    bool in_normalizer(std::size_t key, const PauliFrame& e) const {
        for (const auto& r : rows[key])
            if (symplectic_form(*spec, e, r) != 0) return false;
        return true;
    }
    /// S(Q_k) membership modulo phases: (x|z) lies in the F_q row span.
    bool in_group(std::size_t key, const PauliFrame& e) const {
        std::vector<fq> cat = e.x_part;
        cat.insert(cat.end(), e.z_part.begin(), e.z_part.end());
        return rref_contains(row_spans[key], cat);
    }
};

namespace detail {

inline RREF span_of_rows(const FieldSpec& f, const std::vector<PauliFrame>& rows) {
    std::vector<std::vector<fq>> cat;
    for (const auto& r : rows) {
        std::vector<fq> v = r.x_part;
        v.insert(v.end(), r.z_part.begin(), r.z_part.end());
        cat.push_back(std::move(v));
    }
    return make_rref(Mat::from_rows(f, cat));
}

/// Validity of one key's rows: pairwise zero form and F_q independence.
inline void validate_ptc_rows(const FieldSpec& f, const std::vector<PauliFrame>& rows,
                              const RREF& span) {
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i; j < rows.size(); ++j)
            if (symplectic_form(f, rows[i], rows[j]) != 0)
                throw std::logic_error("PTCFamily: key rows do not commute over F_q");
    if (span.rank != rows.size())
        throw std::logic_error("PTCFamily: key rows are F_q-dependent");
}

}  // namespace detail

/**
 * @brief Exhaustively measured eps of a family: the maximum over all
 * q^{2n}-1 nonidentity Paulis E of the fraction of keys k with E in
 * N(Q_k) \ S(Q_k).  Exact by construction; refuses (throws) when the
 * enumeration would exceed `work_cap` membership tests.
 */
inline std::pair<std::size_t, std::size_t> ptc_measure_eps(const PTCFamily& fam,
                                                           double work_cap = 5e8) {
    const FieldSpec& f = *fam.spec;
    double words = 1;
    for (std::size_t i = 0; i < 2 * fam.n; ++i) words *= f.q;
    const double work = words * static_cast<double>(fam.key_count());
    if (work > work_cap)
        throw std::runtime_error("ptc_measure_eps: about " + std::to_string(work) +
                                 " membership tests needed, over the cap of " +
                                 std::to_string(work_cap));

    std::size_t worst = 0;
    std::vector<fq> ex(fam.n, 0), ez(fam.n, 0);
    PauliFrame e = make_pauli(f, ex, ez, 0, 1);
    for (;;) {
        std::size_t i = 0;
        for (; i < 2 * fam.n; ++i) {
            std::vector<fq>& v = i < fam.n ? e.x_part : e.z_part;
            const std::size_t j = i < fam.n ? i : i - fam.n;
            if (++v[j] != f.q) break;
            v[j] = 0;
        }
        if (i == 2 * fam.n) break;  // wrapped to identity: done
        std::size_t bad = 0;
        for (std::size_t k = 0; k < fam.key_count(); ++k)
            if (fam.in_normalizer(k, e) && !fam.in_group(k, e)) ++bad;
        worst = std::max(worst, bad);
    }
    return {worst, fam.key_count()};
}

namespace detail {

/// Key generator over the extension field: alpha_i = K^{2i+1},
/// beta_i = -K^{2i}, with the convention 0^0 = 1 (so key 0 is a pure-Z row
/// pattern and never degenerates).
inline void ptc_key_generator(const FieldSpec& big, fq key, std::size_t nprime,
                              std::vector<fq>& alpha, std::vector<fq>& beta) {
    alpha.assign(nprime, 0);
    beta.assign(nprime, 0);
    fq even = 1;  // K^{2i}
    const fq ksq = big.mul(key, key);
    for (std::size_t i = 0; i < nprime; ++i) {
        alpha[i] = big.mul(even, key);
        beta[i] = big.neg(even);
        even = big.mul(even, ksq);
    }
}

/// Big-field Pauli -> base-field Pauli: X symbols through the relative
/// basis, Z symbols through its trace dual.  This choice turns the
/// base-field symplectic form into the relative trace of the big-field one,
/// so isotropic big-field lines unfold to commuting base-field rows.
inline PauliFrame ptc_unfold(const SubfieldBridge& br, const std::vector<fq>& alpha,
                             const std::vector<fq>& beta) {
    std::vector<fq> x, z;
    x.reserve(alpha.size() * br.degree());
    z.reserve(alpha.size() * br.degree());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const auto xa = br.vec(alpha[i]);
        const auto zb = br.vec_dual(beta[i]);
        x.insert(x.end(), xa.begin(), xa.end());
        z.insert(z.end(), zb.begin(), zb.end());
    }
    return make_pauli(br.sub(), std::move(x), std::move(z), 0, 1);
}

}  // namespace detail

/**
 * @brief Algebraic keyed family on n qudits with q^lambda keys.
 *
 * The n qudits are grouped into n' = n/lambda symbols over F_{q^lambda};
 * key K contributes the big-field row (K^{2i+1}, -K^{2i})_i, whose lambda
 * basis multiples unfold to the key's F_q rows.  A Pauli E normalizes key
 * K's group exactly when K is a root of a fixed nonzero polynomial of
 * degree <= 2n'-1 determined by E, so eps <= (2n'-1)/q^lambda, strictly
 * inside the generic 2n/(lambda q^lambda) target.
 *
 * eps is measured exhaustively when that fits in `work_cap`; otherwise the
 * degree bound is stored with eps_exhaustive = false.
 */
inline PTCFamily build_ptc_explicit(const FieldSpec& spec, std::size_t n,
                                    std::uint32_t lambda, double work_cap = 5e8) {
    if (lambda == 0 || n == 0 || n % lambda != 0)
        throw std::invalid_argument("build_ptc_explicit: need lambda >= 1 dividing n");
    const FieldSpec& big = FieldSpec::get(spec.p, spec.m * lambda);
    SubfieldBridge br(spec, big);
    const std::size_t nprime = n / lambda;

    PTCFamily fam;
    fam.spec = &spec;
    fam.n = n;
    fam.lambda = lambda;
    fam.mode = PTCMode::ExplicitPolynomial;

    std::vector<fq> alpha, beta, scaled_a(nprime), scaled_b(nprime);
    for (fq key = 0; key < big.q; ++key) {
        detail::ptc_key_generator(big, key, nprime, alpha, beta);
        std::vector<PauliFrame> rows;
        for (std::uint32_t l = 0; l < lambda; ++l) {
            std::vector<fq> unit(lambda, 0);
            unit[l] = 1;
            const fq c = br.unvec(unit);
            for (std::size_t i = 0; i < nprime; ++i) {
                scaled_a[i] = big.mul(c, alpha[i]);
                scaled_b[i] = big.mul(c, beta[i]);
            }
            rows.push_back(detail::ptc_unfold(br, scaled_a, scaled_b));
        }
        fam.row_spans.push_back(detail::span_of_rows(spec, rows));
        detail::validate_ptc_rows(spec, rows, fam.row_spans.back());
        fam.rows.push_back(std::move(rows));
    }

    // certify eps: exact measurement when affordable, degree bound otherwise
    fam.eps_num = 2 * nprime - 1;
    fam.eps_den = big.q;
    fam.eps_exhaustive = false;
    double words = 1;
    for (std::size_t i = 0; i < 2 * n; ++i) words *= spec.q;
    if (words * static_cast<double>(big.q) <= work_cap) {
        const auto [num, den] = ptc_measure_eps(fam, work_cap);
        fam.eps_num = num;
        fam.eps_den = den;
        fam.eps_exhaustive = true;
    }
    return fam;
}

struct PTCBuildResult {
    PTCFamily family;
    bool ok = false;          ///< measured eps met the requested target
    std::size_t tries = 0;    ///< sampling rounds consumed
};

/**
 * @brief Randomized keyed family, accepted only by measurement.
 *
 * Each round samples, for every key, lambda fresh rows (rejection-sampled
 * to commute over F_q and stay independent), measures eps exhaustively,
 * and accepts as soon as eps <= eps_target.  When the retry budget runs
 * out, the best family seen is returned with ok = false; the caller
 * decides whether a weaker family is usable.
 */
inline PTCBuildResult build_ptc_random(const FieldSpec& spec, std::size_t n,
                                       std::uint32_t lambda, std::size_t key_count,
                                       double eps_target, std::mt19937_64& rng,
                                       std::size_t max_tries = 32,
                                       double work_cap = 5e8) {
    if (lambda == 0 || n == 0 || lambda > n)
        throw std::invalid_argument("build_ptc_random: need 1 <= lambda <= n");
    if (key_count == 0) throw std::invalid_argument("build_ptc_random: no keys");

    std::uniform_int_distribution<fq> dist(0, spec.q - 1);
    PTCBuildResult best;
    double best_eps = 2.0;

    for (std::size_t t = 1; t <= max_tries; ++t) {
        PTCFamily fam;
        fam.spec = &spec;
        fam.n = n;
        fam.lambda = lambda;
        fam.mode = PTCMode::VerifiedRandom;
        for (std::size_t k = 0; k < key_count; ++k) {
            std::vector<PauliFrame> rows;
            std::vector<std::vector<fq>> cat;
            while (rows.size() < lambda) {
                std::vector<fq> x(n), z(n);
                for (auto& v : x) v = dist(rng);
                for (auto& v : z) v = dist(rng);
                PauliFrame cand = make_pauli(spec, std::move(x), std::move(z), 0, 1);
                bool good = true;
                for (const auto& r : rows)
                    if (symplectic_form(spec, cand, r) != 0) { good = false; break; }
                if (!good) continue;
                std::vector<fq> v = cand.x_part;
                v.insert(v.end(), cand.z_part.begin(), cand.z_part.end());
                cat.push_back(v);
                if (mat_rank(Mat::from_rows(spec, cat)) != cat.size()) {
                    cat.pop_back();
                    continue;
                }
                rows.push_back(std::move(cand));
            }
            fam.row_spans.push_back(detail::span_of_rows(spec, rows));
            fam.rows.push_back(std::move(rows));
        }
        const auto [num, den] = ptc_measure_eps(fam, work_cap);
        fam.eps_num = num;
        fam.eps_den = den;
        fam.eps_exhaustive = true;
        const double eps = fam.eps();
        if (eps < best_eps) {
            best_eps = eps;
            best.family = fam;
        }
        best.tries = t;
        if (eps <= eps_target + 1e-12) {
            best.family = std::move(fam);
            best.ok = true;
            return best;
        }
    }
    best.ok = false;
    return best;
}

// ---------------------------------------------------------------------------
// private authenticated codes
// ---------------------------------------------------------------------------

namespace detail {

/// Coefficients of a frame against the installed logical dictionary:
/// xc_j = x . enc2_j and zc_j = z . enc1_j.  For a normalizer frame these
/// are its logical X and Z coordinates (the pairing-normalized encoders
/// satisfy <enc1_i, enc2_j> = delta_ij); for arbitrary frames they are
/// still exactly what every key-dependent syndrome depends on.
struct LogicalCoords {
    std::vector<fq> xc, zc;
};

inline LogicalCoords logical_coords(const FieldSpec& f, const ConcatEncoders& enc,
                                    const std::vector<fq>& x, const std::vector<fq>& z) {
    const std::size_t kap = enc.enc1.rows;
    LogicalCoords out;
    out.xc.resize(kap);
    out.zc.resize(kap);
    for (std::size_t j = 0; j < kap; ++j) out.xc[j] = vec_dot(f, x, enc.enc2.row(j));
    for (std::size_t i = 0; i < kap; ++i) out.zc[i] = vec_dot(f, z, enc.enc1.row(i));
    return out;
}

/// Embed a dictionary-level Pauli into the code: X coefficients along the
/// enc1 rows, Z coefficients along the enc2 rows.  The image frame has zero
/// syndrome, acts as `p` on the logicals, and the embedding preserves the
/// F_q symplectic form exactly.
inline PauliFrame lift_logical(const CSSCode& css, const ConcatEncoders& enc,
                               const PauliFrame& p) {
    const FieldSpec& f = *css.spec;
    std::vector<fq> x(css.n, 0), z(css.n, 0);
    for (std::size_t i = 0; i < enc.enc1.rows; ++i) {
        if (p.x_part[i] != 0) x = vec_add(f, x, vec_scale(f, p.x_part[i], enc.enc1.row(i)));
        if (p.z_part[i] != 0) z = vec_add(f, z, vec_scale(f, p.z_part[i], enc.enc2.row(i)));
    }
    return make_pauli(f, std::move(x), std::move(z), 0, 1);
}

/// Key-dependent syndrome from precomputed coordinates: component j is the
/// symplectic form of the frame against key row j pushed through the
/// dictionary, sum_i row.z[i]*xc_i - row.x[i]*zc_i.
inline std::vector<fq> ptc_syndrome_from_coords(const FieldSpec& f, const PTCFamily& fam,
                                                std::size_t key, const LogicalCoords& lc) {
    std::vector<fq> s(fam.lambda);
    for (std::uint32_t j = 0; j < fam.lambda; ++j) {
        const PauliFrame& r = fam.rows[key][j];
        fq acc = 0;
        for (std::size_t i = 0; i < fam.n; ++i) {
            acc = f.add(acc, f.mul(r.z_part[i], lc.xc[i]));
            acc = f.sub(acc, f.mul(r.x_part[i], lc.zc[i]));
        }
        s[j] = acc;
    }
    return s;
}

inline std::uint64_t pack_base(const std::vector<fq>& v, std::uint32_t base) {
    std::uint64_t h = 0;
    for (fq d : v) h = h * base + d;
    return h;
}

}  // namespace detail

/**
 * @brief CSS code with a keyed family installed on its logical qudits.
 *
 * The decoder's list stage is materialized at construction: every error of
 * blocked weight <= radius is enumerated once, reduced to its stabilizer
 * class, and filed under its packed syndrome.  This table *is* the
 * enumeration decoder (list every in-radius class with the observed
 * syndrome), and L is its exact worst-case list size.
 */
struct PrivateAQECC {
    CSSCode css;                 ///< ext == 1; kappa() logical qudits
    detail::ConcatEncoders enc;  ///< pairing-normalized dictionary
    PTCFamily ptc;           ///< ptc.n == css.kappa()
    double delta = 0;        ///< decoding radius fraction; distance > delta*n
    std::size_t radius = 0;  ///< floor(delta * n)
    std::size_t distance = 0;

    struct Candidate {
        PauliFrame rep;               ///< canonical class representative
        detail::LogicalCoords coords; ///< its dictionary coordinates
    };
    std::unordered_map<std::uint64_t, std::vector<Candidate>> lists;  ///< by packed syndrome
    std::size_t list_max = 0;  ///< L: exact worst case over all syndromes

    double eps() const { return ptc.eps(); }
    /// Key-averaged failure guarantee for any fixed attack: 2 L eps, capped.
    double claimed_failure() const {
        return std::min(1.0, 2.0 * static_cast<double>(list_max) * eps());
    }
};

/**
 * @brief Couple a CSS code and a keyed family into a private code.
 *
 * Requirements checked here: unblocked code (ext == 1), family width equal
 * to the logical width, same field, code distance strictly above delta*n
 * (so in-radius errors never change the logical class silently), and an
 * enumeration budget for the list table within `work_cap` frames.
 */
inline PrivateAQECC make_private_aqecc(CSSCode css, PTCFamily ptc, double delta,
                                       double work_cap = 5e8) {
    if (css.ext != 1)
        throw std::invalid_argument("make_private_aqecc: expected an unblocked code");
    if (ptc.spec != css.spec)
        throw std::invalid_argument("make_private_aqecc: field mismatch");
    if (ptc.n != css.kappa())
        throw std::invalid_argument(
            "make_private_aqecc: family width " + std::to_string(ptc.n) +
            " != logical width " + std::to_string(css.kappa()));

    PrivateAQECC pa;
    pa.enc = detail::concat_encoders(css);
    pa.delta = delta;
    pa.radius = static_cast<std::size_t>(delta * static_cast<double>(css.n) + 1e-9);
    pa.distance = css_distance(css, work_cap);
    if (pa.distance <= pa.radius)
        throw std::invalid_argument("make_private_aqecc: distance " +
                                    std::to_string(pa.distance) +
                                    " does not exceed the decoding radius " +
                                    std::to_string(pa.radius));

    const FieldSpec& f = *css.spec;
    double frames = 0;
    for (std::size_t w = 0; w <= pa.radius; ++w)
        frames += pauli_weight_stratum_size(f, css.n, 1, w);
    if (frames > work_cap)
        throw std::runtime_error("make_private_aqecc: list table needs ~" +
                                 std::to_string(frames) + " frames, over the cap of " +
                                 std::to_string(work_cap));
    if (static_cast<double>(css.stab.r()) * std::log2(static_cast<double>(f.p)) > 63.0)
        throw std::runtime_error("make_private_aqecc: syndrome too wide to pack");

    for (std::size_t w = 0; w <= pa.radius; ++w)
        for_each_pauli_of_weight(f, css.n, 1, w,
                                 [&](const std::vector<fq>& x, const std::vector<fq>& z) {
            const auto syn = css_syndrome(css, x, z);
            const auto cls = canonical_class_pair(css, make_pauli(f, x, z, 0, 1));
            auto& bucket = pa.lists[detail::pack_base(syn, f.p)];
            for (const auto& c : bucket)
                if (c.rep.x_part == cls.first && c.rep.z_part == cls.second) return;
            PrivateAQECC::Candidate cand;
            cand.rep = make_pauli(f, cls.first, cls.second, 0, 1);
            cand.coords = detail::logical_coords(f, pa.enc, cls.first, cls.second);
            bucket.push_back(std::move(cand));
        });
    for (auto& [k, bucket] : pa.lists) {
        std::sort(bucket.begin(), bucket.end(),
                  [](const PrivateAQECC::Candidate& a, const PrivateAQECC::Candidate& b) {
                      return std::tie(a.rep.x_part, a.rep.z_part) <
                             std::tie(b.rep.x_part, b.rep.z_part);
                  });
        pa.list_max = std::max(pa.list_max, bucket.size());
    }

    pa.css = std::move(css);
    pa.ptc = std::move(ptc);
    return pa;
}

/// Key-dependent syndrome of an arbitrary frame: lambda F_q values, the
/// symplectic forms against the key rows pushed through the dictionary.
inline std::vector<fq> private_ptc_syndrome(const PrivateAQECC& pa, std::size_t key,
                                            const PauliFrame& e) {
    const FieldSpec& f = *pa.css.spec;
    const auto lc = detail::logical_coords(f, pa.enc, e.x_part, e.z_part);
    return detail::ptc_syndrome_from_coords(f, pa.ptc, key, lc);
}

/// All in-radius classes matching both syndromes, in canonical order.
inline std::vector<PauliFrame> private_filter(const PrivateAQECC& pa, std::size_t key,
                                              const Syndrome& s_css,
                                              const std::vector<fq>& s_ptc) {
    const FieldSpec& f = *pa.css.spec;
    if (s_css.size() != pa.css.stab.r())
        throw std::invalid_argument("private_filter: syndrome length mismatch");
    if (s_ptc.size() != pa.ptc.lambda)
        throw std::invalid_argument("private_filter: key syndrome length mismatch");
    std::vector<PauliFrame> out;
    const auto it = pa.lists.find(detail::pack_base(s_css, f.p));
    if (it == pa.lists.end()) return out;
    for (const auto& cand : it->second)
        if (detail::ptc_syndrome_from_coords(f, pa.ptc, key, cand.coords) == s_ptc)
            out.push_back(cand.rep);
    return out;
}

/**
 * @brief Private decode: list by code syndrome, filter by key syndrome,
 * return the canonically smallest survivor; empty filter result rejects
 * (nullopt).  The caller supplies only syndromes, never the error and never
 * the message, so the decision provably depends on nothing else.
 */
inline std::optional<PauliFrame> private_decode(const PrivateAQECC& pa, std::size_t key,
                                                const Syndrome& s_css,
                                                const std::vector<fq>& s_ptc) {
    auto matches = private_filter(pa, key, s_css, s_ptc);
    if (matches.empty()) return std::nullopt;
    return std::move(matches.front());
}

/// Residual-acceptability test: the frame lies in key k's composite
/// stabilizer group (zero code syndrome and dictionary coordinates inside
/// the key's row span), i.e. correcting up to it is harmless under key k.
inline bool private_residual_ok(const PrivateAQECC& pa, std::size_t key,
                                const PauliFrame& residual) {
    if (!vec_is_zero(css_syndrome(pa.css, residual))) return false;
    const FieldSpec& f = *pa.css.spec;
    const auto lc = detail::logical_coords(f, pa.enc, residual.x_part, residual.z_part);
    std::vector<fq> cat = lc.xc;
    cat.insert(cat.end(), lc.zc.begin(), lc.zc.end());
    return rref_contains(pa.ptc.row_spans[key], cat);
}

// ---------------------------------------------------------------------------
// robust secret sharing
// ---------------------------------------------------------------------------

/**
 * @brief Threshold sharing with pairwise authentication.
 *
 * Secrets are `s` symbols of F_b.  Each is split by an independent uniform
 * polynomial of degree <= d evaluated at the fixed points 1..n.  Party i
 * additionally holds, for every j != i, a MAC key (alpha_ij, beta_ij) it
 * will use to check party j, and a tag authenticating its own data vector
 * v_i under party j's key.  A share is therefore s + 3(n-1) symbols wide.
 *
 * Reconstruction keeps the parties approved by at least n-1-d others and
 * interpolates the d+1 lowest-indexed survivors; fewer survivors abort.
 * A forged vector passes one fixed checker's MAC with probability s/b, so
 * with t <= d corruptions the failure probability is at most
 * d * C(n-1, n-2d) * (s/b)^(n-2d), exact in the stored fraction.
 */
struct RSSScheme {
    const FieldSpec* field = nullptr;  ///< F_b
    std::size_t n = 0;                 ///< parties
    std::size_t d = 0;                 ///< threshold: any d shares reveal nothing
    std::size_t s = 0;                 ///< secret symbols

    std::size_t share_width() const { return s + 3 * (n - 1); }
    std::size_t randomness_width() const { return s * d + 2 * n * (n - 1); }
    double log2_capacity() const {
        return static_cast<double>(s) * std::log2(static_cast<double>(field->q));
    }
    /// Honest-reconstruction failure bound against <= d replaced shares.
    double analytic_eps() const {
        const double ratio = static_cast<double>(s) / static_cast<double>(field->q);
        const std::size_t exp = n - 2 * d;
        double binom = 1;
        for (std::size_t i = 0; i < exp; ++i)
            binom = binom * static_cast<double>(n - 1 - i) / static_cast<double>(i + 1);
        double out = static_cast<double>(d) * binom;
        for (std::size_t i = 0; i < exp; ++i) out *= ratio;
        return std::min(1.0, out);
    }
};

struct RSSShare {
    std::vector<fq> v;                        ///< s data symbols
    std::vector<std::pair<fq, fq>> keys;      ///< n entries; [i] unused (self)
    std::vector<fq> tags;                     ///< n entries; [i] unused (self)
};

inline RSSScheme build_rss(const FieldSpec& field, std::size_t n, std::size_t d,
                           std::size_t s) {
    if (n < 2 * d + 1)
        throw std::invalid_argument("build_rss: robustness needs n >= 2d+1");
    if (d == 0) throw std::invalid_argument("build_rss: threshold d must be positive");
    if (n + 1 > field.q)
        throw std::invalid_argument("build_rss: need n distinct nonzero points, n <= b-1");
    if (s == 0) throw std::invalid_argument("build_rss: empty secret");
    RSSScheme sch;
    sch.field = &field;
    sch.n = n;
    sch.d = d;
    sch.s = s;
    return sch;
}

namespace detail {

/// tag = sum_t v[t] * alpha^{t+1} + beta: a polynomial MAC, forgeable only
/// by hitting a root of a degree-<=s polynomial in alpha.
inline fq rss_mac(const FieldSpec& f, const std::vector<fq>& v, fq alpha, fq beta) {
    fq acc = beta, pw = alpha;
    for (fq vt : v) {
        acc = f.add(acc, f.mul(vt, pw));
        pw = f.mul(pw, alpha);
    }
    return acc;
}

}  // namespace detail

/**
 * @brief Deal shares of `secret` using an explicit randomness vector
 * (layout: s*d polynomial coefficients, then keys (alpha, beta) for every
 * ordered pair (i, j), i != j, in row-major order).  Exposing the
 * randomness makes privacy statements directly enumerable.
 */
inline std::vector<RSSShare> rss_share(const RSSScheme& sch, const std::vector<fq>& secret,
                                       const std::vector<fq>& randomness) {
    const FieldSpec& f = *sch.field;
    if (secret.size() != sch.s)
        throw std::invalid_argument("rss_share: secret width mismatch");
    if (randomness.size() != sch.randomness_width())
        throw std::invalid_argument("rss_share: randomness width mismatch");

    std::vector<RSSShare> shares(sch.n);
    for (auto& sh : shares) {
        sh.v.assign(sch.s, 0);
        sh.keys.assign(sch.n, {0, 0});
        sh.tags.assign(sch.n, 0);
    }
    // data layer: v_i[t] = secret[t] + sum_c coeff[t][c] * x_i^{c+1}, x_i = i+1
    for (std::size_t t = 0; t < sch.s; ++t)
        for (std::size_t i = 0; i < sch.n; ++i) {
            const fq xi = static_cast<fq>(i + 1);
            fq acc = secret[t], pw = xi;
            for (std::size_t c = 0; c < sch.d; ++c) {
                acc = f.add(acc, f.mul(randomness[t * sch.d + c], pw));
                pw = f.mul(pw, xi);
            }
            shares[i].v[t] = acc;
        }
    // key layer and tags: keys[i][j] checks party j; tag on i under (j, i)
    std::size_t r = sch.s * sch.d;
    for (std::size_t i = 0; i < sch.n; ++i)
        for (std::size_t j = 0; j < sch.n; ++j) {
            if (i == j) continue;
            shares[i].keys[j] = {randomness[r], randomness[r + 1]};
            r += 2;
        }
    for (std::size_t i = 0; i < sch.n; ++i)
        for (std::size_t j = 0; j < sch.n; ++j) {
            if (i == j) continue;
            const auto [a, b] = shares[j].keys[i];
            shares[i].tags[j] = detail::rss_mac(f, shares[i].v, a, b);
        }
    return shares;
}

/// Convenience dealer with library randomness.
inline std::vector<RSSShare> rss_share(const RSSScheme& sch, const std::vector<fq>& secret,
                                       std::mt19937_64& rng) {
    std::uniform_int_distribution<fq> dist(0, sch.field->q - 1);
    std::vector<fq> rnd(sch.randomness_width());
    for (auto& v : rnd) v = dist(rng);
    return rss_share(sch, secret, rnd);
}

/**
 * @brief Reconstruct from (possibly corrupted) shares: approval counting,
 * then Lagrange interpolation of the d+1 lowest-indexed approved parties.
 * Returns nullopt when fewer than d+1 parties survive.
 */
inline std::optional<std::vector<fq>> rss_reconstruct(const RSSScheme& sch,
                                                      const std::vector<RSSShare>& shares) {
    const FieldSpec& f = *sch.field;
    if (shares.size() != sch.n)
        throw std::invalid_argument("rss_reconstruct: expected one share per party");

    std::vector<std::size_t> good;
    for (std::size_t i = 0; i < sch.n; ++i) {
        std::size_t approvals = 0;
        for (std::size_t j = 0; j < sch.n; ++j) {
            if (j == i) continue;
            const auto [a, b] = shares[j].keys[i];
            if (shares[i].tags[j] == detail::rss_mac(f, shares[i].v, a, b)) ++approvals;
        }
        if (approvals >= sch.n - 1 - sch.d) good.push_back(i);
    }
    if (good.size() < sch.d + 1) return std::nullopt;
    good.resize(sch.d + 1);

    std::vector<fq> secret(sch.s, 0);
    for (std::size_t t = 0; t < sch.s; ++t) {
        fq acc = 0;
        for (std::size_t a = 0; a < good.size(); ++a) {
            const fq xa = static_cast<fq>(good[a] + 1);
            fq num = 1, den = 1;
            for (std::size_t b = 0; b < good.size(); ++b) {
                if (a == b) continue;
                const fq xb = static_cast<fq>(good[b] + 1);
                num = f.mul(num, xb);                 // evaluate at 0: prod -x_b
                den = f.mul(den, f.sub(xb, xa));      // prod (x_b - x_a)
            }
            acc = f.add(acc, f.mul(shares[good[a]].v[t], f.mul(num, f.inv(den))));
        }
        secret[t] = acc;
    }
    return secret;
}

// ---------------------------------------------------------------------------
// composed authenticated code
// ---------------------------------------------------------------------------

/**
 * @brief Private code whose key is itself stored among the n parties by a
 * robust sharing layer.  Party i holds code block i and share i, so an
 * adversary touching a delta fraction of parties attacks both layers on
 * the same support; the failure budgets add (2 L eps for the code layer,
 * analytic_eps for the key layer).
 */
struct AQECC {
    PrivateAQECC paqecc;
    RSSScheme rss;

    double claimed_failure() const {
        return std::min(1.0, paqecc.claimed_failure() + rss.analytic_eps());
    }
};

inline AQECC build_aqecc(PrivateAQECC paqecc, RSSScheme rss) {
    if (rss.n != paqecc.css.n)
        throw std::invalid_argument("build_aqecc: one share per code block, need n_rss = n");
    const double key_bits =
        static_cast<double>(paqecc.ptc.lambda) * std::log2(static_cast<double>(paqecc.css.spec->q));
    if (rss.log2_capacity() + 1e-9 < key_bits)
        throw std::invalid_argument(
            "build_aqecc: sharing capacity 2^" + std::to_string(rss.log2_capacity()) +
            " cannot store a key space of 2^" + std::to_string(key_bits) +
            "; the key must fit in the shared secret");
    AQECC out;
    out.paqecc = std::move(paqecc);
    out.rss = std::move(rss);
    return out;
}

/// Key index -> shared secret symbols (base-b digits, low digit first).
inline std::vector<fq> aqecc_key_to_secret(const AQECC& ac, std::size_t key) {
    const std::uint32_t b = ac.rss.field->q;
    std::vector<fq> secret(ac.rss.s, 0);
    std::size_t v = key;
    for (std::size_t t = 0; t < ac.rss.s; ++t) {
        secret[t] = static_cast<fq>(v % b);
        v /= b;
    }
    if (v != 0) throw std::invalid_argument("aqecc_key_to_secret: key out of capacity");
    return secret;
}

/// Secret symbols -> key index, inverse of aqecc_key_to_secret; rejects
/// (nullopt) when the digits spell a value outside the key space.
inline std::optional<std::size_t> aqecc_secret_to_key(const AQECC& ac,
                                                      const std::vector<fq>& secret) {
    const std::uint32_t b = ac.rss.field->q;
    std::size_t v = 0;
    for (std::size_t t = secret.size(); t-- > 0;) v = v * b + secret[t];
    if (v >= ac.paqecc.ptc.key_count()) return std::nullopt;
    return v;
}

// ---------------------------------------------------------------------------
// direct construction
// ---------------------------------------------------------------------------

namespace detail {

/// Kernel basis of the F_q map v -> (sym(v, row_j))_j on (x|z) vectors,
/// i.e. the normalizer of the row set, as 2n-wide vectors.
inline std::vector<std::vector<fq>> sym_kernel_basis(const FieldSpec& f, std::size_t n,
                                                     const std::vector<PauliFrame>& rows) {
    Mat m(f, rows.size(), 2 * n);
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) {
            m.at(j, i) = f.neg(rows[j].z_part[i]);  // sym(v, r) = -<v_x, r_z>... sign fixed below
            m.at(j, n + i) = rows[j].x_part[i];
        }
    // sym(v, r) = <v_x, r_z> - <r_x, v_z>; the matrix above computes its
    // negative, which has the same kernel.
    RREF rr = make_rref(m);
    std::vector<bool> is_pivot(2 * n, false);
    for (std::size_t p : rr.pivots) is_pivot[p] = true;
    std::vector<std::vector<fq>> basis;
    for (std::size_t c = 0; c < 2 * n; ++c) {
        if (is_pivot[c]) continue;
        std::vector<fq> v(2 * n, 0);
        v[c] = 1;
        for (std::size_t r = 0; r < rr.rank; ++r)
            v[rr.pivots[r]] = f.neg(rr.m.at(r, c));
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Symplectic partner completion: from the normalizer of the key rows,
/// modulo the rows themselves, extract (n - lambda) pairs (Lx_i, Lz_i) with
/// sym(Lx_i, Lz_j) = delta_ij and all cross forms zero.
inline void ptc_logical_pairs(const FieldSpec& f, std::size_t n,
                              const std::vector<PauliFrame>& rows, const RREF& row_span,
                              std::vector<PauliFrame>& lx, std::vector<PauliFrame>& lz) {
    auto to_frame = [&](const std::vector<fq>& v) {
        return make_pauli(f, std::vector<fq>(v.begin(), v.begin() + n),
                          std::vector<fq>(v.begin() + n, v.end()), 0, 1);
    };
    auto to_vec = [&](const PauliFrame& p) {
        std::vector<fq> v = p.x_part;
        v.insert(v.end(), p.z_part.begin(), p.z_part.end());
        return v;
    };

    std::vector<PauliFrame> pool;
    for (auto& v : sym_kernel_basis(f, n, rows)) {
        const auto red = rref_reduce(row_span, v);
        if (!vec_is_zero(red)) pool.push_back(to_frame(red));
    }
    // dedupe dependent representatives: keep an independent spanning set
    {
        std::vector<std::vector<fq>> kept;
        std::vector<PauliFrame> indep;
        std::vector<std::vector<fq>> all;  // rows + kept, for rank tests
        for (std::size_t j = 0; j < rows.size(); ++j) all.push_back(to_vec(rows[j]));
        for (auto& p : pool) {
            all.push_back(to_vec(p));
            if (mat_rank(Mat::from_rows(f, all)) == all.size())
                indep.push_back(p);
            else
                all.pop_back();
        }
        pool = std::move(indep);
    }

    lx.clear();
    lz.clear();
    while (!pool.empty()) {
        PauliFrame u = pool.front();
        pool.erase(pool.begin());
        std::size_t mate = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (symplectic_form(f, u, pool[i]) != 0) { mate = i; break; }
        if (mate == pool.size())
            throw std::logic_error("ptc_logical_pairs: degenerate pairing");
        PauliFrame w = pool[mate];
        pool.erase(pool.begin() + mate);
        // normalize sym(u, w) = 1
        w = pauli_scale(f.inv(symplectic_form(f, u, w)), w);
        // clear both forms from the remaining pool
        for (auto& p : pool) {
            const fq a = symplectic_form(f, p, w);   // coefficient along u
            const fq b = symplectic_form(f, u, p);   // coefficient along w
            if (a != 0) {
                PauliFrame shift = pauli_scale(f.neg(a), u);
                p = make_pauli(f, vec_add(f, p.x_part, shift.x_part),
                               vec_add(f, p.z_part, shift.z_part), 0, 1);
            }
            if (b != 0) {
                PauliFrame shift = pauli_scale(f.neg(b), w);
                p = make_pauli(f, vec_add(f, p.x_part, shift.x_part),
                               vec_add(f, p.z_part, shift.z_part), 0, 1);
            }
        }
        lx.push_back(std::move(u));
        lz.push_back(std::move(w));
    }
}

}  // namespace detail

/**
 * @brief One-shot authenticated code: an inner private code on every block
 * of an outer CSS code, glued by a spreading permutation.
 *
 * Layout: the outer code has n_out symbols over F_{q^kp}, where kp =
 * ptc.n - lambda is the logical space the keyed family leaves free; each
 * symbol is carried by one inner block of n_in base qudits, and the
 * physical order of the N = n_out * n_in qudits is the graph's edge
 * permutation applied to the blocked order.
 *
 * Decoding runs the inner private decoder on every block, extracts the
 * residue each block leaves on the free logical pairs, reassembles those
 * residues into an outer-alphabet frame, and unique-decodes it with the
 * outer code; blocks whose private decode rejected surface as erasure-like
 * symbol errors for the outer stage.
 */
struct DirectAQECC {
    PrivateAQECC inner;            ///< private code per block (radius delta_in)
    FQRSCode outer;                ///< outer CSS code over F_{q^kp}
    BipartiteGraph graph;          ///< n_out x n_in edge permutation
    SubfieldBridge bridge;         ///< F_q -> F_{q^kp}

    std::size_t kp = 0;            ///< free logical pairs per block
    std::size_t t_out = 0;         ///< outer unique-decoding radius (symbols)
    double delta_out = 0;          ///< (t_out + 1) / n_out

    /// Per-key free-pair dictionaries (Lx, Lz), sym(Lx_i, Lz_j) = delta_ij.
    std::vector<std::vector<PauliFrame>> key_lx, key_lz;

    std::size_t block_count() const { return outer.css.n; }
    std::size_t qudits() const { return outer.css.n * inner.css.n; }
};

inline DirectAQECC build_direct_aqecc(PrivateAQECC inner, FQRSCode outer,
                                      BipartiteGraph graph) {
    const FieldSpec& f = *inner.css.spec;
    if (inner.ptc.lambda >= inner.ptc.n)
        throw std::invalid_argument("build_direct_aqecc: keyed family leaves no free pairs");
    const std::size_t kp = inner.ptc.n - inner.ptc.lambda;
    const FieldSpec& big = *outer.css.spec;
    if (big.p != f.p || big.m != f.m * kp)
        throw std::invalid_argument("build_direct_aqecc: outer alphabet must be q^" +
                                    std::to_string(kp));
    if (outer.css.ext != 1)
        throw std::invalid_argument("build_direct_aqecc: outer code must be unblocked");
    if (graph.n != outer.css.n || graph.r != inner.css.n)
        throw std::invalid_argument("build_direct_aqecc: graph must be n_out x n_in");

    DirectAQECC dc{std::move(inner), std::move(outer), std::move(graph),
                   SubfieldBridge(f, big), {}, {}, {}, {}, {}};
    dc.kp = kp;
    const std::size_t d_out = (dc.outer.css.n - dc.outer.css.kappa()) / 2 + 1;
    dc.t_out = (d_out - 1) / 2;
    dc.delta_out = static_cast<double>(dc.t_out + 1) / static_cast<double>(dc.outer.css.n);

    for (std::size_t k = 0; k < dc.inner.ptc.key_count(); ++k) {
        std::vector<PauliFrame> lx, lz;
        detail::ptc_logical_pairs(f, dc.inner.ptc.n, dc.inner.ptc.rows[k],
                                  dc.inner.ptc.row_spans[k], lx, lz);
        if (lx.size() != kp)
            throw std::logic_error("build_direct_aqecc: wrong free-pair count");
        dc.key_lx.push_back(std::move(lx));
        dc.key_lz.push_back(std::move(lz));
    }
    return dc;
}

/// Residue of a corrected block on the free logical pairs, as one outer
/// symbol pair: a_i = sym(R, lift(Lz_i)) and b_i = -sym(R, lift(Lx_i)); the
/// X symbol re-bundles a through the relative basis, the Z symbol re-bundles
/// b through its trace dual.  Both are zero exactly when the block residue
/// acts trivially on the free pairs, which (given zero code syndrome) means
/// it sits in the key's composite stabilizer group.
inline std::pair<fq, fq> direct_block_residue(const DirectAQECC& dc, std::size_t key,
                                              const PauliFrame& residual) {
    const FieldSpec& f = *dc.inner.css.spec;
    const auto lc = detail::logical_coords(f, dc.inner.enc, residual.x_part, residual.z_part);
    std::vector<fq> a(dc.kp), b(dc.kp);
    for (std::size_t i = 0; i < dc.kp; ++i) {
        const PauliFrame& zi = dc.key_lz[key][i];
        const PauliFrame& xi = dc.key_lx[key][i];
        fq av = 0, bv = 0;
        for (std::size_t t = 0; t < dc.inner.ptc.n; ++t) {
            av = f.add(av, f.mul(zi.z_part[t], lc.xc[t]));
            av = f.sub(av, f.mul(zi.x_part[t], lc.zc[t]));
            bv = f.add(bv, f.mul(xi.z_part[t], lc.xc[t]));
            bv = f.sub(bv, f.mul(xi.x_part[t], lc.zc[t]));
        }
        a[i] = av;
        b[i] = f.neg(bv);
    }
    return {dc.bridge.unvec(a), dc.bridge.unvec_dual(b)};
}

/// Push one outer symbol pair down into a block frame along key `key`'s
/// free pairs (inverse of direct_block_residue modulo the block code).
inline PauliFrame direct_block_embed(const DirectAQECC& dc, std::size_t key, fq sym_x,
                                     fq sym_z) {
    const FieldSpec& f = *dc.inner.css.spec;
    const auto a = dc.bridge.vec(sym_x);
    const auto b = dc.bridge.vec_dual(sym_z);
    PauliFrame acc = pauli_identity(f, dc.inner.ptc.n, 1);
    for (std::size_t i = 0; i < dc.kp; ++i) {
        if (a[i] != 0) {
            const PauliFrame t = pauli_scale(a[i], dc.key_lx[key][i]);
            acc = make_pauli(f, vec_add(f, acc.x_part, t.x_part),
                             vec_add(f, acc.z_part, t.z_part), 0, 1);
        }
        if (b[i] != 0) {
            const PauliFrame t = pauli_scale(b[i], dc.key_lz[key][i]);
            acc = make_pauli(f, vec_add(f, acc.x_part, t.x_part),
                             vec_add(f, acc.z_part, t.z_part), 0, 1);
        }
    }
    return detail::lift_logical(dc.inner.css, dc.inner.enc, acc);
}

struct DirectDecodeResult {
    PauliFrame correction;              ///< blocked (unpermuted) base layout
    std::vector<std::uint8_t> rejected; ///< per block: private decode rejected
};

namespace detail {

/// Any correction consistent with both syndromes of a block, used when the
/// private decoder rejects: a plain syndrome preimage, shifted by a lifted
/// logical whose form against the key rows makes up the key-syndrome
/// deficit.  (The shift exists because the rows are independent, so their
/// pairing against the logical space is surjective.)  The repaired block
/// rejoins the keyed code space with an arbitrary residue; the outer stage
/// treats it as one symbol error.
inline PauliFrame block_repair(const DirectAQECC& dc, std::size_t key,
                               const Syndrome& s_css, const std::vector<fq>& s_ptc) {
    const FieldSpec& f = *dc.inner.css.spec;
    const PauliFrame c0 = syndrome_preimage(dc.inner.css, s_css);
    const auto have = private_ptc_syndrome(dc.inner, key, c0);

    const std::size_t np = dc.inner.ptc.n;
    Mat m(f, dc.inner.ptc.lambda, 2 * np);
    std::vector<fq> deficit(dc.inner.ptc.lambda);
    for (std::uint32_t j = 0; j < dc.inner.ptc.lambda; ++j) {
        const PauliFrame& r = dc.inner.ptc.rows[key][j];
        for (std::size_t t = 0; t < np; ++t) {
            m.at(j, t) = r.z_part[t];
            m.at(j, np + t) = f.neg(r.x_part[t]);
        }
        deficit[j] = f.sub(s_ptc[j], have[j]);
    }
    const auto v = mat_solve(m, deficit);
    if (!v) throw std::logic_error("block_repair: key rows lost surjectivity");
    const PauliFrame fix = lift_logical(
        dc.inner.css, dc.inner.enc,
        make_pauli(f, std::vector<fq>(v->begin(), v->begin() + np),
                   std::vector<fq>(v->begin() + np, v->end()), 0, 1));
    return make_pauli(f, vec_add(f, c0.x_part, fix.x_part),
                      vec_add(f, c0.z_part, fix.z_part), 0, 1);
}

}  // namespace detail

/**
 * @brief Block stage of the direct decoder: private-decode every block from
 * its two syndromes.  A block whose private decode rejects is flagged and
 * repaired with any correction matching both syndromes, so every block
 * rejoins the keyed code space and the damage surfaces to the outer stage
 * as at most one symbol error per flagged or misdecoded block.
 */
inline DirectDecodeResult direct_block_decode(const DirectAQECC& dc, std::size_t key,
                                              const std::vector<Syndrome>& s_css,
                                              const std::vector<std::vector<fq>>& s_ptc) {
    const FieldSpec& f = *dc.inner.css.spec;
    const std::size_t nb = dc.block_count(), nin = dc.inner.css.n;
    if (s_css.size() != nb || s_ptc.size() != nb)
        throw std::invalid_argument("direct_block_decode: one syndrome pair per block");

    DirectDecodeResult out;
    out.correction = pauli_identity(f, nb * nin, 1);
    out.rejected.assign(nb, 0);
    for (std::size_t bidx = 0; bidx < nb; ++bidx) {
        auto corr = private_decode(dc.inner, key, s_css[bidx], s_ptc[bidx]);
        if (!corr) {
            out.rejected[bidx] = 1;
            corr = detail::block_repair(dc, key, s_css[bidx], s_ptc[bidx]);
        }
        std::copy(corr->x_part.begin(), corr->x_part.end(),
                  out.correction.x_part.begin() + bidx * nin);
        std::copy(corr->z_part.begin(), corr->z_part.end(),
                  out.correction.z_part.begin() + bidx * nin);
    }
    return out;
}

/**
 * @brief Outer stage: unique decoding of the residue frame's syndrome up to
 * t_out symbol errors.
 *
 * Decodes each side to the nearest ambient codeword within t_out.  Since
 * the outer code's distance exceeds 2 t_out, two distinct classes cannot
 * both have X and Z supports of size <= t_out, so the combined answer is
 * the unique such class when both sides land; a side failure rejects.
 */
inline std::optional<PauliFrame> direct_outer_decode(
    const DirectAQECC& dc, const Syndrome& s_outer,
    DecodeMode mode = DecodeMode::Algebraic) {
    const FieldSpec& f = *dc.outer.css.spec;
    const PauliFrame e = syndrome_preimage(dc.outer.css, s_outer);
    const auto rx = unique_decode(dc.outer.css.c1, vec_neg(f, e.x_part), dc.t_out, mode);
    if (!rx.codeword || rx.ambiguous) return std::nullopt;
    const auto rz = unique_decode(dc.outer.css.c2, vec_neg(f, e.z_part), dc.t_out, mode);
    if (!rz.codeword || rz.ambiguous) return std::nullopt;
    return make_pauli(f, vec_add(f, e.x_part, *rx.codeword),
                      vec_add(f, e.z_part, *rz.codeword), 0, 1);
}

// ---------------------------------------------------------------------------
// parameter planning
// ---------------------------------------------------------------------------

/**
 * @brief Asymptotic parameter schedule for a target rate R and gap gamma.
 *
 * The budget splits as gamma'' = gamma/4 (outer rate lift, inner loss,
 * spreading loss, decoding slack), with the outer code at rate
 * R' = R/(1 - gamma''), the expander degree r = gamma'' (as a fraction of
 * block length), alphabet exponents log2 q = c_q / gamma'^5 and
 * log2 a = 1/gamma''^2, and the keyed-family density lambda/n = 1/log2 q.
 * gamma' is gamma'' capped at f(gamma'') = c_f * gamma''^{3/5}; the cap
 * only binds for gamma'' > c_f^{5/2} (large-gamma regimes).
 */
struct ParameterPlan {
    double rate_target = 0, gamma = 0;
    double gamma2 = 0;        ///< gamma''
    double gamma1 = 0;        ///< gamma'
    double outer_rate = 0;    ///< R'
    double degree_fraction = 0;
    double log2_q = 0, log2_a = 0, log2_qprime = 0;
    double lambda_per_n = 0;
    double radius = 0;        ///< claimed decodable fraction (1-R-gamma)/2
    bool radius_clamped = false;
    bool feasible = false;    ///< all internal consistency checks passed
};

inline ParameterPlan plan_parameters(double rate, double gamma, double c_f = 1.0,
                                     double c_q = 1.0) {
    if (!(rate > 0) || !(rate < 1) || !(gamma > 0) || !(gamma < 1))
        throw std::invalid_argument("plan_parameters: need 0 < R < 1 and 0 < gamma < 1");
    ParameterPlan p;
    p.rate_target = rate;
    p.gamma = gamma;
    p.gamma2 = gamma / 4.0;
    const double cap = c_f * std::pow(p.gamma2, 0.6);
    p.gamma1 = std::min(p.gamma2, cap);
    p.outer_rate = rate / (1.0 - p.gamma2);
    p.degree_fraction = p.gamma2;
    p.log2_q = c_q / std::pow(p.gamma1, 5.0);
    p.log2_a = 1.0 / (p.gamma2 * p.gamma2);
    p.log2_qprime = p.log2_q + p.log2_a;
    p.lambda_per_n = 1.0 / p.log2_q;
    const double raw_radius = 0.5 * (1.0 - rate - gamma);
    p.radius = std::max(0.0, raw_radius);
    p.radius_clamped = raw_radius < 0.0;
    p.feasible = p.outer_rate < 1.0 && !p.radius_clamped;
    return p;
}

/**
 * @brief Rate ceiling for approximately-correcting codes: a length-n code
 * of distance d = floor(delta*n) + 1 recovering with residual error eps
 * obeys k <= n - 2(d-1) + 12 sqrt(eps) n + h2(min(4 sqrt(eps), 1/2)) / log2 q.
 * At eps = 0 this is the exact no-go line k <= n - 2(d-1).
 */
struct SingletonReport {
    bool ok = false;      ///< the pair (k, d) respects the ceiling
    double bound = 0;     ///< maximum admissible k
    double slack = 0;     ///< bound - k
    std::size_t d = 0;
};

inline SingletonReport singleton_check(std::size_t n, std::size_t k, double q,
                                       double delta, double eps) {
    if (q < 2) throw std::invalid_argument("singleton_check: alphabet too small");
    if (delta < 0 || eps < 0)
        throw std::invalid_argument("singleton_check: negative parameters");
    SingletonReport rep;
    rep.d = static_cast<std::size_t>(delta * static_cast<double>(n) + 1e-9) + 1;
    const double root = std::sqrt(eps);
    rep.bound = static_cast<double>(n) - 2.0 * static_cast<double>(rep.d - 1) +
                12.0 * root * static_cast<double>(n) +
                h2(std::min(4.0 * root, 0.5)) / std::log2(q);
    rep.slack = rep.bound - static_cast<double>(k);
    rep.ok = rep.slack >= -1e-9;
    return rep;
}

}  // namespace aqec
