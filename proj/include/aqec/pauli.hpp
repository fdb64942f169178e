#pragma once

/**
 * @file pauli.hpp
 * @brief Generalized Pauli operators over F_q qudits in symplectic form,
 *        stabilizer codes, syndromes, equivalence testing, a brute-force
 *        distance oracle, and code composition.
 *
 * Conventions, fixed once and used everywhere:
 *  - E_{a,b} = X^a Z^b (X part applied first), so
 *    E_{a,b} E_{a',b'} = w^{tr(a'.b)} E_{a+a', b+b'} with w the p-th root.
 *  - commutation_phase(E, F) = <a_E, b_F> - <a_F, b_E> where <u,v> is the
 *    sum of tr(u_j v_j) over symbol slots; zero iff the operators commute.
 *  - syndrome component s_i = commutation_phase(generator_i, E): the
 *    generator is the FIRST argument.
 *  - Weight counts alphabet blocks (ext base symbols per block) where any
 *    X or Z symbol is nonzero.
 *  - Phases are carried modulo p through multiplication and inversion but
 *    ignored by equivalence, classification, and all decoders.
 *
 * The symplectic F_p expansion writes each X symbol in the alpha half and
 * each Z symbol in the beta half of the field's dual basis pair, turning
 * the trace form into a plain F_p dot product; check rows are arranged so
 * that syndrome(code, E) = check_matrix . symp_vector(E).
 */

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gf.hpp"
#include "linalg.hpp"

namespace aqec {

struct PauliFrame {
    const FieldSpec* spec = nullptr;
    std::size_t n = 0;        ///< length in alphabet blocks
    std::uint32_t ext = 1;    ///< base symbols per block
    std::vector<fq> x_part;   ///< length n*ext
    std::vector<fq> z_part;   ///< length n*ext
    std::uint32_t phase = 0;  ///< exponent of the p-th root of unity, mod p

    std::size_t width() const { return n * ext; }

    bool operator==(const PauliFrame& o) const {
        return spec == o.spec && n == o.n && ext == o.ext && x_part == o.x_part &&
               z_part == o.z_part && phase == o.phase;
    }
};

using Syndrome = std::vector<fq>;  ///< F_p values, one per generator

inline PauliFrame make_pauli(const FieldSpec& spec, std::vector<fq> x, std::vector<fq> z,
                             std::uint32_t phase = 0, std::uint32_t ext = 1) {
    if (x.size() != z.size()) throw std::invalid_argument("make_pauli: X/Z length mismatch");
    if (ext == 0 || x.size() % ext != 0)
        throw std::invalid_argument("make_pauli: ext must divide the symbol count");
    for (fq v : x)
        if (v >= spec.q) throw std::invalid_argument("make_pauli: X symbol out of range");
    for (fq v : z)
        if (v >= spec.q) throw std::invalid_argument("make_pauli: Z symbol out of range");
    PauliFrame e;
    e.spec = &spec;
    e.n = x.size() / ext;
    e.ext = ext;
    e.x_part = std::move(x);
    e.z_part = std::move(z);
    e.phase = phase % spec.p;
    return e;
}

inline PauliFrame pauli_identity(const FieldSpec& spec, std::size_t n, std::uint32_t ext = 1) {
    return make_pauli(spec, std::vector<fq>(n * ext, 0), std::vector<fq>(n * ext, 0), 0, ext);
}

inline std::size_t pauli_weight(const PauliFrame& e) {
    std::size_t w = 0;
    for (std::size_t b = 0; b < e.n; ++b)
        for (std::uint32_t i = 0; i < e.ext; ++i)
            if (e.x_part[b * e.ext + i] != 0 || e.z_part[b * e.ext + i] != 0) {
                ++w;
                break;
            }
    return w;
}

namespace detail {
inline void check_same_shape(const PauliFrame& a, const PauliFrame& b, const char* who) {
    if (a.spec != b.spec || a.n != b.n || a.ext != b.ext)
        throw std::invalid_argument(std::string(who) + ": mismatched frames");
}
}  // namespace detail

/// <a_E, b_F> - <a_F, b_E> in F_p; zero iff E and F commute.
inline fq commutation_phase(const PauliFrame& e, const PauliFrame& f) {
    detail::check_same_shape(e, f, "commutation_phase");
    const FieldSpec& fld = *e.spec;
    std::uint32_t acc = 0;
    for (std::size_t s = 0; s < e.width(); ++s) {
        acc += fld.trace(fld.mul(e.x_part[s], f.z_part[s]));
        acc += fld.p - fld.trace(fld.mul(f.x_part[s], e.z_part[s]));
    }
    return acc % fld.p;
}

/// Group product E.F with the phase exponent tracked modulo p.
inline PauliFrame pauli_mul(const PauliFrame& e, const PauliFrame& f) {
    detail::check_same_shape(e, f, "pauli_mul");
    const FieldSpec& fld = *e.spec;
    PauliFrame out = e;
    std::uint32_t cross = 0;  // Z^{b_e} X^{a_f} reorder cost: tr(a_f . b_e)
    for (std::size_t s = 0; s < e.width(); ++s) {
        cross += fld.trace(fld.mul(f.x_part[s], e.z_part[s]));
        out.x_part[s] = fld.add(e.x_part[s], f.x_part[s]);
        out.z_part[s] = fld.add(e.z_part[s], f.z_part[s]);
    }
    out.phase = (e.phase + f.phase + cross) % fld.p;
    return out;
}

inline PauliFrame pauli_inv(const PauliFrame& e) {
    const FieldSpec& fld = *e.spec;
    PauliFrame out = e;
    std::uint32_t cross = 0;
    for (std::size_t s = 0; s < e.width(); ++s) {
        cross += fld.trace(fld.mul(e.x_part[s], e.z_part[s]));
        out.x_part[s] = fld.neg(e.x_part[s]);
        out.z_part[s] = fld.neg(e.z_part[s]);
    }
    out.phase = (fld.p - e.phase % fld.p + cross) % fld.p;
    return out;
}

/// Symplectic scalar action (lambda a, lambda b); the phase is dropped,
/// which all phase-insensitive predicates permit.
inline PauliFrame pauli_scale(fq lambda, const PauliFrame& e) {
    const FieldSpec& fld = *e.spec;
    PauliFrame out = e;
    for (std::size_t s = 0; s < e.width(); ++s) {
        out.x_part[s] = fld.mul(lambda, e.x_part[s]);
        out.z_part[s] = fld.mul(lambda, e.z_part[s]);
    }
    out.phase = 0;
    return out;
}

// ---------------------------------------------------------------------------
// symplectic F_p expansion
// ---------------------------------------------------------------------------

/// F_p coordinate vector [alpha-coords of every X symbol | beta-coords of
/// every Z symbol], length 2 * n * ext * m.
inline std::vector<fq> symp_vector(const PauliFrame& e) {
    const FieldSpec& fld = *e.spec;
    const auto& pd = fld.poly_dual();
    const std::size_t w = e.width(), m = fld.m;
    std::vector<fq> v(2 * w * m);
    for (std::size_t s = 0; s < w; ++s) {
        const auto cx = fld.coords(e.x_part[s], pd, true);
        const auto cz = fld.coords(e.z_part[s], pd, false);
        for (std::size_t l = 0; l < m; ++l) {
            v[s * m + l] = cx[l];
            v[(w + s) * m + l] = cz[l];
        }
    }
    return v;
}

/// Row r(E) such that commutation_phase(E, F) = r(E) . symp_vector(F) over
/// F_p: the X half carries -beta-coords of b_E, the Z half alpha-coords of a_E.
inline std::vector<fq> symp_check_row(const PauliFrame& e) {
    const FieldSpec& fld = *e.spec;
    const auto& pd = fld.poly_dual();
    const std::size_t w = e.width(), m = fld.m;
    std::vector<fq> v(2 * w * m);
    for (std::size_t s = 0; s < w; ++s) {
        const auto cz = fld.coords(e.z_part[s], pd, false);
        const auto ca = fld.coords(e.x_part[s], pd, true);
        for (std::size_t l = 0; l < m; ++l) {
            v[s * m + l] = (fld.p - cz[l]) % fld.p;
            v[(w + s) * m + l] = ca[l];
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// stabilizer codes
// ---------------------------------------------------------------------------

enum class PauliClass { Stabilizer, Logical, Detectable };

struct StabilizerCode {
    const FieldSpec* spec = nullptr;
    const FieldSpec* fp = nullptr;  ///< prime subfield, for symplectic work
    std::size_t n = 0;
    std::uint32_t ext = 1;
    std::vector<PauliFrame> generators;
    std::vector<PauliFrame> logical_x, logical_z;  ///< may be empty

    Mat check_mat;   ///< r x 2nem over F_p: syndrome = check_mat . symp(E)
    Mat symp_gens;   ///< generator symplectic vectors, one per row
    RREF symp_rref;  ///< cached elimination of symp_gens

    std::size_t r() const { return generators.size(); }
    /// Logical qudit count n - r/(ext*m); fractional for folded views.
    double logical_qudits() const {
        return static_cast<double>(n) -
               static_cast<double>(r()) / (static_cast<double>(ext) * spec->m);
    }
};

inline StabilizerCode make_stabilizer_code(const FieldSpec& spec, std::size_t n,
                                           std::uint32_t ext,
                                           std::vector<PauliFrame> generators,
                                           std::vector<PauliFrame> logical_x = {},
                                           std::vector<PauliFrame> logical_z = {}) {
    StabilizerCode c;
    c.spec = &spec;
    c.fp = &FieldSpec::get(spec.p, 1);
    c.n = n;
    c.ext = ext;
    c.generators = std::move(generators);
    c.logical_x = std::move(logical_x);
    c.logical_z = std::move(logical_z);

    const std::size_t r = c.generators.size();
    for (const auto& g : c.generators)
        if (g.spec != &spec || g.n != n || g.ext != ext)
            throw std::invalid_argument("make_stabilizer_code: generator shape mismatch");
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = i + 1; j < r; ++j)
            if (commutation_phase(c.generators[i], c.generators[j]) != 0)
                throw std::invalid_argument("make_stabilizer_code: generators do not commute");

    const std::size_t dim = 2 * n * ext * spec.m;
    c.check_mat = Mat(*c.fp, r, dim);
    c.symp_gens = Mat(*c.fp, r, dim);
    for (std::size_t i = 0; i < r; ++i) {
        c.check_mat.set_row(i, symp_check_row(c.generators[i]));
        c.symp_gens.set_row(i, symp_vector(c.generators[i]));
    }
    c.symp_rref = make_rref(c.symp_gens);
    if (c.symp_rref.rank != r)
        throw std::invalid_argument("make_stabilizer_code: dependent generators");

    if (c.logical_x.size() != c.logical_z.size())
        throw std::invalid_argument("make_stabilizer_code: unpaired logical representatives");
    for (const auto& l : c.logical_x)
        for (const auto& g : c.generators)
            if (commutation_phase(g, l) != 0)
                throw std::invalid_argument("make_stabilizer_code: logical X outside normalizer");
    for (const auto& l : c.logical_z)
        for (const auto& g : c.generators)
            if (commutation_phase(g, l) != 0)
                throw std::invalid_argument("make_stabilizer_code: logical Z outside normalizer");
    // the dictionary pairing must be the standard symplectic form
    for (std::size_t i = 0; i < c.logical_x.size(); ++i)
        for (std::size_t j = 0; j < c.logical_z.size(); ++j) {
            const fq want = (i == j) ? 1 : 0;
            if (commutation_phase(c.logical_x[i], c.logical_z[j]) != want)
                throw std::invalid_argument("make_stabilizer_code: logical pairing not canonical");
        }
    return c;
}

inline Syndrome syndrome(const StabilizerCode& code, const PauliFrame& e) {
    if (e.spec != code.spec || e.n != code.n || e.ext != code.ext)
        throw std::invalid_argument("syndrome: frame shape mismatch");
    return mat_apply(code.check_mat, symp_vector(e));
}

/// Phase-insensitive membership of O^{-1} O' in the stabilizer group.
inline bool is_stabilizer_equivalent(const StabilizerCode& code, const PauliFrame& o,
                                     const PauliFrame& op) {
    detail::check_same_shape(o, op, "is_stabilizer_equivalent");
    const auto diff = vec_sub(*code.fp, symp_vector(op), symp_vector(o));
    return rref_contains(code.symp_rref, diff);
}

inline PauliClass classify(const StabilizerCode& code, const PauliFrame& e) {
    const auto v = symp_vector(e);
    if (!vec_is_zero(mat_apply(code.check_mat, v))) return PauliClass::Detectable;
    return rref_contains(code.symp_rref, v) ? PauliClass::Stabilizer : PauliClass::Logical;
}

// ---------------------------------------------------------------------------
// weight-stratified Pauli enumeration
// ---------------------------------------------------------------------------

namespace detail {

/// Visit every Pauli of blocked weight exactly w; fn(x_part, z_part) with
/// buffers reused between calls.
template <typename Fn>
void for_each_pauli_of_weight_impl(const FieldSpec& spec, std::size_t n, std::uint32_t ext,
                                   std::size_t w, std::vector<std::size_t>& support,
                                   std::size_t next, std::vector<fq>& x, std::vector<fq>& z,
                                   Fn&& fn) {
    if (support.size() == w) {
        // per-block nonidentity patterns: odometer over q^{2 ext} - 1 values
        const std::size_t blocks = support.size();
        std::vector<std::uint64_t> pat(blocks, 1);
        auto apply = [&](std::size_t b) {
            std::uint64_t v = pat[b];
            for (std::uint32_t i = 0; i < ext; ++i) {
                x[support[b] * ext + i] = static_cast<fq>(v % spec.q);
                v /= spec.q;
            }
            for (std::uint32_t i = 0; i < ext; ++i) {
                z[support[b] * ext + i] = static_cast<fq>(v % spec.q);
                v /= spec.q;
            }
        };
        std::uint64_t per_block = 1;
        for (std::uint32_t i = 0; i < 2 * ext; ++i) per_block *= spec.q;
        for (std::size_t b = 0; b < blocks; ++b) apply(b);
        while (true) {
            fn(static_cast<const std::vector<fq>&>(x), static_cast<const std::vector<fq>&>(z));
            std::size_t b = blocks;
            while (b > 0 && pat[b - 1] + 1 == per_block) {
                pat[b - 1] = 1;
                apply(b - 1);
                --b;
            }
            if (b == 0) break;
            ++pat[b - 1];
            apply(b - 1);
        }
        for (std::size_t b = 0; b < blocks; ++b)
            for (std::uint32_t i = 0; i < ext; ++i) {
                x[support[b] * ext + i] = 0;
                z[support[b] * ext + i] = 0;
            }
        return;
    }
    for (std::size_t pos = next; pos + (w - support.size()) <= n; ++pos) {
        support.push_back(pos);
        for_each_pauli_of_weight_impl(spec, n, ext, w, support, pos + 1, x, z, fn);
        support.pop_back();
    }
}

}  // namespace detail

template <typename Fn>
void for_each_pauli_of_weight(const FieldSpec& spec, std::size_t n, std::uint32_t ext,
                              std::size_t w, Fn&& fn) {
    std::vector<fq> x(n * ext, 0), z(n * ext, 0);
    if (w == 0) {
        fn(static_cast<const std::vector<fq>&>(x), static_cast<const std::vector<fq>&>(z));
        return;
    }
    std::vector<std::size_t> support;
    detail::for_each_pauli_of_weight_impl(spec, n, ext, w, support, 0, x, z, fn);
}

/// Number of Paulis of blocked weight exactly w (phases not counted).
inline double pauli_weight_stratum_size(const FieldSpec& spec, std::size_t n,
                                        std::uint32_t ext, std::size_t w) {
    double per_block = 1;
    for (std::uint32_t i = 0; i < 2 * ext; ++i) per_block *= spec.q;
    per_block -= 1;
    double binom = 1;
    for (std::size_t i = 0; i < w; ++i)
        binom = binom * static_cast<double>(n - i) / static_cast<double>(i + 1);
    double out = binom;
    for (std::size_t i = 0; i < w; ++i) out *= per_block;
    return out;
}

/// Minimum weight of any normalizer element outside the stabilizer group.
/// Strictly an oracle: weight-stratified exhaustive search with a work cap.
inline std::size_t brute_force_distance(const StabilizerCode& code,
                                        double work_cap = 5e8) {
    const FieldSpec& spec = *code.spec;
    double work = 0;
    for (std::size_t w = 1; w <= code.n; ++w) {
        work += pauli_weight_stratum_size(spec, code.n, code.ext, w);
        if (work > work_cap)
            throw std::runtime_error(
                "brute_force_distance: enumeration would need ~" + std::to_string(work) +
                " candidates (cap " + std::to_string(work_cap) + ")");
        bool found = false;
        for_each_pauli_of_weight(spec, code.n, code.ext, w,
                                 [&](const std::vector<fq>& x, const std::vector<fq>& z) {
                                     if (found) return;
                                     PauliFrame e = make_pauli(spec, x, z, 0, code.ext);
                                     if (classify(code, e) == PauliClass::Logical) found = true;
                                 });
        if (found) return w;
    }
    throw std::domain_error("brute_force_distance: no logical operators exist");
}

inline PauliFrame random_pauli_of_weight(const FieldSpec& spec, std::size_t n,
                                         std::uint32_t ext, std::size_t w,
                                         std::mt19937_64& rng) {
    if (w > n) throw std::invalid_argument("random_pauli_of_weight: weight exceeds length");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<fq> x(n * ext, 0), z(n * ext, 0);
    std::uniform_int_distribution<fq> d(0, spec.q - 1);
    for (std::size_t b = 0; b < w; ++b) {
        bool nonzero = false;
        while (!nonzero)
            for (std::uint32_t i = 0; i < ext; ++i) {
                x[idx[b] * ext + i] = d(rng);
                z[idx[b] * ext + i] = d(rng);
                nonzero = nonzero || x[idx[b] * ext + i] != 0 || z[idx[b] * ext + i] != 0;
            }
    }
    return make_pauli(spec, std::move(x), std::move(z), 0, ext);
}

// ---------------------------------------------------------------------------
// composition
// ---------------------------------------------------------------------------

/// Encode a message-space Pauli through the outer code's logical dictionary:
/// X^a Z^b maps to prod_i Lx_i^{(.) a_i} Lz_i^{(.) b_i} symplectically.
inline PauliFrame encode_pauli(const StabilizerCode& outer, const PauliFrame& msg) {
    const FieldSpec& spec = *outer.spec;
    if (msg.spec != &spec || msg.width() != outer.logical_x.size())
        throw std::invalid_argument("encode_pauli: message shape mismatch");
    PauliFrame out = pauli_identity(spec, outer.n, outer.ext);
    for (std::size_t i = 0; i < msg.width(); ++i) {
        if (msg.x_part[i] != 0)
            out = pauli_mul(out, pauli_scale(msg.x_part[i], outer.logical_x[i]));
        if (msg.z_part[i] != 0)
            out = pauli_mul(out, pauli_scale(msg.z_part[i], outer.logical_z[i]));
    }
    out.phase = 0;
    return out;
}

/// Independent copies side by side: [[n,k]] x t -> [[nt, kt]].
inline StabilizerCode parallel_blocks(const StabilizerCode& code, std::size_t t) {
    const FieldSpec& spec = *code.spec;
    const std::size_t w = code.n * code.ext;
    auto place = [&](const PauliFrame& e, std::size_t blk) {
        std::vector<fq> x(w * t, 0), z(w * t, 0);
        std::copy(e.x_part.begin(), e.x_part.end(), x.begin() + blk * w);
        std::copy(e.z_part.begin(), e.z_part.end(), z.begin() + blk * w);
        return make_pauli(spec, std::move(x), std::move(z), 0, code.ext);
    };
    std::vector<PauliFrame> gens, lx, lz;
    for (std::size_t b = 0; b < t; ++b) {
        for (const auto& g : code.generators) gens.push_back(place(g, b));
        for (const auto& l : code.logical_x) lx.push_back(place(l, b));
        for (const auto& l : code.logical_z) lz.push_back(place(l, b));
    }
    return make_stabilizer_code(spec, code.n * t, code.ext, std::move(gens), std::move(lx),
                                std::move(lz));
}

/// Stack an inner encoding: outer [[n, m]] composed with inner [[m, k]]
/// yields [[n, k]]; the inner generators are lifted through the outer
/// logical dictionary and appended to the outer generators.
inline StabilizerCode compose(const StabilizerCode& outer, const StabilizerCode& inner) {
    if (outer.spec != inner.spec)
        throw std::invalid_argument("compose: field mismatch");
    if (inner.n * inner.ext != outer.logical_x.size())
        throw std::invalid_argument("compose: inner block count != outer message size");
    std::vector<PauliFrame> gens = outer.generators;
    for (const auto& g : inner.generators) gens.push_back(encode_pauli(outer, g));
    std::vector<PauliFrame> lx, lz;
    for (const auto& l : inner.logical_x) lx.push_back(encode_pauli(outer, l));
    for (const auto& l : inner.logical_z) lz.push_back(encode_pauli(outer, l));
    return make_stabilizer_code(*outer.spec, outer.n, outer.ext, std::move(gens),
                                std::move(lx), std::move(lz));
}

// ---------------------------------------------------------------------------
// textual form
// ---------------------------------------------------------------------------

namespace detail {

inline std::string part_to_string(const FieldSpec& spec, const std::vector<fq>& part,
                                  std::uint32_t ext) {
    std::string s;
    const bool wide = spec.q > 10;
    for (std::size_t i = 0; i < part.size(); ++i) {
        if (i > 0 && ext > 1 && i % ext == 0) s += '|';
        else if (i > 0 && wide) s += ',';
        s += wide ? std::to_string(part[i]) : std::string(1, static_cast<char>('0' + part[i]));
    }
    return s;
}

inline std::vector<fq> part_from_string(const FieldSpec& spec, const std::string& s,
                                        std::uint32_t ext) {
    std::vector<fq> out;
    const bool wide = spec.q > 10;
    std::string token;
    auto flush = [&]() {
        if (token.empty()) throw std::invalid_argument("pauli parse: empty symbol");
        const unsigned long v = std::stoul(token);
        if (v >= spec.q) throw std::invalid_argument("pauli parse: symbol out of range");
        out.push_back(static_cast<fq>(v));
        token.clear();
    };
    for (char c : s) {
        if (c == '|' || c == ',') {
            flush();
        } else if (c >= '0' && c <= '9') {
            if (!wide && !token.empty()) flush();
            token += c;
        } else {
            throw std::invalid_argument("pauli parse: bad character");
        }
    }
    if (!token.empty()) flush();
    if (ext != 0 && out.size() % ext != 0)
        throw std::invalid_argument("pauli parse: symbol count not a whole number of blocks");
    return out;
}

}  // namespace detail

inline std::string pauli_to_string(const PauliFrame& e) {
    return "X:" + detail::part_to_string(*e.spec, e.x_part, e.ext) +
           ";Z:" + detail::part_to_string(*e.spec, e.z_part, e.ext) +
           ";ph:" + std::to_string(e.phase);
}

inline PauliFrame pauli_from_string(const FieldSpec& spec, const std::string& s,
                                    std::uint32_t ext = 1) {
    const auto xpos = s.find("X:");
    const auto zpos = s.find(";Z:");
    const auto ppos = s.find(";ph:");
    if (xpos != 0 || zpos == std::string::npos || ppos == std::string::npos || zpos > ppos)
        throw std::invalid_argument("pauli parse: expected X:...;Z:...;ph:...");
    auto x = detail::part_from_string(spec, s.substr(2, zpos - 2), ext);
    auto z = detail::part_from_string(spec, s.substr(zpos + 3, ppos - zpos - 3), ext);
    const std::uint32_t ph = static_cast<std::uint32_t>(std::stoul(s.substr(ppos + 4)));
    return make_pauli(spec, std::move(x), std::move(z), ph, ext);
}

}  // namespace aqec
