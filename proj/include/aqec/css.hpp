#pragma once

/**
 * @file css.hpp
 * @brief CSS stabilizer codes built from nested classical codes: construction,
 *        quantum folding, syndrome-driven list decoding, quantum list
 *        recovery, random sampling, and exhaustive verification sweeps.
 *
 * Conventions, pinned here once and relied on by the serialization layer:
 *  - A CSS pair is (C1, C2) with dual(C2) contained in C1.  X-type stabilizer
 *    generators come from the generator rows of dual(C2), Z-type generators
 *    from the generator rows of dual(C1), in that order.  Within one row the
 *    scalar multiples x^l (l < m, the F_q/F_p degree) are emitted
 *    consecutively, so the syndrome layout is
 *        [row 0 of dual(C2)] x m entries, [row 1] x m, ..., then dual(C1).
 *  - The logical dictionary is a basis v_i of C1/dual(C2) on the X side and
 *    a normalized basis w~_j of C2/dual(C1) on the Z side, chosen so that
 *    the F_q dot products satisfy v_i . w~_j = pairing_unit * delta_ij with
 *    trace(pairing_unit) = 1.  This makes commutation_phase(E_{v_i,0},
 *    E_{0,w~_j}) = delta_ij, the canonical pairing the stabilizer layer
 *    enforces, for every extension degree (trace(1) alone vanishes when the
 *    characteristic divides m, so the unit is selected per field).
 *  - Two error frames are stabilizer-equivalent iff their X parts differ by
 *    an element of dual(C2) and their Z parts by an element of dual(C1).
 *    Canonical class labels eliminate the pivot positions of those subcodes.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "aqec/classical.hpp"
#include "aqec/pauli.hpp"

namespace aqec {

// ---------------------------------------------------------------------------
// domain type
// ---------------------------------------------------------------------------

struct CSSCode {
    const FieldSpec* spec = nullptr;
    std::size_t n = 0;         ///< length in alphabet blocks
    std::uint32_t ext = 1;     ///< base symbols per block
    std::uint32_t fold_m = 1;  ///< bundle size relative to the original codes

    FoldedCode c1;      ///< X-side ambient code C1 (keeps decoder structure)
    FoldedCode c2;      ///< Z-side ambient code C2
    LinearCode c2perp;  ///< dual of C2; its generator rows seed the X checks
    LinearCode c1perp;  ///< dual of C1; its generator rows seed the Z checks

    StabilizerCode stab;  ///< derived stabilizer code with logical dictionary
    CosetCode x_cosets;   ///< C1 / dual(C2)
    CosetCode z_cosets;   ///< C2 / dual(C1)

    Mat logical_x_basis;   ///< kappa x width, rows v_i
    Mat logical_z_basis;   ///< kappa x width, rows w~_j (normalized)
    fq pairing_unit = 1;   ///< c with trace(c) = 1 and v_i . w~_j = c delta_ij

    /// Logical message width per side, in F_q dimensions.
    std::size_t kappa() const { return logical_x_basis.rows; }
    /// Logical block count n - r/(ext*m); fractional only for odd foldings.
    double logical_blocks() const { return stab.logical_qudits(); }
};

namespace detail {

/// Basis of rowspace(ambient)/rowspace(sub), canonical for the given
/// matrices: ambient RREF rows are reduced by the sub RREF and re-echeloned.
/// Every output row lies in the ambient row space and has zeros at the sub
/// pivots, so the rows are independent modulo the subspace.
inline Mat quotient_basis(const Mat& ambient_gen, const Mat& sub_gen) {
    const FieldSpec& f = *ambient_gen.f;
    RREF sub = make_rref(sub_gen);
    RREF amb = make_rref(ambient_gen);
    std::vector<std::vector<fq>> reduced;
    for (std::size_t i = 0; i < amb.rank; ++i) {
        auto red = rref_reduce(sub, amb.m.row(i));
        if (!vec_is_zero(red)) reduced.push_back(std::move(red));
    }
    if (reduced.empty()) return Mat(f, 0, ambient_gen.cols);
    RREF rr = make_rref(Mat::from_rows(f, reduced));
    Mat out(f, rr.rank, ambient_gen.cols);
    for (std::size_t i = 0; i < rr.rank; ++i) out.set_row(i, rr.m.row(i));
    return out;
}

/// The smallest field element with trace 1 (the trace map is onto F_p, so
/// one always exists).
inline fq unit_trace_element(const FieldSpec& f) {
    for (fq c = 1; c < f.q; ++c)
        if (f.trace(c) == 1) return c;
    throw std::logic_error("unit_trace_element: trace map not surjective");
}

inline std::string format_vector(const std::vector<fq>& v) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    os << ")";
    return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

/// Assemble the CSS code of a nested pair: X checks from dual(C2), Z checks
/// from dual(C1), plus coset machinery for decoding and a logical dictionary.
/// Explicit dictionary bases may be supplied (rows must represent cosets of
/// C1/dual(C2) resp. C2/dual(C1)); the Z side is re-normalized against the X
/// side either way, so any basis of the right span is accepted.
inline CSSCode build_css(FoldedCode c1f, FoldedCode c2f,
                         std::optional<Mat> logical_x_rows = std::nullopt,
                         std::optional<Mat> logical_z_rows = std::nullopt) {
    const LinearCode& c1 = c1f.code;
    const LinearCode& c2 = c2f.code;
    if (!c1.spec || c1.spec != c2.spec)
        throw std::invalid_argument("build_css: components over different fields");
    if (c1.n != c2.n || c1.ext != c2.ext || c1f.fold_m != c2f.fold_m)
        throw std::invalid_argument("build_css: components have different blockings");
    const FieldSpec& f = *c1.spec;
    const std::size_t width = c1.width();

    // containment dual(C2) <= C1, with a witness on failure
    {
        RREF g1 = make_rref(c1.generator);
        for (std::size_t i = 0; i < c2.parity.rows; ++i) {
            auto red = rref_reduce(g1, c2.parity.row(i));
            if (!vec_is_zero(red))
                throw std::invalid_argument(
                    "build_css: dual of the Z-side code is not inside the X-side code; "
                    "parity row " + std::to_string(i) + " leaves residue " +
                    detail::format_vector(red));
        }
    }

    CSSCode css;
    css.spec = &f;
    css.n = c1.n;
    css.ext = c1.ext;
    css.fold_m = c1f.fold_m;

    // dual components: generator/parity swap roles across a dual pair
    css.c2perp = make_linear_code(f, c1.n, c1.ext, c2.parity, c2.generator);
    css.c1perp = make_linear_code(f, c1.n, c1.ext, c1.parity, c1.generator);

    // stabilizer generators; scalar multiples x^l make the F_q span an
    // F_p span of frames
    std::vector<PauliFrame> gens;
    const std::vector<fq> zero(width, 0);
    for (std::size_t i = 0; i < css.c2perp.generator.rows; ++i)
        for (std::uint32_t l = 0; l < f.m; ++l)
            gens.push_back(make_pauli(
                f, vec_scale(f, f.poly_basis_elt(l), css.c2perp.generator.row(i)),
                zero, 0, c1.ext));
    for (std::size_t i = 0; i < css.c1perp.generator.rows; ++i)
        for (std::uint32_t l = 0; l < f.m; ++l)
            gens.push_back(make_pauli(
                f, zero, vec_scale(f, f.poly_basis_elt(l), css.c1perp.generator.row(i)),
                0, c1.ext));

    // logical dictionary
    Mat vx = logical_x_rows ? std::move(*logical_x_rows)
                            : detail::quotient_basis(c1.generator, c2.parity);
    Mat wz = logical_z_rows ? std::move(*logical_z_rows)
                            : detail::quotient_basis(c2.generator, c1.parity);
    const std::size_t kap = c1.k_fq + c2.k_fq - width;
    if (vx.rows != kap || wz.rows != kap || vx.cols != width || wz.cols != width)
        throw std::invalid_argument("build_css: logical basis has the wrong shape");

    css.pairing_unit = detail::unit_trace_element(f);
    if (kap > 0) {
        Mat gram(f, kap, kap);
        for (std::size_t i = 0; i < kap; ++i)
            for (std::size_t j = 0; j < kap; ++j)
                gram.at(i, j) = vec_dot(f, vx.row(i), wz.row(j));
        Mat ginv;
        try {
            ginv = mat_inverse(gram);
        } catch (const std::domain_error&) {
            throw std::invalid_argument("build_css: logical pairing is degenerate");
        }
        // w~_j = c * sum_l ginv[l][j] w_l  gives  v_i . w~_j = c delta_ij
        Mat wt(f, kap, width);
        for (std::size_t j = 0; j < kap; ++j) {
            std::vector<fq> acc(width, 0);
            for (std::size_t l = 0; l < kap; ++l) {
                const fq coef = f.mul(css.pairing_unit, ginv.at(l, j));
                if (coef == 0) continue;
                const auto wrow = wz.row(l);
                for (std::size_t t = 0; t < width; ++t)
                    acc[t] = f.add(acc[t], f.mul(coef, wrow[t]));
            }
            wt.set_row(j, acc);
        }
        wz = std::move(wt);
    }
    css.logical_x_basis = std::move(vx);
    css.logical_z_basis = std::move(wz);

    std::vector<PauliFrame> lx, lz;
    for (std::size_t i = 0; i < kap; ++i) {
        lx.push_back(make_pauli(f, css.logical_x_basis.row(i), zero, 0, c1.ext));
        lz.push_back(make_pauli(f, zero, css.logical_z_basis.row(i), 0, c1.ext));
    }
    css.stab = make_stabilizer_code(f, c1.n, c1.ext, std::move(gens),
                                    std::move(lx), std::move(lz));

    css.x_cosets = make_coset_code(c1f, css.c2perp);
    css.z_cosets = make_coset_code(c2f, css.c1perp);
    css.c1 = std::move(c1f);
    css.c2 = std::move(c2f);
    return css;
}

inline CSSCode build_css(LinearCode c1, LinearCode c2,
                         std::optional<Mat> logical_x_rows = std::nullopt,
                         std::optional<Mat> logical_z_rows = std::nullopt) {
    return build_css(unfolded(std::move(c1)), unfolded(std::move(c2)),
                     std::move(logical_x_rows), std::move(logical_z_rows));
}

/// Re-block an existing CSS code into bundles of m blocks.  The stabilizer
/// matrices and the logical dictionary are untouched; only the weight
/// semantics (and the decoders' notion of a position) change.
inline CSSCode fold_quantum(const CSSCode& css, std::uint32_t m) {
    if (m == 0 || css.n % m != 0)
        throw std::invalid_argument("fold_quantum: bundle size must divide the block count");
    return build_css(refold(css.c1, m), refold(css.c2, m),
                     css.logical_x_basis, css.logical_z_basis);
}

// ---------------------------------------------------------------------------
// syndromes
// ---------------------------------------------------------------------------

/// Syndrome straight from the classical structure: an X check built from row
/// a of dual(C2) and multiple x^l reads trace(x^l * (a . e_z)); a Z check
/// from row b of dual(C1) reads trace(-x^l * (b . e_x)).  One F_q dot
/// product per row, m trace evaluations each; equals the generic
/// symplectic-matrix syndrome of the stabilizer layer.
inline Syndrome css_syndrome(const CSSCode& css, const std::vector<fq>& x_part,
                             const std::vector<fq>& z_part) {
    const FieldSpec& f = *css.spec;
    const std::size_t width = css.n * css.ext;
    if (x_part.size() != width || z_part.size() != width)
        throw std::invalid_argument("css_syndrome: part length mismatch");
    Syndrome s;
    s.reserve(css.stab.r());
    for (std::size_t i = 0; i < css.c2perp.generator.rows; ++i) {
        const fq d = vec_dot(f, css.c2perp.generator.row(i), z_part);
        for (std::uint32_t l = 0; l < f.m; ++l)
            s.push_back(f.trace(f.mul(f.poly_basis_elt(l), d)));
    }
    for (std::size_t i = 0; i < css.c1perp.generator.rows; ++i) {
        const fq d = vec_dot(f, css.c1perp.generator.row(i), x_part);
        for (std::uint32_t l = 0; l < f.m; ++l)
            s.push_back(f.trace(f.neg(f.mul(f.poly_basis_elt(l), d))));
    }
    return s;
}

inline Syndrome css_syndrome(const CSSCode& css, const PauliFrame& e) {
    return css_syndrome(css, e.x_part, e.z_part);
}

/// Any error frame with the requested syndrome, from one Gaussian solve of
/// the check system; the result carries no weight guarantee.
inline PauliFrame syndrome_preimage(const CSSCode& css, const Syndrome& s) {
    if (s.size() != css.stab.r())
        throw std::invalid_argument("syndrome_preimage: syndrome length mismatch");
    const FieldSpec& f = *css.spec;
    auto y = mat_solve(css.stab.check_mat, s);
    if (!y)
        throw std::logic_error(
            "syndrome_preimage: check system inconsistent despite independent rows");
    const auto& pd = f.poly_dual();
    const std::size_t width = css.n * css.ext;
    const std::size_t m = f.m;
    std::vector<fq> ex(width, 0), ez(width, 0);
    for (std::size_t t = 0; t < width; ++t) {
        fq ax = 0, bz = 0;
        for (std::size_t l = 0; l < m; ++l) {
            ax = f.add(ax, f.mul((*y)[t * m + l], pd.alpha[l]));
            bz = f.add(bz, f.mul((*y)[(width + t) * m + l], pd.beta[l]));
        }
        ex[t] = ax;
        ez[t] = bz;
    }
    return make_pauli(f, std::move(ex), std::move(ez), 0, css.ext);
}

// ---------------------------------------------------------------------------
// stabilizer classes
// ---------------------------------------------------------------------------

/// Canonical label of the stabilizer class of a frame: both parts reduced by
/// the pivots of the respective dual subcode.  Frames are equivalent iff
/// their labels match, and the label of an in-class frame is itself in class.
inline std::pair<std::vector<fq>, std::vector<fq>> canonical_class_pair(
    const CSSCode& css, const PauliFrame& e) {
    return {rref_reduce(css.x_cosets.sub_rref, e.x_part),
            rref_reduce(css.z_cosets.sub_rref, e.z_part)};
}

/// Lightest member of the stabilizer class of `e`, by exhausting the
/// dual(C2) x dual(C1) shift group.  Throws when that group is larger than
/// `work_cap` elements.
inline std::pair<std::size_t, PauliFrame> min_weight_in_class(
    const CSSCode& css, const PauliFrame& e, double work_cap = 5e7) {
    const FieldSpec& f = *css.spec;
    const double group = std::pow(static_cast<double>(f.q),
                                  static_cast<double>(css.c2perp.k_fq + css.c1perp.k_fq));
    if (group > work_cap)
        throw std::runtime_error("min_weight_in_class: shift group has about " +
                                 std::to_string(group) + " elements, over the cap of " +
                                 std::to_string(work_cap));
    std::vector<std::vector<fq>> xs;
    for_each_in_rowspace(css.c2perp.generator,
                         [&](const std::vector<fq>& w) { xs.push_back(w); });
    std::size_t best = css.n + 1;
    std::vector<fq> bx, bz;
    for_each_in_rowspace(css.c1perp.generator, [&](const std::vector<fq>& sz) {
        const auto zc = vec_add(f, e.z_part, sz);
        for (const auto& sx : xs) {
            const auto xc = vec_add(f, e.x_part, sx);
            std::size_t w = 0;
            for (std::size_t b = 0; b < css.n; ++b)
                for (std::uint32_t t = 0; t < css.ext; ++t)
                    if (xc[b * css.ext + t] != 0 || zc[b * css.ext + t] != 0) {
                        ++w;
                        break;
                    }
            if (w < best) {
                best = w;
                bx = xc;
                bz = zc;
            }
        }
    });
    return {best, make_pauli(f, std::move(bx), std::move(bz), 0, css.ext)};
}

/// Exact distance: the minimum blocked weight over the nonzero logical
/// classes.  Any class (A, B) with A nonzero weighs at least as much as the
/// pure-X class (A, 0), whose lightest member lives in C1 \ dual(C2); so the
/// minimum is attained on one of the two pure sides and a coset scan of C1
/// and C2 suffices.  Throws when either scan exceeds `work_cap` codewords.
inline std::size_t css_distance(const CSSCode& css, double work_cap = 5e7) {
    const FieldSpec& f = *css.spec;
    const auto side = [&](const FoldedCode& amb, const CosetCode& cosets) {
        const double words = std::pow(static_cast<double>(f.q),
                                      static_cast<double>(amb.code.k_fq));
        if (words > work_cap)
            throw std::runtime_error("css_distance: about " + std::to_string(words) +
                                     " codewords to scan, over the cap of " +
                                     std::to_string(work_cap));
        std::size_t best = css.n + 1;
        for_each_in_rowspace(amb.code.generator, [&](const std::vector<fq>& w) {
            if (rref_contains(cosets.sub_rref, w)) return;  // stabilizer, not logical
            std::size_t wt = 0;
            for (std::size_t b = 0; b < css.n; ++b)
                for (std::uint32_t t = 0; t < css.ext; ++t)
                    if (w[b * css.ext + t] != 0) {
                        ++wt;
                        break;
                    }
            best = std::min(best, wt);
        });
        return best;
    };
    const std::size_t dx = side(css.c1, css.x_cosets);
    const std::size_t dz = side(css.c2, css.z_cosets);
    const std::size_t d = std::min(dx, dz);
    if (d > css.n) throw std::domain_error("css_distance: code has no logical classes");
    return d;
}

// ---------------------------------------------------------------------------
// quantum list decoding
// ---------------------------------------------------------------------------

struct QLDResult {
    std::vector<PauliFrame> list;  ///< pairwise stabilizer-distinct, sorted
    std::size_t raw_pairs = 0;     ///< codeword-level pair count before class dedup
    std::size_t deduplicated = 0;  ///< list.size()
};

/// All stabilizer classes containing an error of blocked weight <= tau*n
/// with the given syndrome (possibly plus heavier classes the classical
/// decoders surface).  One representative per class: solve any (e_x, e_z)
/// for the syndrome, then list-decode -e_x in C1/dual(C2) and -e_z in
/// C2/dual(C1) and combine every X candidate with every Z candidate.
inline QLDResult qld_decode(const CSSCode& css, const Syndrome& s, double tau,
                            DecodeMode mode = DecodeMode::BruteForce,
                            std::uint32_t fold_s = 0) {
    const FieldSpec& f = *css.spec;
    const PauliFrame e = syndrome_preimage(css, s);

    std::size_t raw_x = 0, raw_z = 0;
    const auto xs =
        coset_list_decode(css.x_cosets, vec_neg(f, e.x_part), tau, mode, fold_s, &raw_x);
    const auto zs =
        coset_list_decode(css.z_cosets, vec_neg(f, e.z_part), tau, mode, fold_s, &raw_z);

    QLDResult res;
    res.raw_pairs = raw_x * raw_z;
    for (const auto& a : xs)
        for (const auto& b : zs)
            res.list.push_back(make_pauli(f, vec_add(f, e.x_part, a),
                                          vec_add(f, e.z_part, b), 0, css.ext));
    std::sort(res.list.begin(), res.list.end(),
              [](const PauliFrame& l, const PauliFrame& r) {
                  return std::tie(l.x_part, l.z_part) < std::tie(r.x_part, r.z_part);
              });
    res.deduplicated = res.list.size();
    return res;
}

// ---------------------------------------------------------------------------
// quantum list recovery
// ---------------------------------------------------------------------------

/// List recovery from per-block candidate sets: find the stabilizer classes
/// of syndrome-s errors that agree with one of the <= ell candidates on at
/// least eta*n blocks.  Candidates are single-block frames (n = 1, ext =
/// css.ext).  The sets are shifted by a syndrome preimage, each side is
/// list-recovered classically, and the resulting cosets are recombined; the
/// output covers every such class (listing each exactly once) and may add
/// classes whose X and Z agreement blocks differ.
inline std::vector<PauliFrame> qlr_decode(const CSSCode& css, const Syndrome& s,
                                          const std::vector<std::vector<PauliFrame>>& sets,
                                          double eta, std::size_t ell,
                                          DecodeMode mode = DecodeMode::BruteForce,
                                          std::uint32_t fold_s = 1) {
    const FieldSpec& f = *css.spec;
    if (sets.size() != css.n)
        throw std::invalid_argument("qlr_decode: need one candidate set per block");
    for (const auto& S : sets) {
        if (S.size() > ell)
            throw std::invalid_argument("qlr_decode: candidate set exceeds ell");
        for (const auto& cand : S)
            if (cand.spec != css.spec || cand.width() != css.ext)
                throw std::invalid_argument("qlr_decode: candidate is not a single block");
    }
    const PauliFrame e = syndrome_preimage(css, s);

    std::vector<std::vector<std::vector<fq>>> sx(css.n), sz(css.n);
    for (std::size_t i = 0; i < css.n; ++i) {
        for (const auto& cand : sets[i]) {
            std::vector<fq> bx(css.ext), bz(css.ext);
            for (std::uint32_t t = 0; t < css.ext; ++t) {
                bx[t] = f.sub(cand.x_part[t], e.x_part[i * css.ext + t]);
                bz[t] = f.sub(cand.z_part[t], e.z_part[i * css.ext + t]);
            }
            sx[i].push_back(std::move(bx));
            sz[i].push_back(std::move(bz));
        }
        std::sort(sx[i].begin(), sx[i].end());
        sx[i].erase(std::unique(sx[i].begin(), sx[i].end()), sx[i].end());
        std::sort(sz[i].begin(), sz[i].end());
        sz[i].erase(std::unique(sz[i].begin(), sz[i].end()), sz[i].end());
    }

    const auto xs = list_recover(css.c1, sx, eta, ell, mode, fold_s);
    const auto zs = list_recover(css.c2, sz, eta, ell, mode, fold_s);

    std::vector<std::vector<fq>> xr, zr;
    for (const auto& a : xs) xr.push_back(rref_reduce(css.x_cosets.sub_rref, a));
    for (const auto& b : zs) zr.push_back(rref_reduce(css.z_cosets.sub_rref, b));
    std::sort(xr.begin(), xr.end());
    xr.erase(std::unique(xr.begin(), xr.end()), xr.end());
    std::sort(zr.begin(), zr.end());
    zr.erase(std::unique(zr.begin(), zr.end()), zr.end());

    std::vector<PauliFrame> out;
    for (const auto& a : xr)
        for (const auto& b : zr)
            out.push_back(make_pauli(f, vec_add(f, e.x_part, a),
                                     vec_add(f, e.z_part, b), 0, css.ext));
    std::sort(out.begin(), out.end(), [](const PauliFrame& l, const PauliFrame& r) {
        return std::tie(l.x_part, l.z_part) < std::tie(r.x_part, r.z_part);
    });
    return out;
}

// ---------------------------------------------------------------------------
// logical dictionary use
// ---------------------------------------------------------------------------

/// The logical Pauli a normalizer frame acts as, on kappa message qudits:
/// X coefficients are read off against the w~ basis, Z coefficients against
/// the v basis, both scaled by the pairing unit.  Stabilizer elements map to
/// the identity; detectable frames are rejected.
inline PauliFrame logical_action(const CSSCode& css, const PauliFrame& e) {
    const FieldSpec& f = *css.spec;
    if (!vec_is_zero(css_syndrome(css, e)))
        throw std::invalid_argument("logical_action: frame is outside the normalizer");
    const fq cinv = f.inv(css.pairing_unit);
    const std::size_t kap = css.kappa();
    std::vector<fq> xc(kap), zc(kap);
    for (std::size_t j = 0; j < kap; ++j)
        xc[j] = f.mul(cinv, vec_dot(f, e.x_part, css.logical_z_basis.row(j)));
    for (std::size_t i = 0; i < kap; ++i)
        zc[i] = f.mul(cinv, vec_dot(f, e.z_part, css.logical_x_basis.row(i)));
    return make_pauli(f, std::move(xc), std::move(zc), 0, 1);
}

// ---------------------------------------------------------------------------
// folded quantum RS codes
// ---------------------------------------------------------------------------

/// CSS code of two nested RS-type codes with shared evaluation points,
/// bundled m symbols per block, with the syndrome-driven list decoder wired
/// to the algebraic folded decoder on both components.
struct FQRSCode {
    CSSCode css;
    GRSSpec outer;       ///< the X-side ambient code, dimension (1+R)n/2
    GRSSpec inner_dual;  ///< dual(C2), dimension (1-R)n/2, same points
    std::uint32_t fold_m = 1;
};

/// Dimension split: dual(C2) gets (1-R)n/2, C1 gets (1+R)n/2, so the code
/// has R*n logical base symbols.  The logical dictionary is monomial: v_i
/// evaluates x^{k2+i} and w~_j is matched to it from the top coefficients of
/// the dual component, which makes the message the high-degree coefficient
/// range of the encoding polynomial.
inline FQRSCode build_fqrs(const FieldSpec& spec, std::size_t n, double rate,
                           std::uint32_t m) {
    if (m == 0 || n % m != 0)
        throw std::invalid_argument("build_fqrs: bundle size m must divide n");
    if (!(n < spec.q))
        throw std::invalid_argument("build_fqrs: need n < q for distinct evaluation points");
    if (rate < 0.0 || rate > 1.0)
        throw std::invalid_argument("build_fqrs: rate outside [0,1]");
    const double k2d = 0.5 * (1.0 - rate) * static_cast<double>(n);
    const std::size_t k2 = static_cast<std::size_t>(std::llround(k2d));
    if (std::abs(k2d - static_cast<double>(k2)) > 1e-9)
        throw std::invalid_argument("build_fqrs: dimension (1-R)n/2 = " +
                                    std::to_string(k2d) + " is not an integer");
    const std::size_t k1 = n - k2;
    if (k1 >= n)
        throw std::invalid_argument("build_fqrs: X-side dimension (1+R)n/2 = " +
                                    std::to_string(k1) + " needs k < n");

    GRSSpec g1 = make_grs_spec(spec, n, k1, spec.primitive);
    GRSSpec g2p = make_grs_spec(spec, n, k2, spec.primitive);
    LinearCode c1 = grs_build(g1);
    GRSSpec g2 = grs_dual(g2p);
    LinearCode c2 = grs_build(g2);

    const std::size_t kap = k1 - k2;
    Mat lx(spec, kap, n), lz(spec, kap, n);
    for (std::size_t i = 0; i < kap; ++i) {
        lx.set_row(i, c1.generator.row(k2 + i));
        // dual-side monomials of degree n-k2-1-i pair triangularly with lx
        lz.set_row(i, c2.generator.row(n - k2 - 1 - i));
    }

    FQRSCode out;
    out.outer = g1;
    out.inner_dual = g2p;
    out.fold_m = m;
    out.css = build_css(fold(c1, m, g1), fold(c2, m, g2), std::move(lx), std::move(lz));
    return out;
}

// ---------------------------------------------------------------------------
// random constructions
// ---------------------------------------------------------------------------

/// Random CSS code on n blocks with k logical qudits: C1 spanned by
/// (n+k)/2 uniform independent rows, dual(C2) by the first (n-k)/2 of them.
inline CSSCode sample_random_css(const FieldSpec& spec, std::size_t n, std::size_t k,
                                 std::mt19937_64& rng) {
    if (k > n || (n + k) % 2 != 0)
        throw std::invalid_argument("sample_random_css: need k <= n with n + k even");
    const std::size_t k1 = (n + k) / 2;
    auto pair = sample_nested_pair(spec, n, k1, n - k1, rng);
    return build_css(std::move(pair.first), std::move(pair.second));
}

/// Random self-orthogonal-style pair inside a two-level alphabet: sample a
/// nonzero v in F_Q^s for Q = q^r, let C1 = v-perp, pick a nonzero w in C1
/// and let C2 = w-perp, so dual(C1) = span(v) lies in C2.  The F_Q codes are
/// flattened to F_q length r*s via the relative basis on the X side and its
/// trace-dual on the Z side, which preserves duality of the pair.  Rate of
/// the result is 1 - 2/s.
inline CSSCode sample_qwozencraft(const FieldSpec& sub, std::uint32_t r,
                                  std::size_t s_dim, std::mt19937_64& rng) {
    if (r == 0 || s_dim < 3)
        throw std::invalid_argument("sample_qwozencraft: need r >= 1 and s >= 3");
    const FieldSpec& big = FieldSpec::get(sub.p, sub.m * r);
    SubfieldBridge bridge(sub, big);
    std::uniform_int_distribution<fq> dist(0, big.q - 1);

    for (int attempt = 0; attempt < 64; ++attempt) {
        // v nonzero; basis of v-perp by pivoting on one nonzero coordinate
        std::vector<fq> v(s_dim);
        bool nz = false;
        for (auto& t : v) nz |= ((t = dist(rng)) != 0);
        if (!nz) continue;
        std::size_t piv = 0;
        while (v[piv] == 0) ++piv;
        auto perp_basis = [&](const std::vector<fq>& vec, std::size_t pv) {
            std::vector<std::vector<fq>> rows;
            for (std::size_t i = 0; i < s_dim; ++i) {
                if (i == pv) continue;
                std::vector<fq> row(s_dim, 0);
                row[i] = 1;
                row[pv] = big.neg(big.div(vec[i], vec[pv]));
                rows.push_back(std::move(row));
            }
            return rows;
        };
        const auto b1 = perp_basis(v, piv);

        // w: nonzero combination of the C1 basis
        std::vector<fq> coeff(b1.size());
        nz = false;
        for (auto& t : coeff) nz |= ((t = dist(rng)) != 0);
        if (!nz) continue;
        std::vector<fq> w(s_dim, 0);
        for (std::size_t i = 0; i < b1.size(); ++i)
            for (std::size_t t = 0; t < s_dim; ++t)
                w[t] = big.add(w[t], big.mul(coeff[i], b1[i][t]));
        std::size_t wpiv = 0;
        while (wpiv < s_dim && w[wpiv] == 0) ++wpiv;
        if (wpiv == s_dim) continue;
        const auto b2 = perp_basis(w, wpiv);

        // flatten: F_q basis of the F_Q row space via relative basis
        // multiples; X side in relative coordinates, Z side in trace-dual
        // coordinates so the F_q dot product computes the relative trace
        // of the F_Q pairing
        auto flatten = [&](const std::vector<std::vector<fq>>& rows, bool dual_side) {
            std::vector<std::vector<fq>> out;
            for (const auto& row : rows)
                for (std::uint32_t j = 0; j < r; ++j) {
                    std::vector<fq> unit(r, 0);
                    unit[j] = 1;
                    const fq mult = bridge.unvec(unit);
                    std::vector<fq> flat;
                    flat.reserve(r * s_dim);
                    for (std::size_t t = 0; t < s_dim; ++t) {
                        const fq val = big.mul(mult, row[t]);
                        const auto coords = dual_side ? bridge.vec_dual(val) : bridge.vec(val);
                        flat.insert(flat.end(), coords.begin(), coords.end());
                    }
                    out.push_back(std::move(flat));
                }
            return Mat::from_rows(sub, out);
        };

        try {
            LinearCode c1 = make_linear_code(sub, r * s_dim, 1, flatten(b1, false));
            LinearCode c2 = make_linear_code(sub, r * s_dim, 1, flatten(b2, true));
            return build_css(std::move(c1), std::move(c2));
        } catch (const std::invalid_argument&) {
            continue;  // degenerate draw; resample
        }
    }
    throw std::runtime_error("sample_qwozencraft: no valid draw in 64 attempts");
}

// ---------------------------------------------------------------------------
// exhaustive verification
// ---------------------------------------------------------------------------

struct ClassWitness {
    PauliFrame in_ball;     ///< lightest enumerated member of the class
    std::size_t weight = 0; ///< its blocked weight
};

struct QLDVerification {
    std::size_t radius = 0;     ///< floor(tau * n)
    std::size_t max_count = 0;  ///< largest class count over all syndromes
    bool within = true;         ///< max_count <= ell
    double enumerated = 0;      ///< Paulis visited
    std::map<Syndrome, std::size_t> counts;  ///< stabilizer-distinct classes per syndrome
    Syndrome worst;                          ///< a syndrome attaining max_count
    std::vector<ClassWitness> worst_classes; ///< witnesses for that syndrome
};

/// Exhaustively enumerate every Pauli of blocked weight <= floor(tau*n),
/// bucket by syndrome, and count stabilizer-distinct classes per bucket.
/// Refuses when the enumeration exceeds `work_cap` frames or the state does
/// not pack into machine words.
inline QLDVerification verify_qld(const CSSCode& css, double tau, std::size_t ell,
                                  double work_cap = 5e7) {
    const FieldSpec& f = *css.spec;
    const std::size_t width = css.n * css.ext;
    const std::size_t radius =
        static_cast<std::size_t>(tau * static_cast<double>(css.n) + 1e-9);

    double total = 0;
    for (std::size_t w = 0; w <= radius; ++w)
        total += pauli_weight_stratum_size(f, css.n, css.ext, w);
    if (total > work_cap)
        throw std::runtime_error("verify_qld: about " + std::to_string(total) +
                                 " Paulis at radius " + std::to_string(radius) +
                                 ", over the cap of " + std::to_string(work_cap));
    if (static_cast<double>(width) * std::log2(static_cast<double>(f.q)) > 63.0 ||
        static_cast<double>(css.stab.r()) * std::log2(static_cast<double>(f.p)) > 63.0)
        throw std::runtime_error("verify_qld: state space too wide to pack");

    // packed (syndrome, class) records; syndrome digits base p, class halves
    // base q, all low-digit-first
    const auto pack_syndrome = [&](const std::vector<fq>& x, const std::vector<fq>& z) {
        std::uint64_t acc = 0;
        std::uint64_t scale = 1;
        for (std::size_t i = 0; i < css.c2perp.generator.rows; ++i) {
            const fq d = vec_dot(f, css.c2perp.generator.row(i), z);
            for (std::uint32_t l = 0; l < f.m; ++l) {
                acc += scale * f.trace(f.mul(f.poly_basis_elt(l), d));
                scale *= f.p;
            }
        }
        for (std::size_t i = 0; i < css.c1perp.generator.rows; ++i) {
            const fq d = vec_dot(f, css.c1perp.generator.row(i), x);
            for (std::uint32_t l = 0; l < f.m; ++l) {
                acc += scale * f.trace(f.neg(f.mul(f.poly_basis_elt(l), d)));
                scale *= f.p;
            }
        }
        return acc;
    };
    const auto pack_word = [&](const std::vector<fq>& wv) {
        std::uint64_t acc = 0;
        for (std::size_t i = wv.size(); i-- > 0;) acc = acc * f.q + wv[i];
        return acc;
    };

    QLDVerification rep;
    rep.radius = radius;
    rep.enumerated = total;

    struct Entry {
        std::uint64_t synd, cx, cz;
        bool operator<(const Entry& o) const {
            return std::tie(synd, cx, cz) < std::tie(o.synd, o.cx, o.cz);
        }
        bool operator==(const Entry& o) const {
            return synd == o.synd && cx == o.cx && cz == o.cz;
        }
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(total));
    for (std::size_t w = 0; w <= radius; ++w)
        for_each_pauli_of_weight(
            f, css.n, css.ext, w,
            [&](const std::vector<fq>& x, const std::vector<fq>& z) {
                entries.push_back({pack_syndrome(x, z),
                                   pack_word(rref_reduce(css.x_cosets.sub_rref, x)),
                                   pack_word(rref_reduce(css.z_cosets.sub_rref, z))});
            });
    std::sort(entries.begin(), entries.end());
    entries.erase(std::unique(entries.begin(), entries.end()), entries.end());

    const auto unpack_syndrome = [&](std::uint64_t v) {
        Syndrome s(css.stab.r());
        for (auto& d : s) {
            d = static_cast<fq>(v % f.p);
            v /= f.p;
        }
        return s;
    };
    std::uint64_t worst_packed = 0;
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].synd == entries[i].synd) ++j;
        const std::size_t count = j - i;
        rep.counts[unpack_syndrome(entries[i].synd)] = count;
        if (count > rep.max_count) {
            rep.max_count = count;
            worst_packed = entries[i].synd;
        }
        i = j;
    }
    rep.within = rep.max_count <= ell;
    rep.worst = unpack_syndrome(worst_packed);

    // second sweep: per-class lightest members for the worst syndrome only
    if (rep.max_count > 0) {
        std::map<std::pair<std::uint64_t, std::uint64_t>, ClassWitness> witnesses;
        for (std::size_t w = 0; w <= radius && witnesses.size() < rep.max_count; ++w)
            for_each_pauli_of_weight(
                f, css.n, css.ext, w,
                [&](const std::vector<fq>& x, const std::vector<fq>& z) {
                    if (pack_syndrome(x, z) != worst_packed) return;
                    const auto key =
                        std::make_pair(pack_word(rref_reduce(css.x_cosets.sub_rref, x)),
                                       pack_word(rref_reduce(css.z_cosets.sub_rref, z)));
                    if (witnesses.count(key)) return;  // strata go up in weight
                    ClassWitness cw;
                    cw.in_ball = make_pauli(f, x, z, 0, css.ext);
                    cw.weight = w;
                    witnesses.emplace(key, std::move(cw));
                });
        for (auto& [key, cw] : witnesses) rep.worst_classes.push_back(std::move(cw));
    }
    return rep;
}

}  // namespace aqec
