#pragma once

/**
 * @file cli.hpp
 * @brief Command-line front end: construct / verify / decode / simulate /
 * plan / bound.
 *
 * The entry point is cli_main(args, out, err) so the whole surface can be
 * driven hermetically from tests; tools/aqec_cli.cpp only forwards argv.
 * Exit codes: 0 on success, 1 when a verification check fails, 2 on config
 * or usage errors.
 */

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "aqec/sim.hpp"

namespace aqec {
namespace cli_detail {

namespace fs = std::filesystem;

inline std::string yn(bool b) { return b ? "yes" : "no"; }

inline std::string digits_to_string(const std::vector<fq>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += " ";
        s += std::to_string(v[i]);
    }
    return s;
}

inline std::vector<fq> parse_digits(const std::string& text, const FieldSpec& f,
                                    const std::string& what) {
    std::vector<fq> out;
    for (const std::string& tok : detail::split_ws(text)) {
        const std::uint64_t v = detail::parse_u64(tok, what);
        if (v >= f.q)
            throw ConfigError(what + ": digit " + tok + " is not below " +
                              std::to_string(f.q));
        out.push_back(static_cast<fq>(v));
    }
    return out;
}

/// Peek at the type (and css family) of a code file without consuming it.
inline std::pair<std::string, std::string> sniff(const std::string& path) {
    Config c = Config::load(path);
    return {c.type(), c.get_or("family", "")};
}

inline CSSCode load_any_css(const std::string& path) {
    const auto [type, family] = sniff(path);
    if (type != "css")
        throw ConfigError(path + ": expected a css code file");
    if (family == "fqrs") return load_fqrs(Config::load(path)).css;
    return load_css(Config::load(path));
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

inline int do_construct(const std::string& cfg_path, const std::string& out_dir,
                        std::uint64_t cli_seed, std::ostream& out) {
    Config c = Config::load(cfg_path);
    const std::string type = c.type();
    const std::string name = c.get_or("name", type);
    const fs::path dir = out_dir.empty() ? fs::path(".") : fs::path(out_dir);
    fs::create_directories(dir);

    const auto wrap = [&](auto&& fn) {
        try {
            return fn();
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(c.origin() + ": " + ex.what());
        }
    };

    if (type == "fqrs") {
        const FieldSpec& f = detail::field_from(c);
        const auto n = static_cast<std::size_t>(c.get_u64("n"));
        const double rate = c.get_double("rate");
        const auto m = static_cast<std::uint32_t>(c.get_u64_or("fold", 1));
        c.finish();
        const FQRSCode code = wrap([&] { return build_fqrs(f, n, rate, m); });
        const fs::path main = write_fqrs_files(code, dir, name);
        out << "wrote " << main.string() << "\n"
            << "[[" << code.css.n * code.css.fold_m << ", " << code.css.kappa()
            << "]] over GF(" << f.q << "), fold " << code.fold_m << "\n";
        return 0;
    }

    if (type == "grs" || type == "raw" || type == "folded") {
        const FoldedCode fc = load_classical(c);
        const fs::path file = dir / (name + ".code");
        save_text(file, write_classical_config(fc));
        out << "wrote " << file.string() << "\n"
            << "length " << fc.code.n << ", alphabet GF(" << fc.code.spec->q
            << ")^" << fc.code.ext << ", dimension " << fc.code.k_fq
            << " base symbols\n";
        return 0;
    }

    if (type == "nested-pair") {
        const auto pair = load_nested_pair(c);
        const fs::path file = dir / (name + ".code");
        save_text(file, write_nested_pair_config(pair.first, pair.second));
        out << "wrote " << file.string() << "\n";
        return 0;
    }

    if (type == "stabilizer") {
        const StabilizerCode sc = load_stabilizer(c);
        const fs::path file = dir / (name + ".stab");
        save_text(file, write_stabilizer_config(sc));
        out << "wrote " << file.string() << "\n"
            << sc.n << " blocks, " << sc.generators.size() << " generators, "
            << sc.logical_x.size() << " logical pairs\n";
        return 0;
    }

    if (type == "css") {
        const FoldedCode c1 = load_classical(Config::load(c.resolve(c.get("c1"))));
        const FoldedCode c2 = load_classical(Config::load(c.resolve(c.get("c2"))));
        std::optional<Mat> lx, lz;
        if (c.has("logical_x")) lx = detail::get_mat(c, "logical_x", *c1.code.spec);
        if (c.has("logical_z")) lz = detail::get_mat(c, "logical_z", *c1.code.spec);
        c.finish();
        const CSSCode code =
            wrap([&] { return build_css(c1, c2, std::move(lx), std::move(lz)); });
        const fs::path main = write_css_files(code, dir, name);
        out << "wrote " << main.string() << "\n"
            << "[[" << code.n * code.fold_m << ", " << code.kappa() << "]] over GF("
            << code.spec->q << "), fold " << code.fold_m << "\n";
        return 0;
    }

    if (type == "expander") {
        const auto n = static_cast<std::size_t>(c.get_u64("n"));
        const auto r = static_cast<std::uint32_t>(c.get_u64("r"));
        const std::uint64_t seed = c.get_u64_or("seed", cli_seed);
        const bool has_target = c.has("eps_target");
        const double eps_target = has_target ? c.get_double("eps_target") : 0.0;
        const std::string cert = c.get_or("certificate", "auto");
        const auto attempts = static_cast<int>(c.get_u64_or("attempts", 200));
        c.finish();

        BipartiteGraph g;
        if (has_target) {
            ExpanderCert ec = ExpanderCert::Auto;
            if (cert == "spectral") ec = ExpanderCert::Spectral;
            else if (cert == "exhaustive") ec = ExpanderCert::Exhaustive;
            else if (cert != "auto")
                throw ConfigError(c.origin() +
                                  ": certificate must be auto, spectral or exhaustive");
            const ExpanderResult res = wrap(
                [&] { return build_expander(n, r, eps_target, seed, ec, attempts); });
            g = res.graph;
            out << "certified eps " << detail::format_double(res.eps) << " ("
                << (res.spectral ? "spectral" : "exhaustive") << ", "
                << res.attempts << " attempts)\n";
        } else {
            std::mt19937_64 rng(seed);
            g = wrap([&] { return random_biregular(n, r, rng); });
            out << "uncertified random graph (no eps_target given)\n";
        }
        const fs::path file = dir / (name + ".graph");
        save_text(file, write_graph_config(g));
        out << "wrote " << file.string() << "\n";
        return 0;
    }

    if (type == "ptc") {
        const FieldSpec& f = detail::field_from(c);
        const auto n = static_cast<std::size_t>(c.get_u64("n"));
        const auto lambda = static_cast<std::uint32_t>(c.get_u64("lambda"));
        const std::string mode = c.get("mode");
        PTCFamily fam;
        if (mode == "explicit") {
            c.finish();
            fam = wrap([&] { return build_ptc_explicit(f, n, lambda); });
        } else if (mode == "random") {
            const auto keys = static_cast<std::size_t>(c.get_u64("keys"));
            const double eps_target = c.get_double("eps_target");
            const std::uint64_t seed = c.get_u64_or("seed", cli_seed);
            const auto tries = static_cast<int>(c.get_u64_or("max_tries", 32));
            c.finish();
            std::mt19937_64 rng(seed);
            const PTCBuildResult res = wrap([&] {
                return build_ptc_random(f, n, lambda, keys, eps_target, rng, tries);
            });
            if (!res.ok) {
                out << "no family met eps <= " << detail::format_double(eps_target)
                    << " within " << tries << " tries\n";
                return 1;
            }
            out << "accepted after " << res.tries << " tries\n";
            fam = res.family;
        } else {
            throw ConfigError(c.origin() + ": mode must be explicit or random");
        }
        const fs::path file = dir / (name + ".ptc");
        save_text(file, write_ptc_config(fam));
        out << "wrote " << file.string() << "\n"
            << fam.key_count() << " keys, eps " << fam.eps_num << "/" << fam.eps_den
            << (fam.eps_exhaustive ? " (exhaustive)" : " (bound)")
            << ", analytic target " << detail::format_double(fam.analytic_target())
            << "\n";
        return 0;
    }

    if (type == "rss") {
        const RSSScheme sch = load_rss(c);
        const fs::path file = dir / (name + ".rss");
        save_text(file, write_rss_config(sch));
        out << "wrote " << file.string() << "\n"
            << sch.n << " parties, threshold " << sch.d << ", secret " << sch.s
            << " symbols, share width " << sch.share_width() << ", capacity 2^"
            << detail::format_double(sch.log2_capacity()) << ", eps "
            << detail::format_double(sch.analytic_eps()) << "\n";
        return 0;
    }

    if (type == "ael") {
        const AELCode ael = load_ael(c);
        const fs::path main = write_ael_files(ael, dir, name);
        out << "wrote " << main.string() << "\n"
            << ael.n_out() << " blocks of " << ael.graph.r
            << " symbols, distance fraction "
            << detail::format_double(ael.distance_fraction)
            << ", unique-decoding fraction "
            << detail::format_double(ael.unique_fraction) << "\n";
        return 0;
    }

    throw ConfigError(c.origin() + ": unknown construct type '" + type + "'");
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline std::size_t brute_min_blocked_weight(const LinearCode& code) {
    double words = 1;
    for (std::size_t i = 0; i < code.k_fq; ++i) words *= code.spec->q;
    if (words > 2e6)
        throw std::runtime_error("distance: " + std::to_string(words) +
                                 " codewords is over the exact-check budget");
    const std::vector<fq> zero(code.width(), 0);
    std::size_t best = code.n + 1;
    for_each_in_rowspace(code.generator, [&](const std::vector<fq>& w) {
        if (vec_is_zero(w)) return;
        best = std::min(best, blocked_distance(w, zero, code.ext));
    });
    return best;
}

inline int verify_distance(const std::string& path, std::ostream& out) {
    const auto [type, family] = sniff(path);
    if (type == "grs" || type == "raw" || type == "folded") {
        const FoldedCode fc = load_classical(Config::load(path));
        const std::size_t d = brute_min_blocked_weight(fc.code);
        out << "distance: " << d << "\n";
        if (fc.grs && fc.fold_m == 1) {
            const std::size_t expected = fc.code.n - fc.grs->k + 1;
            out << "evaluation-code target n-k+1: " << expected << "\n"
                << "ok: " << yn(d == expected) << "\n";
            return d == expected ? 0 : 1;
        }
        return 0;
    }
    if (type == "css") {
        std::size_t claimed = 0;
        CSSCode css;
        if (family == "fqrs") {
            const FQRSCode code = load_fqrs(Config::load(path));
            css = code.css;
            if (css.fold_m == 1 && css.ext == 1)
                claimed = css.n - css.c1.code.k_fq + 1;
        } else {
            css = load_css(Config::load(path));
        }
        const std::size_t d = css_distance(css);
        out << "distance: " << d << "\n";
        if (claimed) {
            out << "evaluation-code target n-k1+1: " << claimed << "\n"
                << "ok: " << yn(d == claimed) << "\n";
            return d == claimed ? 0 : 1;
        }
        return 0;
    }
    throw ConfigError(path + ": distance check supports classical and css files");
}

/// Enumerate every error up to the radius, count stabilizer-distinct
/// classes per syndrome, and check that the list decoder surfaces at least
/// those classes on each populated syndrome.  `ell`, when nonzero, gates
/// the maximum acceptable list size.
inline int verify_list_sizes(const std::string& path, double tau, std::size_t ell,
                             std::ostream& out) {
    if (tau <= 0.0) throw ConfigError("qld check needs --tau > 0");
    const CSSCode css = load_any_css(path);
    QLDVerification rep;
    try {
        rep = verify_qld(css, tau,
                         ell ? ell : std::numeric_limits<std::size_t>::max());
    } catch (const std::runtime_error& ex) {
        throw ConfigError(std::string("qld check: ") + ex.what());
    }

    std::map<std::size_t, std::size_t> histogram;  // class count -> #syndromes
    for (const auto& [s, count] : rep.counts) ++histogram[count];
    out << "radius: " << rep.radius << " ("
        << static_cast<std::uint64_t>(rep.enumerated) << " errors enumerated)\n"
        << "populated syndromes: " << rep.counts.size() << "\n";
    for (const auto& [size, count] : histogram)
        out << "list size " << size << ": " << count << " syndromes\n";
    out << "max classes per syndrome: " << rep.max_count << "\n";

    std::size_t missed = 0, max_dedup = 0, max_raw = 0;
    for (const auto& [s, count] : rep.counts) {
        const QLDResult res = qld_decode(css, s, tau);
        max_dedup = std::max(max_dedup, res.deduplicated);
        max_raw = std::max(max_raw, res.raw_pairs);
        if (res.deduplicated < count) ++missed;
    }
    out << "decoder max list: " << max_dedup << " (from " << max_raw
        << " classical pairs)\n"
        << "decoder covers every enumerated class: " << yn(missed == 0) << "\n";
    const bool ok = missed == 0 && (ell == 0 || rep.within);
    if (ell) out << "list size within " << ell << ": " << yn(rep.within) << "\n";
    out << "ok: " << yn(ok) << "\n";
    return ok ? 0 : 1;
}

inline int verify_pseudorandomness(const std::string& path, double eps,
                                   std::size_t samples, std::ostream& out) {
    if (eps <= 0.0) throw ConfigError("pseudorandomness check needs --eps > 0");
    const BipartiteGraph g = load_graph(Config::load(path));
    const std::size_t use_samples = g.n <= 12 ? 0 : (samples ? samples : 20000);
    const PseudorandomReport rep = check_pseudorandom(g, eps, use_samples);
    out << "eps measured: " << detail::format_double(rep.eps_measured) << " ("
        << (rep.exhaustive ? "exhaustive" : "sampled lower bound") << ")\n"
        << "ok: " << yn(rep.ok) << "\n";
    if (!rep.ok)
        out << "witness |S| = " << rep.worst_s.size() << ", |T| = "
            << rep.worst_t.size() << "\n";
    return rep.ok ? 0 : 1;
}

inline int verify_ptc_eps(const std::string& path, std::ostream& out) {
    const PTCFamily fam = load_ptc(Config::load(path));
    const auto [worst, keys] = ptc_measure_eps(fam);
    const double measured = static_cast<double>(worst) / static_cast<double>(keys);
    const double target = fam.analytic_target();
    const bool ok = measured <= target + 1e-12;
    out << "measured eps: " << worst << "/" << keys << " = "
        << detail::format_double(measured) << "\n"
        << "analytic target: " << detail::format_double(target) << "\n"
        << "stored eps: " << fam.eps_num << "/" << fam.eps_den << "\n"
        << "ok: " << yn(ok) << "\n";
    return ok ? 0 : 1;
}

/// Exact privacy check: for every subset of d parties, the joint view
/// distribution is enumerated over exactly the randomness symbols that can
/// reach it, for each candidate secret, and the histograms are compared for
/// bitwise equality.  Refuses (exit 2) when the enumeration exceeds `cap`.
inline int verify_rss_privacy(const std::string& path, double cap,
                              std::ostream& out) {
    const RSSScheme sch = load_rss(Config::load(path));
    const FieldSpec& f = *sch.field;
    const std::size_t n = sch.n, d = sch.d, s = sch.s;

    // candidate secrets: all of them when few, else two distinguished ones
    std::vector<std::vector<fq>> secrets;
    double total_secrets = 1;
    for (std::size_t i = 0; i < s; ++i) total_secrets *= f.q;
    if (total_secrets <= 16) {
        std::vector<fq> sec(s, 0);
        for (;;) {
            secrets.push_back(sec);
            std::size_t i = 0;
            for (; i < s; ++i) {
                if (++sec[i] != f.q) break;
                sec[i] = 0;
            }
            if (i == s) break;
        }
    } else {
        secrets.emplace_back(s, 0);
        secrets.emplace_back(s, 1);
    }

    // subsets of size exactly d (marginals of smaller subsets factor through)
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<std::size_t> pick(d);
    for (std::size_t i = 0; i < d; ++i) pick[i] = i;
    for (;;) {
        subsets.push_back(pick);
        std::size_t i = d;
        while (i-- > 0) {
            if (pick[i] + (d - i) < n + 0) {
                ++pick[i];
                for (std::size_t j = i + 1; j < d; ++j) pick[j] = pick[j - 1] + 1;
                break;
            }
            if (i == 0) { i = SIZE_MAX; break; }
        }
        if (i == SIZE_MAX) break;
    }

    for (const auto& A : subsets) {
        std::vector<char> in_a(n, 0);
        for (std::size_t i : A) in_a[i] = 1;

        // randomness positions that can influence the view of A: all the
        // polynomial coefficients, A's own key rows, and every outsider's
        // key toward a member of A (it feeds that member's stored tag)
        std::vector<std::size_t> rel;
        for (std::size_t t = 0; t < s * d; ++t) rel.push_back(t);
        std::size_t rpos = s * d;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                if (in_a[i] || in_a[j]) {
                    rel.push_back(rpos);
                    rel.push_back(rpos + 1);
                }
                rpos += 2;
            }

        double views = 1;
        for (std::size_t i = 0; i < rel.size(); ++i) views *= f.q;
        if (views > cap)
            throw ConfigError("rss-privacy: " + std::to_string(views) +
                              " assignments per secret is over the cap of " +
                              std::to_string(cap));

        std::vector<std::unordered_map<std::string, std::uint64_t>> hists(
            secrets.size());
        for (std::size_t si = 0; si < secrets.size(); ++si) {
            std::vector<fq> randomness(sch.randomness_width(), 0);
            for (;;) {
                const auto shares = rss_share(sch, secrets[si], randomness);
                std::string view;
                for (std::size_t i : A) {
                    for (fq v : shares[i].v) view += std::to_string(v) + ",";
                    for (std::size_t j = 0; j < n; ++j) {
                        if (j == i) continue;
                        view += std::to_string(shares[i].keys[j].first) + "," +
                                std::to_string(shares[i].keys[j].second) + "," +
                                std::to_string(shares[i].tags[j]) + ",";
                    }
                    view += ";";
                }
                ++hists[si][view];
                std::size_t i = 0;
                for (; i < rel.size(); ++i) {
                    if (++randomness[rel[i]] != f.q) break;
                    randomness[rel[i]] = 0;
                }
                if (i == rel.size()) break;
            }
        }
        for (std::size_t si = 1; si < secrets.size(); ++si)
            if (hists[si] != hists[0]) {
                out << "subset {";
                for (std::size_t i = 0; i < A.size(); ++i)
                    out << (i ? " " : "") << A[i];
                out << "}: view distributions differ between secrets\n"
                    << "ok: no\n";
                return 1;
            }
        out << "subset {";
        for (std::size_t i = 0; i < A.size(); ++i) out << (i ? " " : "") << A[i];
        out << "}: " << hists[0].size() << " distinct views, "
            << secrets.size() << " identical histograms over "
            << static_cast<std::uint64_t>(views) << " assignments\n";
    }
    out << "ok: yes\n";
    return 0;
}

inline int do_verify(const std::string& path, const std::string& check, double tau,
                     std::size_t ell, double eps, std::size_t samples, double cap,
                     std::ostream& out) {
    if (check == "distance") return verify_distance(path, out);
    if (check == "qld") return verify_list_sizes(path, tau, ell, out);
    if (check == "pseudorandomness")
        return verify_pseudorandomness(path, eps, samples, out);
    if (check == "ptc-eps") return verify_ptc_eps(path, out);
    if (check == "rss-privacy") return verify_rss_privacy(path, cap, out);
    throw ConfigError("unknown check '" + check + "'");
}

// ---------------------------------------------------------------------------
// decode
// ---------------------------------------------------------------------------

inline int do_decode(const std::string& path, const std::string& received,
                     const std::string& syndrome, std::size_t radius, double tau,
                     const std::string& mode_name, std::ostream& out) {
    const auto [type, family] = sniff(path);
    const DecodeMode mode =
        mode_name == "algebraic" ? DecodeMode::Algebraic : DecodeMode::BruteForce;

    if (type == "grs" || type == "raw" || type == "folded") {
        if (received.empty())
            throw ConfigError("classical decode needs --received");
        const FoldedCode fc = load_classical(Config::load(path));
        const std::vector<fq> word = parse_digits(received, *fc.code.spec, "received");
        if (word.size() != fc.code.width())
            throw ConfigError("received: expected " + std::to_string(fc.code.width()) +
                              " digits");
        UniqueDecodeResult res;
        try {
            res = unique_decode(fc, word, radius, mode);
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(std::string("decode: ") + ex.what());
        }
        if (!res.codeword) {
            out << "no codeword within radius " << radius << "\n";
        } else if (res.ambiguous) {
            out << "ambiguous at radius " << radius << "\n";
        } else {
            out << "codeword: " << digits_to_string(*res.codeword) << "\n";
        }
        return 0;
    }

    if (type == "css") {
        if (syndrome.empty()) throw ConfigError("css decode needs --syndrome");
        if (tau <= 0.0) throw ConfigError("css decode needs --tau > 0");
        const CSSCode css = load_any_css(path);
        const std::vector<fq> s = parse_digits(syndrome, *css.spec, "syndrome");
        const std::size_t r = css_syndrome(css, std::vector<fq>(css.n * css.ext, 0),
                                           std::vector<fq>(css.n * css.ext, 0))
                                  .size();
        if (s.size() != r)
            throw ConfigError("syndrome: expected " + std::to_string(r) + " digits");
        const QLDResult res = qld_decode(css, s, tau, mode);
        out << "classes: " << res.deduplicated << " (from " << res.raw_pairs
            << " classical pairs)\n";
        for (const PauliFrame& e : res.list) out << format_pauli(e) << "\n";
        return 0;
    }

    throw ConfigError(path + ": decode supports classical and css files");
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

inline int do_simulate(const std::string& cfg_path, const std::string& out_dir,
                       const std::string& format, bool seed_given,
                       std::uint64_t cli_seed, bool trials_given,
                       std::size_t cli_trials, unsigned threads,
                       std::ostream& out) {
    Config c = Config::load(cfg_path);
    const std::string run = c.get("run");
    const std::size_t trials =
        trials_given ? cli_trials
                     : static_cast<std::size_t>(c.get_u64_or("trials", 0));
    const std::uint64_t master =
        seed_given ? cli_seed : c.get_u64_or("seed", 0);

    const auto wrap = [&](auto&& fn) {
        try {
            return fn();
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(c.origin() + ": " + ex.what());
        }
    };

    ResultsTable rt;
    if (run == "private" || run == "aqecc") {
        const CSSCode css = load_any_css(c.resolve(c.get("code")));
        const PTCFamily ptc = load_ptc(Config::load(c.resolve(c.get("ptc"))));
        const double delta = c.get_double("delta");
        const bool strict = c.get_flag_or("strict", false);
        const AdversaryModel adv = adversary_from_config(c, css.n);
        if (run == "private") {
            c.finish();
            const PrivateAQECC pa =
                wrap([&] { return make_private_aqecc(css, ptc, delta); });
            rt = run_private_trials(pa, adv, trials, master, strict, threads);
        } else {
            const RSSScheme rss = load_rss(Config::load(c.resolve(c.get("rss"))));
            c.finish();
            if (strict)
                throw ConfigError(c.origin() +
                                  ": strict applies to the private layer only");
            PrivateAQECC pa = wrap([&] { return make_private_aqecc(css, ptc, delta); });
            const AQECC ac = wrap([&] { return build_aqecc(std::move(pa), rss); });
            rt = run_aqecc_trials(ac, adv, trials, master, threads);
        }
    } else if (run == "direct") {
        const CSSCode inner_css = load_any_css(c.resolve(c.get("inner")));
        const PTCFamily ptc = load_ptc(Config::load(c.resolve(c.get("inner_ptc"))));
        const double inner_delta = c.get_double("inner_delta");
        const FQRSCode outer = load_fqrs(Config::load(c.resolve(c.get("outer"))));
        const BipartiteGraph graph = load_graph(Config::load(c.resolve(c.get("graph"))));
        const bool full = c.get_flag_or("full", false);
        PrivateAQECC pa =
            wrap([&] { return make_private_aqecc(inner_css, ptc, inner_delta); });
        const DirectAQECC dc =
            wrap([&] { return build_direct_aqecc(std::move(pa), outer, graph); });
        const AdversaryModel adv = adversary_from_config(c, dc.qudits());
        c.finish();
        rt = run_direct_trials(dc, adv, trials, master, full, threads);
    } else if (run == "ael") {
        const AELCode ael = load_ael(Config::load(c.resolve(c.get("ael"))));
        const double alpha_in = c.get_double("alpha_in");
        const double alpha_out = c.get_double("alpha_out");
        const AdversaryModel adv = adversary_from_config(c, ael.graph.n);
        c.finish();
        rt = run_ael_trials(ael, adv, trials, master, alpha_in, alpha_out, threads);
    } else {
        throw ConfigError(c.origin() + ": run must be private, aqecc, direct or ael");
    }

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        save_text(fs::path(out_dir) / "results.csv", rt.to_csv());
        save_text(fs::path(out_dir) / "summary.json",
                  rt.summary_json().dump(2) + "\n");
    }
    if (format == "csv")
        out << rt.to_csv();
    else
        out << rt.summary_json().dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// plan / bound
// ---------------------------------------------------------------------------

inline int do_plan(double rate, double gamma, double cf, double cq,
                   std::ostream& out) {
    ParameterPlan p;
    try {
        p = plan_parameters(rate, gamma, cf, cq);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("plan: ") + ex.what());
    }
    const auto d = [&](double v) { return detail::format_double(v); };
    out << "rate target:        " << d(p.rate_target) << "\n"
        << "gamma:              " << d(p.gamma) << "\n"
        << "inner gap gamma'':  " << d(p.gamma2) << "\n"
        << "graph gap gamma':   " << d(p.gamma1) << "\n"
        << "outer rate R':      " << d(p.outer_rate) << "\n"
        << "degree fraction:    " << d(p.degree_fraction) << "\n"
        << "log2 q:             " << d(p.log2_q) << "\n"
        << "log2 a:             " << d(p.log2_a) << "\n"
        << "log2 q':            " << d(p.log2_qprime) << "\n"
        << "lambda per block:   " << d(p.lambda_per_n) << "\n"
        << "decode radius:      " << d(p.radius)
        << (p.radius_clamped ? " (clamped)" : "") << "\n"
        << "feasible:           " << yn(p.feasible) << "\n";
    return 0;
}

inline int do_bound(std::size_t n, std::size_t k, double q, double delta,
                    double eps, std::ostream& out) {
    SingletonReport rep;
    try {
        rep = singleton_check(n, k, q, delta, eps);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(std::string("bound: ") + ex.what());
    }
    out << "adversarial distance d: " << rep.d << "\n"
        << "capacity ceiling on k:  " << detail::format_double(rep.bound) << "\n"
        << "slack:                  " << detail::format_double(rep.slack) << "\n"
        << "ok: " << yn(rep.ok) << "\n";
    return rep.ok ? 0 : 1;
}

}  // namespace cli_detail

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline int cli_main(std::vector<std::string> args, std::ostream& out,
                    std::ostream& err) {
    CLI::App app{"arbitrarily-varying quantum code toolkit"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out_dir;
    std::string format = "json";
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker threads (never changes results)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "stdout shape for tables")
        ->check(CLI::IsMember({"csv", "json"}));

    std::string cfg_path, code_path, check, received, syndrome, mode_name = "brute";
    double tau = 0.0, eps = 0.0, cap = 4e6;
    std::size_t ell = 0;
    std::size_t radius = 0, samples = 0, cli_trials = 0;
    double rate = 0.0, gamma = 0.0, cf = 1.0, cq = 1.0;
    std::size_t bn = 0, bk = 0;
    double bq = 0.0, bdelta = 0.0, beps = 0.0;

    CLI::App* construct = app.add_subcommand("construct", "build a code or helper object from a config");
    construct->fallthrough();
    construct->add_option("--config", cfg_path, "construction config")->required();

    CLI::App* verify = app.add_subcommand("verify", "run a verification oracle on a code file");
    verify->fallthrough();
    verify->add_option("--code", code_path, "code file")->required();
    verify->add_option("--check", check, "what to verify")
        ->required()
        ->check(CLI::IsMember(
            {"distance", "qld", "pseudorandomness", "ptc-eps", "rss-privacy"}));
    verify->add_option("--tau", tau, "relative list-decoding radius");
    verify->add_option("--ell", ell, "acceptable list-size ceiling");
    verify->add_option("--eps", eps, "pseudorandomness target");
    verify->add_option("--samples", samples, "sampled pairs for large graphs");
    verify->add_option("--cap", cap, "enumeration budget");

    CLI::App* decode = app.add_subcommand("decode", "one-shot decode of a word or syndrome");
    decode->fallthrough();
    decode->add_option("--code", code_path, "code file")->required();
    decode->add_option("--received", received, "received word digits");
    decode->add_option("--syndrome", syndrome, "syndrome digits");
    decode->add_option("--radius", radius, "decoding radius (blocks)");
    decode->add_option("--tau", tau, "relative list radius");
    decode->add_option("--mode", mode_name, "decoder engine")
        ->check(CLI::IsMember({"brute", "algebraic"}));

    CLI::App* simulate = app.add_subcommand("simulate", "run adversarial decode trials from a pipeline config");
    simulate->fallthrough();
    simulate->add_option("--config", cfg_path, "pipeline config")->required();
    auto* trials_opt = simulate->add_option("--trials", cli_trials, "trial count override");

    CLI::App* plan = app.add_subcommand("plan", "print the parameter bundle for a rate/gap target");
    plan->fallthrough();
    plan->add_option("--rate", rate, "target rate")->required();
    plan->add_option("--gamma", gamma, "rate gap")->required();
    plan->add_option("--cf", cf, "field-size constant");
    plan->add_option("--cq", cq, "alphabet constant");

    CLI::App* bound = app.add_subcommand("bound", "evaluate the capacity ceiling for given parameters");
    bound->fallthrough();
    bound->add_option("--n", bn, "length")->required();
    bound->add_option("--k", bk, "dimension")->required();
    bound->add_option("--q", bq, "alphabet size")->required();
    bound->add_option("--delta", bdelta, "error fraction")->required();
    bound->add_option("--eps", beps, "capacity slack");

    std::vector<const char*> argv;
    argv.push_back("aqec");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (construct->parsed())
            return cli_detail::do_construct(cfg_path, out_dir, seed, out);
        if (verify->parsed())
            return cli_detail::do_verify(code_path, check, tau, ell, eps, samples,
                                         cap, out);
        if (decode->parsed())
            return cli_detail::do_decode(code_path, received, syndrome, radius, tau,
                                         mode_name, out);
        if (simulate->parsed())
            return cli_detail::do_simulate(cfg_path, out_dir, format,
                                           seed_opt->count() > 0, seed,
                                           trials_opt->count() > 0, cli_trials,
                                           threads, out);
        if (plan->parsed()) return cli_detail::do_plan(rate, gamma, cf, cq, out);
        if (bound->parsed())
            return cli_detail::do_bound(bn, bk, bq, bdelta, beps, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "no subcommand\n";
    return 2;
}

}  // namespace aqec
