#pragma once

/**
 * @file sim.hpp
 * @brief Adversary models, Monte-Carlo and exhaustive trial runners, and
 * result tables with confidence intervals.
 *
 * Determinism contract: every trial derives its own generator seed from the
 * master seed and the trial counter, so results are identical for any thread
 * count and bitwise reproducible across runs.  Exhaustive modes enumerate
 * instead of sampling and report exact fractions.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "aqec/io.hpp"

namespace aqec {

// ---------------------------------------------------------------------------
// seeding, digests, intervals
// ---------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based per-trial seed: a pure function of (master, trial), never
/// of scheduling, so the thread count cannot change any result.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(master ^ splitmix64(trial + 1));
}

inline std::uint64_t fnv1a64(const std::vector<fq>& v) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (fq x : v)
        for (int b = 0; b < 4; ++b) {
            h ^= (x >> (8 * b)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    return h;
}

/// Wilson score interval at 95% for k failures out of n; {0, 1} when n = 0.
inline std::pair<double, double> wilson95(std::uint64_t k, std::uint64_t n) {
    if (n == 0) return {0.0, 1.0};
    const double z = 1.959963984540054;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(k) / nn;
    const double denom = 1.0 + z * z / nn;
    const double center = phat + z * z / (2.0 * nn);
    const double spread =
        z * std::sqrt(phat * (1.0 - phat) / nn + z * z / (4.0 * nn * nn));
    return {std::max(0.0, (center - spread) / denom),
            std::min(1.0, (center + spread) / denom)};
}

// ---------------------------------------------------------------------------
// adversary models
// ---------------------------------------------------------------------------

enum class SupportModel { RandomSubset, Fixed, ExhaustiveSweep };
enum class ErrorModel { UniformPauliOnSupport, Exhaustive, Burst };

/// Who corrupts what: a support rule, a value rule on that support, and a
/// weight cap.  Every emitted error touches at most weight_budget positions,
/// all inside the chosen support.
struct AdversaryModel {
    SupportModel support = SupportModel::RandomSubset;
    ErrorModel error = ErrorModel::UniformPauliOnSupport;
    std::size_t weight_budget = 0;
    std::vector<std::uint32_t> fixed_support;  ///< SupportModel::Fixed only
    /// Corrupt only the sharing layer (identity on the Pauli layer); used to
    /// isolate key-transport robustness in the composed scheme.
    bool share_only = false;

    bool exhaustive() const {
        return support == SupportModel::ExhaustiveSweep || error == ErrorModel::Exhaustive;
    }
};

inline const char* support_name(SupportModel s) {
    switch (s) {
        case SupportModel::RandomSubset: return "random-subset";
        case SupportModel::Fixed: return "fixed";
        default: return "exhaustive-sweep";
    }
}
inline const char* error_name(ErrorModel e) {
    switch (e) {
        case ErrorModel::UniformPauliOnSupport: return "uniform-pauli-on-support";
        case ErrorModel::Exhaustive: return "exhaustive";
        default: return "burst";
    }
}

inline void validate_adversary(const AdversaryModel& adv, std::size_t n) {
    if (adv.weight_budget > n)
        throw std::invalid_argument("adversary: weight budget exceeds the length");
    if (adv.support == SupportModel::Fixed) {
        if (adv.fixed_support.size() > adv.weight_budget)
            throw std::invalid_argument("adversary: fixed support exceeds the budget");
        std::vector<std::uint32_t> s = adv.fixed_support;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw std::invalid_argument("adversary: fixed support repeats a position");
        if (!s.empty() && s.back() >= n)
            throw std::invalid_argument("adversary: fixed support out of range");
    }
}

/// Read the adversary block of a pipeline config: `adversary_support`,
/// `adversary_error`, `delta` (budget = floor(delta * n)), and optionally
/// `fixed_support` and `share_only`.
inline AdversaryModel adversary_from_config(const Config& c, std::size_t n) {
    AdversaryModel adv;
    const std::string sup = c.get_or("adversary_support", "random-subset");
    if (sup == "random-subset") adv.support = SupportModel::RandomSubset;
    else if (sup == "fixed") adv.support = SupportModel::Fixed;
    else if (sup == "exhaustive-sweep") adv.support = SupportModel::ExhaustiveSweep;
    else throw ConfigError(c.origin() + ": unknown adversary_support '" + sup + "'");

    const std::string err = c.get_or("adversary_error", "uniform-pauli-on-support");
    if (err == "uniform-pauli-on-support") adv.error = ErrorModel::UniformPauliOnSupport;
    else if (err == "exhaustive") adv.error = ErrorModel::Exhaustive;
    else if (err == "burst") adv.error = ErrorModel::Burst;
    else throw ConfigError(c.origin() + ": unknown adversary_error '" + err + "'");

    const double delta = c.get_double("delta");
    if (delta < 0.0 || delta > 1.0)
        throw ConfigError(c.origin() + ": delta must lie in [0, 1]");
    adv.weight_budget = static_cast<std::size_t>(delta * static_cast<double>(n) + 1e-9);

    if (c.has("fixed_support")) {
        for (std::uint64_t v : c.get_ints("fixed_support"))
            adv.fixed_support.push_back(static_cast<std::uint32_t>(v));
    }
    adv.share_only = c.get_flag_or("share_only", false);
    try {
        validate_adversary(adv, n);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
    return adv;
}

namespace detail {

inline std::vector<std::uint32_t> sample_support(const AdversaryModel& adv,
                                                 std::size_t n,
                                                 std::mt19937_64& rng) {
    if (adv.support == SupportModel::Fixed) return adv.fixed_support;
    if (adv.weight_budget == 0) return {};
    std::vector<std::uint32_t> out;
    if (adv.error == ErrorModel::Burst) {
        std::uniform_int_distribution<std::size_t> dstart(0, n - adv.weight_budget);
        const std::size_t start = dstart(rng);
        for (std::size_t i = 0; i < adv.weight_budget; ++i)
            out.push_back(static_cast<std::uint32_t>(start + i));
        return out;
    }
    std::uniform_int_distribution<std::size_t> dpos(0, n - 1);
    std::vector<std::uint8_t> used(n, 0);
    while (out.size() < adv.weight_budget) {
        const std::size_t p = dpos(rng);
        if (!used[p]) {
            used[p] = 1;
            out.push_back(static_cast<std::uint32_t>(p));
        }
    }
    return out;
}

/// Uniform (x, z) pair on each support position -- the identity included,
/// so the realized weight can undershoot the budget but never exceed it.
inline std::size_t fill_uniform_pauli(const FieldSpec& f,
                                      const std::vector<std::uint32_t>& support,
                                      std::vector<fq>& x, std::vector<fq>& z,
                                      std::mt19937_64& rng) {
    std::uniform_int_distribution<fq> dsym(0, f.q - 1);
    std::size_t w = 0;
    for (std::uint32_t p : support) {
        x[p] = dsym(rng);
        z[p] = dsym(rng);
        if (x[p] != 0 || z[p] != 0) ++w;
    }
    return w;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// trial records and result tables
// ---------------------------------------------------------------------------

enum class TrialOutcome { Success, Miscorrect, Reject };

inline const char* outcome_name(TrialOutcome o) {
    switch (o) {
        case TrialOutcome::Success: return "success";
        case TrialOutcome::Miscorrect: return "miscorrect";
        default: return "reject";
    }
}

struct TrialRecord {
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t weight = 0;
    std::vector<std::uint32_t> support;
    std::uint64_t key = 0;
    std::uint64_t syndrome_digest = 0;  ///< plain stabilizer syndrome
    std::uint64_t keyed_digest = 0;     ///< key-dependent row syndrome
    TrialOutcome outcome = TrialOutcome::Success;
    std::int64_t aux = 0;   ///< runner-specific counter (see each runner)
    std::int64_t aux2 = 0;  ///< second runner-specific counter
};

/// One row per trial plus exact aggregate counters.  For exhaustive sweeps a
/// "trial" is one error pattern and the failure fraction counts (error, key)
/// pairs, so the reported rate is the key-averaged failure, exactly.
struct ResultsTable {
    std::uint64_t master_seed = 0;
    bool exhaustive = false;

    std::vector<TrialRecord> rows;
    std::uint64_t successes = 0, miscorrects = 0, rejects = 0;

    std::uint64_t fail_num = 0, fail_den = 0;    ///< merged miscorrect + reject
    std::uint64_t worst_num = 0, worst_den = 1;  ///< exhaustive: max per-error

    double analytic_bound = 1.0;  ///< target for the merged failure rate
    std::string bound_label;
    nlohmann::json extra;  ///< runner-specific diagnostics

    std::size_t trials() const { return rows.size(); }
    double failure_rate() const {
        return fail_den ? static_cast<double>(fail_num) / static_cast<double>(fail_den)
                        : 0.0;
    }
    std::pair<double, double> wilson() const { return wilson95(fail_num, fail_den); }

    /// Exhaustive tables must meet the bound exactly; sampled tables pass
    /// when the bound is not refuted at 95% (interval low end at or below).
    bool bound_ok() const {
        if (exhaustive) return failure_rate() <= analytic_bound;
        return wilson().first <= analytic_bound + 1e-12;
    }

    std::string to_csv() const {
        std::string out = "trial,seed,weight,support,key,syndrome,keyed_syndrome,"
                          "outcome,aux,aux2\n";
        char hex[17];
        for (const TrialRecord& r : rows) {
            out += std::to_string(r.trial) + "," + std::to_string(r.seed) + "," +
                   std::to_string(r.weight) + ",";
            if (r.support.empty()) {
                out += "-";
            } else {
                for (std::size_t i = 0; i < r.support.size(); ++i) {
                    if (i) out += "+";
                    out += std::to_string(r.support[i]);
                }
            }
            std::snprintf(hex, sizeof hex, "%016llx",
                          static_cast<unsigned long long>(r.syndrome_digest));
            out += "," + std::to_string(r.key) + "," + hex;
            std::snprintf(hex, sizeof hex, "%016llx",
                          static_cast<unsigned long long>(r.keyed_digest));
            out += std::string(",") + hex + "," + outcome_name(r.outcome) + "," +
                   std::to_string(r.aux) + "," + std::to_string(r.aux2) + "\n";
        }
        return out;
    }

    nlohmann::json summary_json() const {
        nlohmann::json j;
        j["schema"] = 1;
        j["kind"] = "results-summary";
        j["master_seed"] = master_seed;
        j["exhaustive"] = exhaustive;
        j["trials"] = trials();
        j["outcomes"] = {{"success", successes},
                         {"miscorrect", miscorrects},
                         {"reject", rejects}};
        j["failure"] = {{"count", fail_num},
                        {"denominator", fail_den},
                        {"rate", failure_rate()}};
        const auto [lo, hi] = wilson();
        j["wilson95"] = {{"low", lo}, {"high", hi}};
        j["bound"] = {{"value", analytic_bound},
                      {"label", bound_label},
                      {"ok", bound_ok()}};
        if (exhaustive)
            j["worst_case"] = {{"count", worst_num},
                               {"denominator", worst_den},
                               {"rate", static_cast<double>(worst_num) /
                                            static_cast<double>(worst_den)}};
        if (!extra.is_null()) j["diagnostics"] = extra;
        return j;
    }
};

namespace detail {

inline void tally(ResultsTable& rt) {
    rt.successes = rt.miscorrects = rt.rejects = 0;
    for (const TrialRecord& r : rt.rows) {
        if (r.outcome == TrialOutcome::Success) ++rt.successes;
        else if (r.outcome == TrialOutcome::Miscorrect) ++rt.miscorrects;
        else ++rt.rejects;
    }
    if (!rt.exhaustive) {
        rt.fail_num = rt.miscorrects + rt.rejects;
        rt.fail_den = rt.rows.size();
    }
}

/// Run fn(t) for t in [0, trials) with results written to rows[t]; worker w
/// takes the trials congruent to w, so partitioning never affects content.
template <typename Fn>
inline void run_partitioned(std::size_t trials, unsigned threads,
                            std::vector<TrialRecord>& rows, Fn&& fn) {
    rows.resize(trials);
    if (threads <= 1) {
        for (std::size_t t = 0; t < trials; ++t) rows[t] = fn(t);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t t = w; t < trials; t += threads) rows[t] = fn(t);
        });
    for (auto& th : pool) th.join();
}

inline PauliFrame frame_diff(const FieldSpec& f, const PauliFrame& a,
                             const PauliFrame& b) {
    return make_pauli(f, vec_sub(f, a.x_part, b.x_part),
                      vec_sub(f, a.z_part, b.z_part), 0, a.ext);
}

inline std::vector<std::uint32_t> nonzero_blocks(const std::vector<fq>& x,
                                                 const std::vector<fq>& z,
                                                 std::uint32_t ext) {
    std::vector<std::uint32_t> out;
    const std::size_t n = x.size() / ext;
    for (std::size_t b = 0; b < n; ++b) {
        bool hit = false;
        for (std::uint32_t j = 0; j < ext && !hit; ++j)
            hit = x[b * ext + j] != 0 || z[b * ext + j] != 0;
        if (hit) out.push_back(static_cast<std::uint32_t>(b));
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// private-code trials
// ---------------------------------------------------------------------------

namespace detail {

/// Exhaustive (error x key) sweep: one row per error pattern, the failure
/// fraction counted over pairs.  aux = number of keys that fail on this
/// error; the key column holds the key count for context.
inline ResultsTable exhaustive_private_sweep(const PrivateAQECC& pa,
                                             std::size_t budget, bool strict) {
    const FieldSpec& f = *pa.css.spec;
    const std::size_t n = pa.css.n;
    const std::size_t keys = pa.ptc.key_count();

    ResultsTable rt;
    rt.exhaustive = true;
    rt.analytic_bound = pa.claimed_failure();
    rt.bound_label = "key-averaged failure target 2*L*eps";

    for (std::size_t w = 0; w <= budget; ++w)
        for_each_pauli_of_weight(f, n, 1, w, [&](const std::vector<fq>& x,
                                                 const std::vector<fq>& z) {
            const PauliFrame e = make_pauli(f, x, z, 0, 1);
            const Syndrome syn = css_syndrome(pa.css, x, z);
            const auto cls = canonical_class_pair(pa.css, e);
            const auto lc = logical_coords(f, pa.enc, x, z);

            std::size_t bad = 0;
            bool saw_miscorrect = false, saw_reject = false;
            for (std::size_t key = 0; key < keys; ++key) {
                const auto sptc = ptc_syndrome_from_coords(f, pa.ptc, key, lc);
                const auto matches = private_filter(pa, key, syn, sptc);
                if (matches.empty()) {
                    saw_reject = true;
                    ++bad;
                    continue;
                }
                bool ok;
                if (strict) {
                    ok = true;
                    for (const PauliFrame& m : matches)
                        if (!(m.x_part == cls.first && m.z_part == cls.second) &&
                            !private_residual_ok(pa, key, frame_diff(f, e, m))) {
                            ok = false;
                            break;
                        }
                } else {
                    const PauliFrame& win = matches.front();
                    ok = (win.x_part == cls.first && win.z_part == cls.second) ||
                         private_residual_ok(pa, key, frame_diff(f, e, win));
                }
                if (!ok) {
                    saw_miscorrect = true;
                    ++bad;
                }
            }

            TrialRecord r;
            r.trial = rt.rows.size();
            r.weight = w;
            for (std::size_t p = 0; p < n; ++p)
                if (x[p] != 0 || z[p] != 0)
                    r.support.push_back(static_cast<std::uint32_t>(p));
            r.key = keys;
            r.syndrome_digest = fnv1a64(syn);
            r.outcome = bad == 0 ? TrialOutcome::Success
                                 : (saw_miscorrect ? TrialOutcome::Miscorrect
                                                   : TrialOutcome::Reject);
            (void)saw_reject;
            r.aux = static_cast<std::int64_t>(bad);
            rt.rows.push_back(std::move(r));

            rt.fail_num += bad;
            rt.fail_den += keys;
            if (bad * rt.worst_den > rt.worst_num * keys) {
                rt.worst_num = bad;
                rt.worst_den = keys;
            }
        });

    detail::tally(rt);
    // tally() only recomputes MC counters; restore the pair-exact ones
    rt.extra["per_error_failure_max"] = {{"count", rt.worst_num},
                                         {"denominator", rt.worst_den}};
    rt.extra["list_size_max"] = pa.list_max;
    rt.extra["eps"] = {{"count", pa.ptc.eps_num}, {"denominator", pa.ptc.eps_den}};
    return rt;
}

}  // namespace detail

/**
 * @brief Sample (or enumerate) keyed decode trials on a private code.
 *
 * Per trial: draw a key and an in-budget error, decode from the two
 * syndromes alone, and classify: success when the selected correction is
 * stabilizer-equivalent to the error under the drawn key, reject when the
 * filter leaves no candidate, miscorrect otherwise.  `strict` instead fails
 * a trial as soon as ANY surviving candidate is non-correcting (the
 * union-bound event behind the key-averaged guarantee).  aux holds the
 * surviving-candidate count.
 *
 * An adversary with an exhaustive support or error model switches to the
 * exact (error x key) sweep and ignores `trials` and `master_seed`.
 */
inline ResultsTable run_private_trials(const PrivateAQECC& pa,
                                       const AdversaryModel& adv,
                                       std::size_t trials,
                                       std::uint64_t master_seed,
                                       bool strict = false, unsigned threads = 1) {
    validate_adversary(adv, pa.css.n);
    if (adv.exhaustive())
        return detail::exhaustive_private_sweep(pa, adv.weight_budget, strict);

    const FieldSpec& f = *pa.css.spec;
    const std::size_t n = pa.css.n;
    const std::size_t keys = pa.ptc.key_count();

    ResultsTable rt;
    rt.master_seed = master_seed;
    rt.analytic_bound = pa.claimed_failure();
    rt.bound_label = "key-averaged failure target 2*L*eps";

    detail::run_partitioned(trials, threads, rt.rows, [&](std::size_t t) {
        TrialRecord r;
        r.trial = t;
        r.seed = trial_seed(master_seed, t);
        std::mt19937_64 rng(r.seed);

        std::uniform_int_distribution<std::size_t> dkey(0, keys - 1);
        r.key = dkey(rng);
        r.support = detail::sample_support(adv, n, rng);

        std::vector<fq> x(n, 0), z(n, 0);
        r.weight = detail::fill_uniform_pauli(f, r.support, x, z, rng);
        const PauliFrame e = make_pauli(f, x, z, 0, 1);

        const Syndrome syn = css_syndrome(pa.css, x, z);
        const auto sptc = private_ptc_syndrome(pa, r.key, e);
        r.syndrome_digest = fnv1a64(syn);
        r.keyed_digest = fnv1a64(sptc);

        const auto matches = private_filter(pa, r.key, syn, sptc);
        r.aux = static_cast<std::int64_t>(matches.size());
        if (matches.empty()) {
            r.outcome = TrialOutcome::Reject;
            return r;
        }
        const auto cls = canonical_class_pair(pa.css, e);
        auto correcting = [&](const PauliFrame& m) {
            return (m.x_part == cls.first && m.z_part == cls.second) ||
                   private_residual_ok(pa, r.key, detail::frame_diff(f, e, m));
        };
        bool ok;
        if (strict) {
            ok = true;
            for (const PauliFrame& m : matches)
                if (!correcting(m)) {
                    ok = false;
                    break;
                }
        } else {
            ok = correcting(matches.front());
        }
        r.outcome = ok ? TrialOutcome::Success : TrialOutcome::Miscorrect;
        return r;
    });

    detail::tally(rt);
    rt.extra["list_size_max"] = pa.list_max;
    return rt;
}

// ---------------------------------------------------------------------------
// composed-scheme trials (sharing layer + private code)
// ---------------------------------------------------------------------------

/**
 * @brief Trials of the composed scheme: the key is shared, the adversary
 * corrupts the SAME positions in both layers, and the receiver decodes with
 * whatever key reconstruction returns.
 *
 * Per trial: draw a key, share it (fresh randomness), draw an in-budget
 * support, plant a Pauli error there (identity when the adversary is
 * share_only), and overwrite the corrupted parties' data, keys, and tags
 * with adversarial values.  Reject on sharing abort or an out-of-range
 * secret; otherwise classify the decode against the TRUE key's stabilizer
 * group.  aux = 1 when the reconstructed key equals the real one.
 */
inline ResultsTable run_aqecc_trials(const AQECC& ac, const AdversaryModel& adv,
                                     std::size_t trials, std::uint64_t master_seed,
                                     unsigned threads = 1) {
    const PrivateAQECC& pa = ac.paqecc;
    const FieldSpec& f = *pa.css.spec;
    const std::size_t n = pa.css.n;
    const std::size_t keys = pa.ptc.key_count();
    validate_adversary(adv, n);
    if (adv.exhaustive())
        throw std::invalid_argument(
            "run_aqecc_trials: exhaustive sweeps are for the private layer");

    ResultsTable rt;
    rt.master_seed = master_seed;
    rt.analytic_bound = ac.claimed_failure();
    rt.bound_label = "private failure target + sharing eps";

    detail::run_partitioned(trials, threads, rt.rows, [&](std::size_t t) {
        TrialRecord r;
        r.trial = t;
        r.seed = trial_seed(master_seed, t);
        std::mt19937_64 rng(r.seed);

        std::uniform_int_distribution<std::size_t> dkey(0, keys - 1);
        const std::size_t key = dkey(rng);
        r.key = key;
        r.support = detail::sample_support(adv, n, rng);

        std::vector<fq> x(n, 0), z(n, 0);
        if (!adv.share_only)
            r.weight = detail::fill_uniform_pauli(f, r.support, x, z, rng);
        const PauliFrame e = make_pauli(f, x, z, 0, 1);

        auto shares = rss_share(ac.rss, aqecc_key_to_secret(ac, key), rng);
        std::uniform_int_distribution<fq> dshare(0, ac.rss.field->q - 1);
        for (std::uint32_t i : r.support) {
            for (auto& v : shares[i].v) v = dshare(rng);
            for (std::size_t j = 0; j < ac.rss.n; ++j) {
                if (j == i) continue;
                shares[i].keys[j] = {dshare(rng), dshare(rng)};
                shares[i].tags[j] = dshare(rng);
            }
        }

        const auto secret = rss_reconstruct(ac.rss, shares);
        if (!secret) {
            r.outcome = TrialOutcome::Reject;
            return r;
        }
        const auto got = aqecc_secret_to_key(ac, *secret);
        if (!got) {
            r.outcome = TrialOutcome::Reject;
            return r;
        }
        r.aux = *got == key ? 1 : 0;

        const Syndrome syn = css_syndrome(pa.css, x, z);
        const auto sptc = private_ptc_syndrome(pa, *got, e);
        r.syndrome_digest = fnv1a64(syn);
        r.keyed_digest = fnv1a64(sptc);
        const auto corr = private_decode(pa, *got, syn, sptc);
        if (!corr) {
            r.outcome = TrialOutcome::Reject;
            return r;
        }
        r.outcome = private_residual_ok(pa, key, detail::frame_diff(f, e, *corr))
                        ? TrialOutcome::Success
                        : TrialOutcome::Miscorrect;
        return r;
    });

    detail::tally(rt);
    std::uint64_t recovered = 0;
    for (const TrialRecord& r : rt.rows) recovered += r.aux > 0 ? 1 : 0;
    rt.extra["key_recovered"] = recovered;
    rt.extra["sharing_eps"] = ac.rss.analytic_eps();
    return rt;
}

// ---------------------------------------------------------------------------
// graph-spread pipeline trials
// ---------------------------------------------------------------------------

namespace detail {

/// P[s' + Bin(n - s', p1) >= t + 1]: the chance that the blocks already
/// past their radius plus independently failing clean blocks overflow the
/// outer decoder.
inline double block_overflow_tail(std::size_t n_out, std::size_t sprime,
                                  std::size_t t_out, double p1) {
    const std::size_t need = t_out + 1;
    if (sprime >= need) return 1.0;
    const std::size_t nn = n_out - sprime, kk = need - sprime;
    double acc = 0, term = std::pow(1 - p1, static_cast<double>(nn)), pr = 1;
    for (std::size_t j = 0; j <= nn; ++j) {
        if (j >= kk) acc += pr * term;
        pr = pr * static_cast<double>(nn - j) / static_cast<double>(j + 1);
        term = term * p1 / (1 - p1);
    }
    return std::min(1.0, acc);
}

}  // namespace detail

/**
 * @brief Trials of the one-shot spread pipeline.
 *
 * Per trial: plant an in-budget error on the PHYSICAL qudit layout, push it
 * through the graph permutation, decode (or repair) every touched block,
 * and reassemble the per-block residues into the outer frame U.  Within
 * weight t_out the outer stage provably returns U's class, so the runner
 * invokes the outer decoder only when the residue weight exceeds t_out (or
 * always, with `full = true`, for cross-validation); both paths were checked
 * to agree trial-by-trial.
 *
 * aux = blocks touched by the error (the non-error-free count), aux2 =
 * blocks whose private decode rejected and fell back to repair.  The
 * analytic bound is the mean binomial overflow tail over the sampled
 * supports.
 */
inline ResultsTable run_direct_trials(const DirectAQECC& dc, const AdversaryModel& adv,
                                      std::size_t trials, std::uint64_t master_seed,
                                      bool full = false, unsigned threads = 1) {
    const FieldSpec& f = *dc.inner.css.spec;
    const std::size_t N = dc.qudits();
    const std::size_t n_out = dc.block_count();
    const std::size_t nin = dc.inner.css.n;
    const std::size_t keys = dc.inner.ptc.key_count();
    validate_adversary(adv, N);
    if (adv.exhaustive())
        throw std::invalid_argument(
            "run_direct_trials: exhaustive sweeps are for the private layer");

    ResultsTable rt;
    rt.master_seed = master_seed;
    rt.bound_label = "mean binomial block-overflow tail";

    std::vector<double> tails(trials, 0.0);
    detail::run_partitioned(trials, threads, rt.rows, [&](std::size_t t) {
        TrialRecord r;
        r.trial = t;
        r.seed = trial_seed(master_seed, t);
        std::mt19937_64 rng(r.seed);

        std::uniform_int_distribution<std::size_t> dkey(0, keys - 1);
        const std::size_t key = dkey(rng);
        r.key = key;
        r.support = detail::sample_support(adv, N, rng);

        std::vector<fq> px(N, 0), pz(N, 0);
        r.weight = detail::fill_uniform_pauli(f, r.support, px, pz, rng);

        const std::vector<fq> bx = permute_symbols(dc.graph, px, true);
        const std::vector<fq> bz = permute_symbols(dc.graph, pz, true);

        std::size_t touched = 0, sprime = 0, rejected = 0;
        std::vector<fq> ux(n_out, 0), uz(n_out, 0);
        for (std::size_t b = 0; b < n_out; ++b) {
            std::size_t hits = 0;
            for (std::size_t j = 0; j < nin; ++j)
                if (bx[b * nin + j] != 0 || bz[b * nin + j] != 0) ++hits;
            if (hits == 0) continue;
            ++touched;
            // Blocks loaded beyond the guaranteed-unique weight floor((d-1)/2)
            // are the ones the binomial overflow tail has to account for.
            if (2 * hits >= dc.inner.distance) ++sprime;

            const std::vector<fq> ex(bx.begin() + b * nin, bx.begin() + (b + 1) * nin);
            const std::vector<fq> ez(bz.begin() + b * nin, bz.begin() + (b + 1) * nin);
            const PauliFrame eb = make_pauli(f, ex, ez, 0, 1);
            const Syndrome syn = css_syndrome(dc.inner.css, eb);
            const auto sptc = private_ptc_syndrome(dc.inner, key, eb);
            auto corr = private_decode(dc.inner, key, syn, sptc);
            if (!corr) {
                ++rejected;
                corr = detail::block_repair(dc, key, syn, sptc);
            }
            std::tie(ux[b], uz[b]) =
                direct_block_residue(dc, key, detail::frame_diff(f, eb, *corr));
        }
        tails[t] = detail::block_overflow_tail(n_out, sprime, dc.t_out,
                                               dc.delta_out / static_cast<double>(nin));
        r.aux = static_cast<std::int64_t>(touched);
        r.aux2 = static_cast<std::int64_t>(rejected);

        const FieldSpec& fo = *dc.outer.css.spec;
        const PauliFrame u = make_pauli(fo, ux, uz, 0, 1);
        r.syndrome_digest = fnv1a64(css_syndrome(dc.outer.css, u));
        if (!full && pauli_weight(u) <= dc.t_out) {
            r.outcome = TrialOutcome::Success;
            return r;
        }
        const auto dec = direct_outer_decode(dc, css_syndrome(dc.outer.css, u));
        if (!dec) {
            r.outcome = TrialOutcome::Reject;
            return r;
        }
        const auto cu = canonical_class_pair(dc.outer.css, u);
        const auto cd = canonical_class_pair(dc.outer.css, *dec);
        r.outcome = cu == cd ? TrialOutcome::Success : TrialOutcome::Miscorrect;
        return r;
    });

    detail::tally(rt);
    double tail_sum = 0, touched_sum = 0;
    std::uint64_t rejected_total = 0;
    for (std::size_t t = 0; t < trials; ++t) tail_sum += tails[t];
    for (const TrialRecord& r : rt.rows) {
        touched_sum += static_cast<double>(r.aux);
        rejected_total += static_cast<std::uint64_t>(r.aux2);
    }
    rt.analytic_bound = trials ? tail_sum / static_cast<double>(trials) : 1.0;
    rt.extra["mean_overflow_tail"] = rt.analytic_bound;
    rt.extra["mean_touched_blocks"] =
        trials ? touched_sum / static_cast<double>(trials) : 0.0;
    rt.extra["rejected_blocks"] = rejected_total;
    return rt;
}

// ---------------------------------------------------------------------------
// amplified-code trials
// ---------------------------------------------------------------------------

/**
 * @brief Trials of the amplified code with the spreading counter attached.
 *
 * Per trial: plant an in-budget error on whole blocked positions, record
 * how many inner blocks end up overloaded (at least alpha_in * r of their
 * ports corrupted) after unpermuting, then run the two-level unique decoder
 * and classify its output.  aux = overloaded blocks, aux2 = corrupted
 * blocks |T|.  Diagnostics count trials where |T| stayed within the
 * spreading budget yet the overload count reached alpha_out * n -- the
 * event the pseudorandomness certificate excludes.
 */
inline ResultsTable run_ael_trials(const AELCode& ael, const AdversaryModel& adv,
                                   std::size_t trials, std::uint64_t master_seed,
                                   double alpha_in, double alpha_out,
                                   unsigned threads = 1) {
    const FieldSpec& f = *ael.inner.spec;
    const std::size_t nblk = ael.graph.n;
    const std::uint32_t r = ael.graph.r;
    validate_adversary(adv, nblk);
    if (adv.exhaustive())
        throw std::invalid_argument(
            "run_ael_trials: use expperm_check for exhaustive subset sweeps");

    const double margin =
        alpha_in - ael.eps0 * std::sqrt(alpha_in / alpha_out);
    const auto spread_budget = static_cast<long long>(
        std::floor(margin * static_cast<double>(nblk) + 1e-9));
    const auto unique_budget = static_cast<long long>(std::floor(
        ael.unique_fraction * static_cast<double>(nblk) + 1e-9));

    ResultsTable rt;
    rt.master_seed = master_seed;
    if (static_cast<long long>(adv.weight_budget) <= unique_budget) {
        rt.analytic_bound = 0.0;
        rt.bound_label = "inside the unique-decoding fraction";
    } else {
        rt.analytic_bound = 1.0;
        rt.bound_label = "beyond the unique-decoding fraction (vacuous)";
    }

    const PauliFrame id = pauli_identity(f, nblk, r);
    const auto id_cls = canonical_class_pair(ael.css, id);

    detail::run_partitioned(trials, threads, rt.rows, [&](std::size_t t) {
        TrialRecord r2;
        r2.trial = t;
        r2.seed = trial_seed(master_seed, t);
        std::mt19937_64 rng(r2.seed);

        r2.support = detail::sample_support(adv, nblk, rng);
        std::vector<fq> x(nblk * r, 0), z(nblk * r, 0);
        std::uniform_int_distribution<fq> dsym(0, f.q - 1);
        for (std::uint32_t b : r2.support)
            for (std::uint32_t j = 0; j < r; ++j) {
                x[b * r + j] = dsym(rng);
                z[b * r + j] = dsym(rng);
            }
        const auto corrupted = detail::nonzero_blocks(x, z, r);
        r2.weight = corrupted.size();
        r2.aux2 = static_cast<std::int64_t>(corrupted.size());

        const ExpPermReport rep = expperm_check(ael.graph, corrupted, alpha_in, alpha_out);
        r2.aux = static_cast<std::int64_t>(rep.overloaded);
        if (static_cast<long long>(corrupted.size()) <= spread_budget && !rep.within)
            r2.keyed_digest = 1;  // overload violation marker, tallied below

        const PauliFrame e = make_pauli(f, std::move(x), std::move(z), 0, r);
        r2.syndrome_digest = fnv1a64(css_syndrome(ael.css, e));
        const auto corr = ael_unique_decode(ael, e);
        if (!corr) {
            r2.outcome = TrialOutcome::Reject;
            return r2;
        }
        const PauliFrame residual = detail::frame_diff(f, e, *corr);
        const bool ok = vec_is_zero(css_syndrome(ael.css, residual)) &&
                        canonical_class_pair(ael.css, residual) == id_cls;
        r2.outcome = ok ? TrialOutcome::Success : TrialOutcome::Miscorrect;
        return r2;
    });

    detail::tally(rt);
    std::uint64_t violations = 0;
    std::int64_t worst_overload = 0;
    for (TrialRecord& row : rt.rows) {
        violations += row.keyed_digest;
        row.keyed_digest = 0;
        worst_overload = std::max(worst_overload, row.aux);
    }
    rt.extra["spread_budget"] = spread_budget;
    rt.extra["overload_violations"] = violations;
    rt.extra["worst_overloaded_blocks"] = worst_overload;
    rt.extra["alpha_in"] = alpha_in;
    rt.extra["alpha_out"] = alpha_out;
    return rt;
}

}  // namespace aqec
