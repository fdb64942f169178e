#pragma once

/**
 * @file io.hpp
 * @brief Structured-text descriptions of every object the library builds.
 *
 * One line-oriented format covers config files and code description files
 * alike: `key = value` pairs, `#` comments, a mandatory `schema = 1` and a
 * `type` tag selecting the loader.  Parsing is strict -- unknown keys,
 * duplicate keys, malformed numbers, and stale schema versions are all
 * rejected -- so a typo in a config fails loudly instead of silently
 * running a different experiment.
 *
 * File references (a CSS file naming its two classical components, an
 * amplified-code file naming its graph) are resolved relative to the
 * directory of the referencing file.
 */

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "json.hpp"

#include "aqec/ael.hpp"
#include "aqec/aqecc.hpp"

namespace aqec {

/// A config or code description file is unusable: wrong schema, unknown or
/// duplicate keys, malformed values, or references that do not check out.
/// The command line maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

inline std::uint64_t parse_u64(const std::string& tok, const std::string& what) {
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(tok, &used);
    } catch (const std::exception&) {
        throw ConfigError(what + ": expected an unsigned integer, got '" + tok + "'");
    }
    if (used != tok.size() || tok[0] == '-')
        throw ConfigError(what + ": expected an unsigned integer, got '" + tok + "'");
    return v;
}

inline double parse_double(const std::string& tok, const std::string& what) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ConfigError(what + ": expected a number, got '" + tok + "'");
    }
    if (used != tok.size())
        throw ConfigError(what + ": expected a number, got '" + tok + "'");
    return v;
}

inline std::string format_double(double v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// strict key = value configs
// ---------------------------------------------------------------------------

class Config {
public:
    /// Parse from a stream; `origin` names the source in error messages.
    static Config parse(std::istream& in, std::string origin = "<config>",
                        std::filesystem::path dir = {}) {
        Config c;
        c.origin_ = std::move(origin);
        c.dir_ = std::move(dir);
        std::string line;
        std::size_t no = 0;
        while (std::getline(in, line)) {
            ++no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(c.origin_ + ":" + std::to_string(no) +
                                  ": expected 'key = value'");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string val = detail::trim(line.substr(eq + 1));
            if (key.empty() || val.empty())
                throw ConfigError(c.origin_ + ":" + std::to_string(no) +
                                  ": empty key or value");
            if (!c.kv_.emplace(key, val).second)
                throw ConfigError(c.origin_ + ":" + std::to_string(no) +
                                  ": duplicate key '" + key + "'");
        }
        if (c.take("schema") != "1")
            throw ConfigError(c.origin_ + ": unsupported schema (need schema = 1)");
        return c;
    }

    static Config parse_string(const std::string& text,
                               std::string origin = "<config>") {
        std::istringstream in(text);
        return parse(in, std::move(origin));
    }

    static Config load(const std::filesystem::path& file) {
        std::ifstream in(file);
        if (!in) throw ConfigError("cannot open '" + file.string() + "'");
        return parse(in, file.string(), file.parent_path());
    }

    const std::string& origin() const { return origin_; }
    /// Directory for resolving file references inside this config.
    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path resolve(const std::string& ref) const {
        std::filesystem::path p(ref);
        return p.is_absolute() ? p : dir_ / p;
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    const std::string& get(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end())
            throw ConfigError(origin_ + ": missing key '" + key + "'");
        touched_.insert(key);
        return it->second;
    }
    std::string get_or(const std::string& key, std::string fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        touched_.insert(key);
        return it->second;
    }

    std::uint64_t get_u64(const std::string& key) const {
        return detail::parse_u64(get(key), origin_ + ": key '" + key + "'");
    }
    std::uint64_t get_u64_or(const std::string& key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        return get_u64(key);
    }
    double get_double(const std::string& key) const {
        return detail::parse_double(get(key), origin_ + ": key '" + key + "'");
    }
    double get_double_or(const std::string& key, double fallback) const {
        if (!has(key)) return fallback;
        return get_double(key);
    }
    bool get_flag_or(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const std::string& v = get(key);
        if (v == "0" || v == "false") return false;
        if (v == "1" || v == "true") return true;
        throw ConfigError(origin_ + ": key '" + key + "' must be 0/1/true/false");
    }

    /// Whitespace-separated unsigned integers (field digits, edge lists, ...).
    std::vector<std::uint64_t> get_ints(const std::string& key) const {
        const auto toks = detail::split_ws(get(key));
        std::vector<std::uint64_t> out;
        out.reserve(toks.size());
        for (const auto& t : toks)
            out.push_back(detail::parse_u64(t, origin_ + ": key '" + key + "'"));
        return out;
    }
    std::vector<fq> get_digits(const std::string& key, const FieldSpec& f) const {
        const auto ints = get_ints(key);
        std::vector<fq> out(ints.size());
        for (std::size_t i = 0; i < ints.size(); ++i) {
            if (ints[i] >= f.q)
                throw ConfigError(origin_ + ": key '" + key + "' holds " +
                                  std::to_string(ints[i]) + " >= field size " +
                                  std::to_string(f.q));
            out[i] = static_cast<fq>(ints[i]);
        }
        return out;
    }

    const std::string& type() const { return get("type"); }

    /// Reject keys nobody asked for; call once after all reads.
    void finish() const {
        std::vector<std::string> unknown;
        for (const auto& [k, v] : kv_)
            if (!touched_.count(k)) unknown.push_back(k);
        if (!unknown.empty()) {
            std::string msg = origin_ + ": unknown key(s):";
            for (const auto& k : unknown) msg += " '" + k + "'";
            throw ConfigError(msg);
        }
    }

private:
    // schema is consumed during parse, before the touched-set exists
    std::string take(const std::string& key) {
        auto it = kv_.find(key);
        if (it == kv_.end())
            throw ConfigError(origin_ + ": missing key '" + key + "'");
        std::string v = it->second;
        kv_.erase(it);
        return v;
    }

    std::string origin_;
    std::filesystem::path dir_;
    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> touched_;
};

/// Emits the same format Config parses; keys appear in insertion order.
class ConfigWriter {
public:
    explicit ConfigWriter(const std::string& type) {
        put("schema", "1");
        put("type", type);
    }

    void put(const std::string& key, const std::string& value) {
        out_ += key + " = " + value + "\n";
    }
    void put(const std::string& key, const char* value) {
        put(key, std::string(value));
    }
    void put(const std::string& key, std::uint64_t value) {
        put(key, std::to_string(value));
    }
    void put(const std::string& key, std::uint32_t value) {
        put(key, static_cast<std::uint64_t>(value));
    }
    void put(const std::string& key, double value) {
        put(key, detail::format_double(value));
    }
    template <typename T>
    void put_list(const std::string& key, const std::vector<T>& values) {
        std::string v;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) v += ' ';
            v += std::to_string(static_cast<std::uint64_t>(values[i]));
        }
        put(key, v);
    }
    void comment(const std::string& text) { out_ += "# " + text + "\n"; }

    const std::string& str() const { return out_; }

private:
    std::string out_;
};

inline void save_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + file.string() + "'");
    out << text;
}

// ---------------------------------------------------------------------------
// Pauli frames as text
// ---------------------------------------------------------------------------

namespace detail {

inline std::uint32_t symbol_width(const FieldSpec& f) {
    std::uint32_t w = 1, top = 10;
    while (top - 1 < f.q - 1) {
        ++w;
        top *= 10;
    }
    return w;
}

inline std::string format_digit_blocks(const FieldSpec& f, std::uint32_t ext,
                                       const std::vector<fq>& v) {
    const std::uint32_t w = symbol_width(f);
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i != 0 && i % ext == 0) out += '.';
        std::string d = std::to_string(v[i]);
        out.append(w - d.size(), '0');
        out += d;
    }
    return out;
}

inline std::vector<fq> parse_digit_blocks(const FieldSpec& f, std::uint32_t ext,
                                          const std::string& text) {
    const std::uint32_t w = symbol_width(f);
    std::vector<fq> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t stop = text.find('.', start);
        if (stop == std::string::npos) stop = text.size();
        const std::string block = text.substr(start, stop - start);
        if (block.size() != static_cast<std::size_t>(w) * ext)
            throw ConfigError("pauli text: block '" + block + "' is not " +
                              std::to_string(ext) + " symbols of width " +
                              std::to_string(w));
        for (std::uint32_t s = 0; s < ext; ++s) {
            const std::string d = block.substr(static_cast<std::size_t>(s) * w, w);
            const std::uint64_t v = parse_u64(d, "pauli text: symbol");
            if (v >= f.q)
                throw ConfigError("pauli text: symbol " + d + " >= field size " +
                                  std::to_string(f.q));
            out.push_back(static_cast<fq>(v));
        }
        if (stop == text.size()) break;
        start = stop + 1;
    }
    return out;
}

}  // namespace detail

/// `X:<digits>;Z:<digits>;ph:<int>`: each alphabet block is a group of
/// `ext` fixed-width decimal symbols, groups joined by '.'.
inline std::string format_pauli(const PauliFrame& e) {
    return "X:" + detail::format_digit_blocks(*e.spec, e.ext, e.x_part) +
           ";Z:" + detail::format_digit_blocks(*e.spec, e.ext, e.z_part) +
           ";ph:" + std::to_string(e.phase);
}

inline PauliFrame parse_pauli(const FieldSpec& f, std::uint32_t ext,
                              const std::string& text) {
    const std::size_t semi1 = text.find(';');
    const std::size_t semi2 = text.find(';', semi1 == std::string::npos ? semi1 : semi1 + 1);
    if (semi1 == std::string::npos || semi2 == std::string::npos)
        throw ConfigError("pauli text: expected 'X:...;Z:...;ph:...'");
    const std::string xs = text.substr(0, semi1);
    const std::string zs = text.substr(semi1 + 1, semi2 - semi1 - 1);
    const std::string ps = text.substr(semi2 + 1);
    if (xs.rfind("X:", 0) != 0 || zs.rfind("Z:", 0) != 0 || ps.rfind("ph:", 0) != 0)
        throw ConfigError("pauli text: expected 'X:...;Z:...;ph:...'");
    std::vector<fq> x = detail::parse_digit_blocks(f, ext, xs.substr(2));
    std::vector<fq> z = detail::parse_digit_blocks(f, ext, zs.substr(2));
    const std::uint64_t ph = detail::parse_u64(ps.substr(3), "pauli text: phase");
    if (x.size() != z.size())
        throw ConfigError("pauli text: X and Z parts differ in length");
    return make_pauli(f, std::move(x), std::move(z),
                      static_cast<std::uint32_t>(ph % f.p), ext);
}

// ---------------------------------------------------------------------------
// field descriptions
// ---------------------------------------------------------------------------

namespace detail {

inline void put_field(ConfigWriter& w, const FieldSpec& f) {
    w.put("p", f.p);
    w.put("m", f.m);
    w.put_list("modulus", f.modulus);
    w.put("primitive", static_cast<std::uint64_t>(f.primitive));
}

/// Code files pin the full field spec; the loader hands back the library's
/// cached instance (structures keep FieldSpec pointers, so a stable address
/// is required) and rejects files written against a different modulus.
inline const FieldSpec& field_from(const Config& c) {
    const auto p = static_cast<std::uint32_t>(c.get_u64("p"));
    const auto m = static_cast<std::uint32_t>(c.get_u64("m"));
    const FieldSpec& f = FieldSpec::get(p, m);
    if (c.has("modulus")) {
        const auto mod = c.get_ints("modulus");
        if (std::vector<std::uint32_t>(mod.begin(), mod.end()) != f.modulus)
            throw ConfigError(c.origin() +
                              ": modulus differs from the library default for GF(" +
                              std::to_string(p) + "^" + std::to_string(m) + ")");
    }
    if (c.has("primitive") && c.get_u64("primitive") != f.primitive)
        throw ConfigError(c.origin() + ": primitive element differs from the "
                          "library default");
    return f;
}

inline void put_mat(ConfigWriter& w, const std::string& key, const Mat& m) {
    std::string v = std::to_string(m.rows) + " " + std::to_string(m.cols);
    for (fq e : m.a) v += " " + std::to_string(e);
    w.put(key, v);
}

inline Mat get_mat(const Config& c, const std::string& key, const FieldSpec& f) {
    const auto ints = c.get_ints(key);
    if (ints.size() < 2)
        throw ConfigError(c.origin() + ": key '" + key + "': expected 'rows cols entries...'");
    const auto rows = static_cast<std::size_t>(ints[0]);
    const auto cols = static_cast<std::size_t>(ints[1]);
    if (ints.size() != 2 + rows * cols)
        throw ConfigError(c.origin() + ": key '" + key + "': expected " +
                          std::to_string(rows * cols) + " entries");
    Mat m(f, rows, cols);
    for (std::size_t i = 0; i < rows * cols; ++i) {
        if (ints[2 + i] >= f.q)
            throw ConfigError(c.origin() + ": key '" + key + "': entry " +
                              std::to_string(ints[2 + i]) + " >= field size");
        m.a[i] = static_cast<fq>(ints[2 + i]);
    }
    return m;
}

}  // namespace detail

inline std::string write_field_config(const FieldSpec& f) {
    ConfigWriter w("field");
    detail::put_field(w, f);
    return w.str();
}

inline const FieldSpec& load_field(const Config& c) {
    if (c.type() != "field")
        throw ConfigError(c.origin() + ": expected type = field");
    const FieldSpec& f = detail::field_from(c);
    c.finish();
    return f;
}

// ---------------------------------------------------------------------------
// classical code descriptions: raw | grs | folded | nested-pair
// ---------------------------------------------------------------------------

namespace detail {

inline void put_grs(ConfigWriter& w, const GRSSpec& g, const std::string& prefix = "") {
    w.put(prefix + "k", g.k);
    w.put(prefix + "gamma", static_cast<std::uint64_t>(g.gamma));
    w.put_list(prefix + "multipliers", g.multipliers);
}

inline GRSSpec get_grs(const Config& c, const FieldSpec& f, std::size_t n,
                       const std::string& prefix = "") {
    return make_grs_spec(f, n, c.get_u64(prefix + "k"),
                         static_cast<fq>(c.get_u64(prefix + "gamma")),
                         c.get_digits(prefix + "multipliers", f));
}

inline void put_raw(ConfigWriter& w, const LinearCode& code,
                    const std::string& prefix = "") {
    put_mat(w, prefix + "generator", code.generator);
    put_mat(w, prefix + "parity", code.parity);
}

inline LinearCode get_raw(const Config& c, const FieldSpec& f, std::size_t n,
                          std::uint32_t ext, const std::string& prefix = "") {
    Mat gen = get_mat(c, prefix + "generator", f);
    std::optional<Mat> par;
    if (c.has(prefix + "parity")) par = get_mat(c, prefix + "parity", f);
    try {
        return make_linear_code(f, n, ext, std::move(gen), std::move(par));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
}

}  // namespace detail

/// Serialize a (possibly folded, possibly evaluation-structured) code.  The
/// stored length and alphabet are the base code's; `fold` rebundles on load.
inline std::string write_classical_config(const FoldedCode& fc) {
    const std::size_t base_n = fc.code.n * fc.fold_m;
    const std::uint32_t base_ext = fc.code.ext / fc.fold_m;
    const bool folded = fc.fold_m != 1;
    ConfigWriter w(folded ? "folded" : (fc.grs ? "grs" : "raw"));
    detail::put_field(w, *fc.code.spec);
    w.put("n", base_n);
    w.put("ext", base_ext);
    if (folded) {
        w.put("fold", fc.fold_m);
        w.put("inner", fc.grs ? "grs" : "raw");
    }
    if (fc.grs) {
        detail::put_grs(w, *fc.grs);
    } else {
        LinearCode base = fc.code;
        base.n = base_n;
        base.ext = base_ext;
        detail::put_raw(w, base);
    }
    return w.str();
}

inline std::string write_classical_config(const LinearCode& c) {
    return write_classical_config(unfolded(c));
}

inline std::string write_nested_pair_config(const LinearCode& c1,
                                            const LinearCode& c2) {
    if (c1.spec != c2.spec || c1.n != c2.n || c1.ext != c2.ext)
        throw ConfigError("nested-pair: the two codes must share field and length");
    ConfigWriter w("nested-pair");
    detail::put_field(w, *c1.spec);
    w.put("n", c1.n);
    w.put("ext", c1.ext);
    detail::put_raw(w, c1, "first_");
    detail::put_raw(w, c2, "second_");
    return w.str();
}

inline FoldedCode load_classical(const Config& c) {
    const std::string& tag = c.type();
    const FieldSpec& f = detail::field_from(c);
    const auto n = static_cast<std::size_t>(c.get_u64("n"));
    const auto ext = static_cast<std::uint32_t>(c.get_u64_or("ext", 1));
    FoldedCode fc;
    try {
        if (tag == "raw") {
            fc = unfolded(detail::get_raw(c, f, n, ext));
        } else if (tag == "grs") {
            GRSSpec g = detail::get_grs(c, f, n);
            fc = unfolded(grs_build(g), g);
        } else if (tag == "folded") {
            const auto m = static_cast<std::uint32_t>(c.get_u64("fold"));
            const std::string inner = c.get("inner");
            if (inner == "grs") {
                GRSSpec g = detail::get_grs(c, f, n);
                fc = fold(grs_build(g), m, g);
            } else if (inner == "raw") {
                fc = fold(detail::get_raw(c, f, n, ext), m);
            } else {
                throw ConfigError(c.origin() + ": inner must be grs or raw");
            }
        } else {
            throw ConfigError(c.origin() + ": unknown classical code type '" + tag + "'");
        }
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
    c.finish();
    return fc;
}

inline std::pair<LinearCode, LinearCode> load_nested_pair(const Config& c) {
    if (c.type() != "nested-pair")
        throw ConfigError(c.origin() + ": expected type = nested-pair");
    const FieldSpec& f = detail::field_from(c);
    const auto n = static_cast<std::size_t>(c.get_u64("n"));
    const auto ext = static_cast<std::uint32_t>(c.get_u64_or("ext", 1));
    auto pair = std::make_pair(detail::get_raw(c, f, n, ext, "first_"),
                               detail::get_raw(c, f, n, ext, "second_"));
    c.finish();
    return pair;
}

// ---------------------------------------------------------------------------
// stabilizer code descriptions
// ---------------------------------------------------------------------------

inline std::string write_stabilizer_config(const StabilizerCode& sc) {
    ConfigWriter w("stabilizer");
    detail::put_field(w, *sc.spec);
    w.put("n", sc.n);
    w.put("ext", sc.ext);
    w.put("generators", sc.generators.size());
    for (std::size_t i = 0; i < sc.generators.size(); ++i)
        w.put("g" + std::to_string(i), format_pauli(sc.generators[i]));
    if (!sc.logical_x.empty()) {
        w.put("logical_pairs", sc.logical_x.size());
        for (std::size_t i = 0; i < sc.logical_x.size(); ++i) {
            w.put("lx" + std::to_string(i), format_pauli(sc.logical_x[i]));
            w.put("lz" + std::to_string(i), format_pauli(sc.logical_z[i]));
        }
    }
    return w.str();
}

inline StabilizerCode load_stabilizer(const Config& c) {
    if (c.type() != "stabilizer")
        throw ConfigError(c.origin() + ": expected type = stabilizer");
    const FieldSpec& f = detail::field_from(c);
    const auto n = static_cast<std::size_t>(c.get_u64("n"));
    const auto ext = static_cast<std::uint32_t>(c.get_u64_or("ext", 1));
    const auto r = static_cast<std::size_t>(c.get_u64("generators"));
    std::vector<PauliFrame> gens, lx, lz;
    for (std::size_t i = 0; i < r; ++i)
        gens.push_back(parse_pauli(f, ext, c.get("g" + std::to_string(i))));
    const auto pairs = static_cast<std::size_t>(c.get_u64_or("logical_pairs", 0));
    for (std::size_t i = 0; i < pairs; ++i) {
        lx.push_back(parse_pauli(f, ext, c.get("lx" + std::to_string(i))));
        lz.push_back(parse_pauli(f, ext, c.get("lz" + std::to_string(i))));
    }
    c.finish();
    try {
        return make_stabilizer_code(f, n, ext, std::move(gens), std::move(lx),
                                    std::move(lz));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
}

// ---------------------------------------------------------------------------
// CSS code files: component references + containment certificate
// ---------------------------------------------------------------------------

namespace detail {

/// W with W * G1 = G2: each check row of the smaller code expressed in the
/// larger code's basis.  Its existence is exactly the containment C2 <= C1.
inline Mat containment_certificate(const LinearCode& c1, const LinearCode& c2) {
    const FieldSpec& f = *c1.spec;
    const Mat g1t = mat_transpose(c1.generator);
    Mat w(f, c2.k_fq, c1.k_fq);
    for (std::size_t r = 0; r < c2.k_fq; ++r) {
        std::vector<fq> row(c2.generator.cols);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] = c2.generator.at(r, j);
        auto x = mat_solve(g1t, row);
        if (!x) throw ConfigError("containment certificate: C2 is not inside C1");
        for (std::size_t j = 0; j < c1.k_fq; ++j) w.at(r, j) = (*x)[j];
    }
    return w;
}

inline void verify_certificate(const Config& c, const Mat& w, const LinearCode& c1,
                               const LinearCode& c2) {
    if (w.rows != c2.k_fq || w.cols != c1.k_fq)
        throw ConfigError(c.origin() + ": certificate shape mismatch");
    const Mat prod = mat_mul(w, c1.generator);
    if (!(prod == c2.generator))
        throw ConfigError(c.origin() +
                          ": containment certificate does not reproduce the "
                          "second component");
}

}  // namespace detail

/// Write `<name>.css` plus `<name>.c1.code` / `<name>.c2.code` into `dir`;
/// returns the path of the main file.  The css file references the two
/// component files by name and records a containment certificate (a change
/// of basis sending the first component onto the second).
inline std::filesystem::path write_css_files(const CSSCode& code,
                                             const std::filesystem::path& dir,
                                             const std::string& name) {
    save_text(dir / (name + ".c1.code"), write_classical_config(code.c1));
    save_text(dir / (name + ".c2.code"), write_classical_config(code.c2));

    ConfigWriter w("css");
    w.put("c1", name + ".c1.code");
    w.put("c2", name + ".c2.code");
    detail::put_mat(w, "certificate",
                    detail::containment_certificate(code.c1.code, code.c2.code));
    detail::put_mat(w, "logical_x", code.logical_x_basis);
    detail::put_mat(w, "logical_z", code.logical_z_basis);
    const std::filesystem::path main = dir / (name + ".css");
    save_text(main, w.str());
    return main;
}

inline CSSCode load_css(const Config& c) {
    if (c.type() != "css")
        throw ConfigError(c.origin() + ": expected type = css");
    const FoldedCode c1 = load_classical(Config::load(c.resolve(c.get("c1"))));
    const FoldedCode c2 = load_classical(Config::load(c.resolve(c.get("c2"))));
    const FieldSpec& f = *c1.code.spec;
    detail::verify_certificate(c, detail::get_mat(c, "certificate", f), c1.code,
                               c2.code);
    std::optional<Mat> lx, lz;
    if (c.has("logical_x")) lx = detail::get_mat(c, "logical_x", f);
    if (c.has("logical_z")) lz = detail::get_mat(c, "logical_z", f);
    c.finish();
    try {
        return build_css(c1, c2, std::move(lx), std::move(lz));
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
}

/// Quantum evaluation codes additionally record their construction recipe
/// (`family = fqrs`, rate) so the full structure -- evaluation dictionaries
/// on both sides -- can be rebuilt instead of reverse-engineered.
inline std::filesystem::path write_fqrs_files(const FQRSCode& code,
                                              const std::filesystem::path& dir,
                                              const std::string& name) {
    save_text(dir / (name + ".c1.code"), write_classical_config(code.css.c1));
    save_text(dir / (name + ".c2.code"), write_classical_config(code.css.c2));

    ConfigWriter w("css");
    w.put("family", "fqrs");
    detail::put_field(w, *code.css.spec);
    w.put("n", code.css.n * code.css.fold_m);
    w.put("rate",
          static_cast<double>(code.css.kappa()) /
              static_cast<double>(code.css.n * code.css.fold_m));
    w.put("fold", code.fold_m);
    w.put("c1", name + ".c1.code");
    w.put("c2", name + ".c2.code");
    detail::put_mat(w, "certificate",
                    detail::containment_certificate(code.css.c1.code, code.css.c2.code));
    const std::filesystem::path main = dir / (name + ".css");
    save_text(main, w.str());
    return main;
}

inline FQRSCode load_fqrs(const Config& c) {
    if (c.type() != "css" || c.get_or("family", "") != "fqrs")
        throw ConfigError(c.origin() + ": expected a css file with family = fqrs");
    const FieldSpec& f = detail::field_from(c);
    const auto n = static_cast<std::size_t>(c.get_u64("n"));
    const double rate = c.get_double("rate");
    const auto m = static_cast<std::uint32_t>(c.get_u64_or("fold", 1));
    FQRSCode code;
    try {
        code = build_fqrs(f, n, rate, m);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
    // the referenced component files must describe the same code
    const FoldedCode c1 = load_classical(Config::load(c.resolve(c.get("c1"))));
    const FoldedCode c2 = load_classical(Config::load(c.resolve(c.get("c2"))));
    if (!(c1.code.generator == code.css.c1.code.generator) ||
        !(c2.code.generator == code.css.c2.code.generator))
        throw ConfigError(c.origin() + ": component files do not match the "
                          "recorded construction");
    detail::verify_certificate(c, detail::get_mat(c, "certificate", f), c1.code,
                               c2.code);
    c.finish();
    return code;
}

// ---------------------------------------------------------------------------
// bipartite graph files
// ---------------------------------------------------------------------------

inline std::string write_graph_config(const BipartiteGraph& g) {
    ConfigWriter w("graph");
    w.put("n", g.n);
    w.put("r", g.r);
    std::string edges;
    for (std::size_t l = 0; l < g.n; ++l)
        for (std::uint32_t p = 0; p < g.r; ++p) {
            const auto [rv, rp] = g.left[l][p];
            if (!edges.empty()) edges += "  ";
            edges += std::to_string(l) + " " + std::to_string(p) + " " +
                     std::to_string(rv) + " " + std::to_string(rp);
        }
    w.put("edges", edges);
    return w.str();
}

inline BipartiteGraph load_graph(const Config& c) {
    if (c.type() != "graph")
        throw ConfigError(c.origin() + ": expected type = graph");
    BipartiteGraph g;
    g.n = static_cast<std::size_t>(c.get_u64("n"));
    g.r = static_cast<std::uint32_t>(c.get_u64("r"));
    const auto e = c.get_ints("edges");
    if (e.size() != 4 * g.n * g.r)
        throw ConfigError(c.origin() + ": expected " + std::to_string(4 * g.n * g.r) +
                          " edge numbers (left port right port quadruples)");
    g.left.assign(g.n, std::vector<std::pair<std::uint32_t, std::uint32_t>>(g.r));
    g.right.assign(g.n, std::vector<std::pair<std::uint32_t, std::uint32_t>>(g.r));
    std::vector<std::vector<char>> seen_l(g.n, std::vector<char>(g.r, 0));
    std::vector<std::vector<char>> seen_r(g.n, std::vector<char>(g.r, 0));
    for (std::size_t i = 0; i < e.size(); i += 4) {
        const auto lv = e[i], lp = e[i + 1], rv = e[i + 2], rp = e[i + 3];
        if (lv >= g.n || lp >= g.r || rv >= g.n || rp >= g.r)
            throw ConfigError(c.origin() + ": edge endpoint out of range");
        if (seen_l[lv][lp]++ || seen_r[rv][rp]++)
            throw ConfigError(c.origin() + ": duplicate port in edge list");
        g.left[lv][lp] = {static_cast<std::uint32_t>(rv),
                          static_cast<std::uint32_t>(rp)};
        g.right[rv][rp] = {static_cast<std::uint32_t>(lv),
                           static_cast<std::uint32_t>(lp)};
    }
    c.finish();
    try {
        validate_bipartite(g);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
    return g;
}

// ---------------------------------------------------------------------------
// keyed (PTC) family files
// ---------------------------------------------------------------------------

inline std::string write_ptc_config(const PTCFamily& fam) {
    ConfigWriter w("ptc");
    detail::put_field(w, *fam.spec);
    w.put("n", fam.n);
    w.put("lambda", fam.lambda);
    if (fam.mode == PTCMode::ExplicitPolynomial) {
        w.put("mode", "explicit");
        return w.str();
    }
    w.put("mode", "random");
    w.put("keys", fam.key_count());
    w.put("eps", std::to_string(fam.eps_num) + " " + std::to_string(fam.eps_den));
    w.put("eps_exhaustive", std::uint64_t(fam.eps_exhaustive ? 1 : 0));
    for (std::size_t k = 0; k < fam.key_count(); ++k)
        for (std::uint32_t l = 0; l < fam.lambda; ++l)
            w.put("row" + std::to_string(k) + "_" + std::to_string(l),
                  format_pauli(fam.rows[k][l]));
    return w.str();
}

inline PTCFamily load_ptc(const Config& c) {
    if (c.type() != "ptc")
        throw ConfigError(c.origin() + ": expected type = ptc");
    const FieldSpec& f = detail::field_from(c);
    const auto n = static_cast<std::size_t>(c.get_u64("n"));
    const auto lambda = static_cast<std::uint32_t>(c.get_u64("lambda"));
    const std::string mode = c.get("mode");
    if (mode == "explicit") {
        c.finish();
        try {
            return build_ptc_explicit(f, n, lambda);
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(c.origin() + ": " + ex.what());
        }
    }
    if (mode != "random")
        throw ConfigError(c.origin() + ": mode must be explicit or random");
    PTCFamily fam;
    fam.spec = &f;
    fam.n = n;
    fam.lambda = lambda;
    fam.mode = PTCMode::VerifiedRandom;
    const auto keys = static_cast<std::size_t>(c.get_u64("keys"));
    const auto eps = c.get_ints("eps");
    if (eps.size() != 2 || eps[1] == 0)
        throw ConfigError(c.origin() + ": eps must be 'numerator denominator'");
    fam.eps_num = static_cast<std::size_t>(eps[0]);
    fam.eps_den = static_cast<std::size_t>(eps[1]);
    fam.eps_exhaustive = c.get_flag_or("eps_exhaustive", false);
    for (std::size_t k = 0; k < keys; ++k) {
        std::vector<PauliFrame> rows;
        for (std::uint32_t l = 0; l < lambda; ++l)
            rows.push_back(parse_pauli(
                f, 1, c.get("row" + std::to_string(k) + "_" + std::to_string(l))));
        try {
            RREF span = detail::span_of_rows(f, rows);
            detail::validate_ptc_rows(f, rows, span);
            fam.rows.push_back(std::move(rows));
            fam.row_spans.push_back(std::move(span));
        } catch (const std::invalid_argument& ex) {
            throw ConfigError(c.origin() + ": key " + std::to_string(k) + ": " +
                              ex.what());
        }
    }
    c.finish();
    return fam;
}

// ---------------------------------------------------------------------------
// robust sharing scheme files
// ---------------------------------------------------------------------------

inline std::string write_rss_config(const RSSScheme& sch) {
    ConfigWriter w("rss");
    detail::put_field(w, *sch.field);
    w.put("n", sch.n);
    w.put("d", sch.d);
    w.put("s", sch.s);
    return w.str();
}

inline RSSScheme load_rss(const Config& c) {
    if (c.type() != "rss")
        throw ConfigError(c.origin() + ": expected type = rss");
    const FieldSpec& f = detail::field_from(c);
    const auto n = static_cast<std::size_t>(c.get_u64("n"));
    const auto d = static_cast<std::size_t>(c.get_u64("d"));
    const auto s = static_cast<std::size_t>(c.get_u64("s"));
    c.finish();
    try {
        return build_rss(f, n, d, s);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
}

// ---------------------------------------------------------------------------
// amplified (graph-spread) code files
// ---------------------------------------------------------------------------

/// Write `<name>.ael` plus css files for both component codes and the graph.
inline std::filesystem::path write_ael_files(const AELCode& ael,
                                             const std::filesystem::path& dir,
                                             const std::string& name) {
    write_css_files(ael.outer, dir, name + ".outer");
    write_css_files(ael.inner, dir, name + ".inner");
    save_text(dir / (name + ".graph"), write_graph_config(ael.graph));

    ConfigWriter w("ael");
    w.put("outer", name + ".outer.css");
    w.put("inner", name + ".inner.css");
    w.put("graph", name + ".graph");
    w.put("mode", ael.mode == AELMode::Basic ? "basic" : "reducing");
    w.put("eps0", ael.eps0);
    const std::filesystem::path main = dir / (name + ".ael");
    save_text(main, w.str());
    return main;
}

inline AELCode load_ael(const Config& c) {
    if (c.type() != "ael")
        throw ConfigError(c.origin() + ": expected type = ael");
    const CSSCode outer = load_css(Config::load(c.resolve(c.get("outer"))));
    const CSSCode inner = load_css(Config::load(c.resolve(c.get("inner"))));
    const BipartiteGraph graph = load_graph(Config::load(c.resolve(c.get("graph"))));
    const std::string mode = c.get("mode");
    if (mode != "basic" && mode != "reducing")
        throw ConfigError(c.origin() + ": mode must be basic or reducing");
    const double eps0 = c.get_double("eps0");
    c.finish();
    try {
        return build_ael(outer, inner, graph,
                         mode == "basic" ? AELMode::Basic : AELMode::Reducing, eps0);
    } catch (const std::invalid_argument& ex) {
        throw ConfigError(c.origin() + ": " + ex.what());
    }
}

}  // namespace aqec
