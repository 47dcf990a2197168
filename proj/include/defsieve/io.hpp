#pragma once

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <defsieve/galois.hpp>
#include <defsieve/newform.hpp>
#include <defsieve/qseries.hpp>
#include <defsieve/sieve.hpp>

namespace defsieve {

inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Eigenvalue files: CSV with '#'-prefixed header lines, then "p,a_p" rows of
// strictly ascending primes covering every prime up to the declared bound.
//
//   # k=2
//   # N=11
//   # bound=100
//   # character=trivial
//   # localtype=11:special      (optional)
//   2,-2
//   3,-1
//   ...
// ---------------------------------------------------------------------------

namespace detail {

inline bool parse_u64(const std::string& s, std::uint64_t& out) {
    if (s.empty()) return false;
    out = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        if (out > (UINT64_MAX - (c - '0')) / 10) return false;
        out = out * 10 + (c - '0');
    }
    return true;
}

inline bool parse_integer(const std::string& s, Integer& out) {
    std::string t = s;
    if (!t.empty() && t[0] == '+') t = t.substr(1);
    if (t.empty()) return false;
    std::size_t start = (t[0] == '-') ? 1 : 0;
    if (start == t.size()) return false;
    for (std::size_t i = start; i < t.size(); ++i)
        if (t[i] < '0' || t[i] > '9') return false;
    out = Integer(t);
    return true;
}

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline NewformData ingest_newform(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("ingest_newform: cannot open " + path.string());

    std::optional<std::uint64_t> k, level, bound;
    std::map<std::uint64_t, int> character;
    std::map<std::uint64_t, LocalType> local_types;
    std::map<std::uint64_t, Integer> eigenvalues;
    std::uint64_t last_p = 0;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::string header = detail::trim(t.substr(1));
            std::size_t eq = header.find('=');
            if (eq == std::string::npos)
                throw ParseError("header line without '='", lineno, 1);
            std::string key = detail::trim(header.substr(0, eq));
            std::string value = detail::trim(header.substr(eq + 1));
            std::uint64_t v = 0;
            if (key == "k" || key == "N" || key == "bound") {
                if (!detail::parse_u64(value, v))
                    throw ParseError("bad integer in header '" + key + "'", lineno,
                                     eq + 2);
                if (key == "k") k = v;
                else if (key == "N") level = v;
                else bound = v;
            } else if (key == "character") {
                if (value != "trivial") {
                    std::stringstream ss(value);
                    std::string item;
                    while (std::getline(ss, item, ',')) {
                        std::size_t colon = item.find(':');
                        std::uint64_t p = 0;
                        Integer w;
                        if (colon == std::string::npos ||
                            !detail::parse_u64(detail::trim(item.substr(0, colon)), p) ||
                            !detail::parse_integer(detail::trim(item.substr(colon + 1)), w) ||
                            (w != 1 && w != -1))
                            throw ParseError("bad character entry '" + item + "'", lineno,
                                             eq + 2);
                        character[p] = static_cast<int>(w);
                    }
                }
            } else if (key == "localtype") {
                std::size_t colon = value.find(':');
                std::uint64_t p = 0;
                if (colon == std::string::npos ||
                    !detail::parse_u64(detail::trim(value.substr(0, colon)), p))
                    throw ParseError("bad localtype entry", lineno, eq + 2);
                std::string name = detail::trim(value.substr(colon + 1));
                LocalType lt;
                if (name == "special") lt = LocalType::special;
                else if (name == "principal_series") lt = LocalType::principal_series;
                else if (name == "supercuspidal") lt = LocalType::supercuspidal;
                else if (name == "unknown") lt = LocalType::unknown;
                else throw ParseError("unknown local type '" + name + "'", lineno, eq + 2);
                local_types[p] = lt;
            } else {
                throw ParseError("unknown header key '" + key + "'", lineno, 1);
            }
            continue;
        }
        std::size_t comma = t.find(',');
        if (comma == std::string::npos)
            throw ParseError("data row without ','", lineno, 1);
        std::uint64_t p = 0;
        Integer ap;
        if (!detail::parse_u64(detail::trim(t.substr(0, comma)), p))
            throw ParseError("bad prime index", lineno, 1);
        if (!detail::parse_integer(detail::trim(t.substr(comma + 1)), ap))
            throw ParseError("bad eigenvalue", lineno, comma + 2);
        if (!is_prime(p))
            throw NonPrimeIndexError("row index " + std::to_string(p) + " is not prime",
                                     p);
        if (p <= last_p)
            throw ParseError("prime indices must be strictly ascending", lineno, 1);
        last_p = p;
        eigenvalues.emplace(p, std::move(ap));
    }

    if (!k) throw ParseError("header is missing 'k'", lineno, 1);
    if (!level) throw ParseError("header is missing 'N'", lineno, 1);
    if (!bound) throw ParseError("header is missing 'bound'", lineno, 1);

    if (*bound >= 2)
        for (std::uint64_t p : primes_upto(*bound))
            if (eigenvalues.find(p) == eigenvalues.end())
                throw MissingPrimeError("eigenvalue for p=" + std::to_string(p) +
                                            " is missing (bound " +
                                            std::to_string(*bound) + ")",
                                        p);

    NewformData data(path.stem().string(), static_cast<unsigned>(*k),
                     static_cast<unsigned>(*level), Source::ingested, *bound,
                     std::move(eigenvalues), std::move(character), std::move(local_types));
    // Ramanujan failures do not reject the data; they mark it suspect.
    data.attach_suspect_report(ramanujan_validate(data, *bound));
    return data;
}

// ---------------------------------------------------------------------------
// Cached q-expansions: line 1 "QEXP v1 k=<k> N=1 terms=<T>", then one decimal
// coefficient per line, index implicit from 0.
// ---------------------------------------------------------------------------

inline std::string qexp_to_string(const QExpansion& f, unsigned k) {
    std::ostringstream out;
    out << "QEXP v1 k=" << k << " N=1 terms=" << f.precision() << "\n";
    for (std::size_t n = 0; n < f.precision(); ++n)
        out << f.coefficient(n) << "\n";
    return out.str();
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& body) {
    std::filesystem::path tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << body;
    }
    std::filesystem::rename(tmp, path);
}

inline void write_qexp_cache(const std::filesystem::path& path, const QExpansion& f,
                             unsigned k) {
    write_file_atomic(path, qexp_to_string(f, k));
}

struct CachedExpansion {
    unsigned weight = 0;
    QExpansion series;
};

inline std::optional<CachedExpansion> read_qexp_cache(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string header;
    if (!std::getline(in, header)) return std::nullopt;
    unsigned k = 0;
    std::uint64_t terms = 0;
    {
        std::istringstream hs(header);
        std::string magic, version, kv;
        hs >> magic >> version;
        if (magic != "QEXP" || version != "v1") return std::nullopt;
        while (hs >> kv) {
            std::size_t eq = kv.find('=');
            if (eq == std::string::npos) return std::nullopt;
            std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
            std::uint64_t v = 0;
            if (!detail::parse_u64(value, v)) return std::nullopt;
            if (key == "k") k = static_cast<unsigned>(v);
            else if (key == "terms") terms = v;
            else if (key == "N" && v != 1) return std::nullopt;
        }
    }
    if (terms == 0) return std::nullopt;
    std::vector<Integer> coeffs;
    coeffs.reserve(terms);
    std::string line;
    while (coeffs.size() < terms && std::getline(in, line)) {
        Integer c;
        if (!detail::parse_integer(detail::trim(line), c)) return std::nullopt;
        coeffs.push_back(std::move(c));
    }
    if (coeffs.size() != terms) return std::nullopt;
    return CachedExpansion{k, QExpansion(std::move(coeffs), k)};
}

inline std::filesystem::path cache_dir_from_env() {
    if (const char* env = std::getenv("DEFSIEVE_CACHE_DIR")) return env;
    return ".qcache";
}

// Load the level-1 weight-k form from the cache, computing and storing it when
// the cache has nothing of sufficient precision. The returned expansion has at
// least min_terms coefficients.
inline QExpansion cached_level1_form(unsigned k, std::size_t min_terms,
                                     const std::filesystem::path& cache_dir) {
    std::filesystem::path file = cache_dir / ("qexp_w" + std::to_string(k) + ".txt");
    if (auto cached = read_qexp_cache(file))
        if (cached->weight == k && cached->series.precision() >= min_terms)
            return cached->series;
    QExpansion f = level1_cuspform(k, min_terms);
    std::error_code ec;
    std::filesystem::create_directories(cache_dir, ec);
    if (!ec) write_qexp_cache(file, f, k);
    return f;
}

// ---------------------------------------------------------------------------
// Report emission. Identical inputs and tool version serialize
// bit-identically: fixed key order, sorted entries, no timestamps.
// ---------------------------------------------------------------------------

using json = nlohmann::ordered_json;

inline json reason_to_json(const Reason& r) {
    json j;
    j["criterion"] = r.criterion;
    if (r.p) j["p"] = *r.p;
    if (r.divisor) j["divisor"] = *r.divisor;
    return j;
}

inline json report_json(const Classification& c) {
    json meta;
    meta["form"] = c.form_id;
    meta["weight"] = c.weight;
    meta["level"] = c.level;
    meta["source"] = c.source == Source::builtin ? "builtin" : "ingested";
    meta["set"] = c.ramified_set;
    meta["lmin"] = c.lmin;
    meta["lmax"] = c.lmax;
    meta["eigenvalue_bound"] = c.eigenvalue_bound;
    meta["tool_version"] = kToolVersion;
    meta["notes"] = c.notes;
    json flags = json::array();
    for (const auto& v : c.ramanujan_flags)
        flags.push_back({{"p", v.p}, {"a_p", v.a_p.str()}});
    meta["ramanujan_violations"] = flags;

    json entries = json::array();
    for (const auto& e : c.entries) {
        json je;
        je["ell"] = e.ell;
        je["status"] = to_string(e.status);
        json reasons = json::array();
        for (const auto& r : e.reasons) reasons.push_back(reason_to_json(r));
        je["reasons"] = reasons;
        entries.push_back(je);
    }

    json doc;
    doc["metadata"] = meta;
    doc["entries"] = entries;
    doc["discrepancies"] = c.discrepancies;
    return doc;
}

inline std::string emit_report_json(const Classification& c) {
    return report_json(c).dump(2) + "\n";
}

namespace detail {

inline std::string status_abbrev(Status s, const std::vector<Reason>& reasons) {
    switch (s) {
        case Status::CERTIFIED_UNOBSTRUCTED: return "CERT ✓";
        case Status::SCREEN_PASS: return "PASS";
        case Status::SCREEN_FAIL: {
            std::string out = "FAIL ✗";
            for (const auto& r : reasons)
                if (r.p) { out += " @" + std::to_string(*r.p); break; }
            return out;
        }
        case Status::NOT_ABS_IRREDUCIBLE: return "NOTIRR";
        case Status::EXCLUDED_SMALL: return "SMALL";
        case Status::INDETERMINATE_LOCAL_TYPE: return "INDET";
    }
    return "?";
}

inline std::string reason_text(const Reason& r) {
    std::string out = r.criterion;
    if (r.p) out += " p=" + std::to_string(*r.p);
    if (r.divisor) out += " divisor=" + std::to_string(*r.divisor);
    return out;
}

}  // namespace detail

inline std::string emit_report_text(const Classification& c) {
    std::ostringstream out;
    out << "form " << c.form_id << " (k=" << c.weight << ", N=" << c.level << ", "
        << (c.source == Source::builtin ? "builtin" : "ingested") << ")\n";
    out << "S = {";
    for (std::size_t i = 0; i < c.ramified_set.size(); ++i)
        out << (i ? "," : "") << c.ramified_set[i];
    out << "}  range = [" << c.lmin << ", " << c.lmax << "]  eigenvalue bound = "
        << c.eigenvalue_bound << "\n\n";

    std::size_t ell_width = 3;
    for (const auto& e : c.entries)
        ell_width = std::max(ell_width, std::to_string(e.ell).size());
    for (const auto& e : c.entries) {
        std::string ell_str = std::to_string(e.ell);
        out << std::string(2 + ell_width - ell_str.size(), ' ') << ell_str << "  ";
        out << detail::status_abbrev(e.status, e.reasons);
        if (!e.reasons.empty()) {
            out << "   ";
            for (std::size_t i = 0; i < e.reasons.size(); ++i)
                out << (i ? "; " : "") << detail::reason_text(e.reasons[i]);
        }
        out << "\n";
    }
    if (!c.notes.empty()) {
        out << "\nnotes:\n";
        for (const auto& n : c.notes) out << "  - " << n << "\n";
    }
    if (!c.ramanujan_flags.empty()) {
        out << "\nramanujan violations:\n";
        for (const auto& v : c.ramanujan_flags)
            out << "  - p=" << v.p << " a_p=" << v.a_p << "\n";
    }
    if (!c.discrepancies.empty()) {
        out << "\ndiscrepancies:\n";
        for (const auto& d : c.discrepancies) out << "  - " << d << "\n";
    }
    return out.str();
}

}  // namespace defsieve
