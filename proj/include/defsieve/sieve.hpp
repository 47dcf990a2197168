#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <defsieve/arith.hpp>
#include <defsieve/galois.hpp>
#include <defsieve/newform.hpp>

namespace defsieve {

// Unramified local screen at p: the primes ell (other than p) at which the
// local invariant can be nonzero all divide (p-1) * delta_p, where
// delta_p = a_p^2 - p^{k-2} (p+1)^2 omega(p).
struct LocalScreenReport {
    std::uint64_t p = 0;
    Integer delta_p;
    Factorization delta_factorization;
    std::vector<Integer> eps_candidates;  // primes dividing p - 1
    std::vector<Integer> candidates;      // union with the factors of delta_p
};

enum class ScreenResult { pass, fail, small };

// Screen at a prime p dividing the level whose local component is special:
// the effective obstruction candidates divide 2p(p^2 - 1). A finite set of
// further congruence primes exists but is not computed here.
struct SpecialReport {
    std::uint64_t p = 0;
    std::vector<Integer> effective_candidates;
    bool residual_note = true;
};

enum class Status {
    CERTIFIED_UNOBSTRUCTED,
    SCREEN_PASS,
    SCREEN_FAIL,
    NOT_ABS_IRREDUCIBLE,
    EXCLUDED_SMALL,
    INDETERMINATE_LOCAL_TYPE,
};

inline const char* to_string(Status s) {
    switch (s) {
        case Status::CERTIFIED_UNOBSTRUCTED: return "CERTIFIED_UNOBSTRUCTED";
        case Status::SCREEN_PASS: return "SCREEN_PASS";
        case Status::SCREEN_FAIL: return "SCREEN_FAIL";
        case Status::NOT_ABS_IRREDUCIBLE: return "NOT_ABS_IRREDUCIBLE";
        case Status::EXCLUDED_SMALL: return "EXCLUDED_SMALL";
        case Status::INDETERMINATE_LOCAL_TYPE: return "INDETERMINATE_LOCAL_TYPE";
    }
    return "?";
}

struct Reason {
    std::string criterion;
    std::optional<std::uint64_t> p;
    std::optional<std::uint64_t> divisor;
};

struct ClassEntry {
    std::uint64_t ell = 0;
    Status status = Status::SCREEN_PASS;
    std::vector<Reason> reasons;
};

struct Classification {
    std::string form_id;
    unsigned weight = 0;
    unsigned level = 1;
    Source source = Source::builtin;
    std::vector<std::uint64_t> ramified_set;  // the requested S, sorted
    std::uint64_t lmin = 0;
    std::uint64_t lmax = 0;
    std::uint64_t eigenvalue_bound = 0;
    std::vector<ClassEntry> entries;  // ascending ell, one per prime in range
    std::vector<std::string> discrepancies;  // table-vs-detector mismatches
    std::vector<std::string> notes;
    std::vector<RamanujanViolation> ramanujan_flags;
};

inline LocalScreenReport local_screen_unramified(const NewformData& data, std::uint64_t p) {
    if (!is_prime(p))
        throw std::invalid_argument("local_screen_unramified: p must be prime");
    if (data.level() % p == 0)
        throw NotApplicableError("local_screen_unramified: p=" + std::to_string(p) +
                                 " divides the level");
    const Integer& ap = data.a(p);
    Integer delta_p = ap * ap - ipow(Integer(p), data.weight() - 2) * (p + 1) * (p + 1) *
                                   data.omega(p);
    if (delta_p == 0)
        throw DegenerateScreenError("local_screen_unramified: screen integer vanishes at p=" +
                                        std::to_string(p) +
                                        " (inconsistent with the Ramanujan bound)",
                                    p);
    LocalScreenReport report;
    report.p = p;
    report.delta_p = delta_p;
    report.delta_factorization = factor(delta_p);
    if (p > 2) report.eps_candidates = factor(Integer(p) - 1).prime_set();
    std::set<Integer> all(report.eps_candidates.begin(), report.eps_candidates.end());
    for (const Integer& q : report.delta_factorization.prime_set()) all.insert(q);
    report.candidates.assign(all.begin(), all.end());
    return report;
}

// The ell = p screen: automatic vanishing for k > 2, ell > 2k; at weight 2
// the condition is a_ell^2 != omega(ell) (mod ell). Primes ell <= 2k are
// deferred to the certification policy.
inline ScreenResult ell_screen(const NewformData& data, std::uint64_t ell) {
    if (!is_prime(ell)) throw std::invalid_argument("ell_screen: ell must be prime");
    if (data.level() % ell == 0)
        throw NotApplicableError("ell_screen: ell=" + std::to_string(ell) +
                                 " divides the level");
    const unsigned k = data.weight();
    if (ell <= 2 * k) return ScreenResult::small;
    if (k > 2) return ScreenResult::pass;
    const Integer& al = data.a(ell);
    Integer lhs = mod_nonneg(al * al, ell);
    Integer rhs = mod_nonneg(Integer(data.omega(ell)), ell);
    return lhs != rhs ? ScreenResult::pass : ScreenResult::fail;
}

inline SpecialReport special_screen(const NewformData& data, std::uint64_t p) {
    if (!is_prime(p)) throw std::invalid_argument("special_screen: p must be prime");
    if (data.level() % p != 0)
        throw NotApplicableError("special_screen: p=" + std::to_string(p) +
                                 " does not divide the level");
    if (data.local_type(p) != LocalType::special)
        throw NotApplicableError("special_screen: local type at p=" + std::to_string(p) +
                                 " is " + to_string(data.local_type(p)) + ", not special");
    SpecialReport report;
    report.p = p;
    Integer bound_integer = 2 * Integer(p) * (Integer(p) * p - 1);
    report.effective_candidates = factor(bound_integer).prime_set();
    report.residual_note = true;
    return report;
}

namespace detail {

struct UnramifiedScreenData {
    std::uint64_t p = 0;
    Integer divisibility_carrier;  // (p-1) * delta_p, or 0 when degenerate
    bool degenerate = false;
};

inline std::vector<std::uint64_t> level_primes(unsigned level) {
    std::vector<std::uint64_t> out;
    if (level > 1)
        for (const Integer& q : factor(Integer(level)).prime_set())
            out.push_back(q.convert_to<std::uint64_t>());
    return out;
}

}  // namespace detail

// Classify every prime ell in [lmin, lmax] for the deformation problem with
// ramification set S. Rule order per ell:
//   1. table / detector: not absolutely irreducible;
//   2. ell = 2 (odd residue characteristic required);
//   3. ell <= k+1: below the certified range;
//   4. local screens at every p in S and every p | N;
//   5. the ell = p screen;
//   6. all screens passed: certified for builtin forms, screen-pass otherwise.
inline Classification classify(const NewformData& data, std::vector<std::uint64_t> S,
                               std::uint64_t lmin, std::uint64_t lmax) {
    for (std::uint64_t p : S)
        if (!is_prime(p))
            throw std::invalid_argument("classify: S contains the non-prime " +
                                        std::to_string(p));
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());

    Classification result;
    result.form_id = data.id();
    result.weight = data.weight();
    result.level = data.level();
    result.source = data.source();
    result.ramified_set = S;
    result.lmin = lmin;
    result.lmax = lmax;
    result.eigenvalue_bound = data.bound();
    result.ramanujan_flags = data.suspect_report();

    const unsigned k = data.weight();
    const std::vector<std::uint64_t> bad_primes = detail::level_primes(data.level());

    // Screen sites: S together with the primes dividing the level.
    std::vector<std::uint64_t> sites = S;
    for (std::uint64_t q : bad_primes)
        if (std::find(sites.begin(), sites.end(), q) == sites.end()) sites.push_back(q);
    std::sort(sites.begin(), sites.end());

    // Precompute the unramified screen carrier (p-1) * delta_p per good site.
    std::map<std::uint64_t, detail::UnramifiedScreenData> unramified;
    for (std::uint64_t p : sites) {
        if (data.level() % p == 0) continue;
        detail::UnramifiedScreenData u;
        u.p = p;
        const Integer& ap = data.a(p);
        Integer delta_p =
            ap * ap - ipow(Integer(p), k - 2) * (p + 1) * (p + 1) * data.omega(p);
        if (delta_p == 0) {
            u.degenerate = true;
            result.notes.push_back("degenerate screen at p=" + std::to_string(p) +
                                   ": a_p^2 = p^{k-2}(p+1)^2 omega(p), every ell fails");
            result.ramanujan_flags.push_back({p, ap});
        } else {
            u.divisibility_carrier = (Integer(p) - 1) * delta_p;
        }
        unramified[p] = std::move(u);
    }

    // Special-prime candidate carriers 2p(p^2-1) for p | N of special type.
    std::map<std::uint64_t, Integer> special_carrier;
    for (std::uint64_t p : bad_primes)
        if (data.local_type(p) == LocalType::special) {
            special_carrier[p] = 2 * Integer(p) * (Integer(p) * p - 1);
            result.notes.push_back(
                "special prime p=" + std::to_string(p) +
                ": a finite residual set of level-lowering congruence primes is "
                "not computed; passes at p are modulo that set");
        }

    // Reducibility detection: cross-check against the table for builtin
    // forms, advisory evidence for ingested ones.
    std::set<std::uint64_t> detected;
    bool detector_ran = false;
    if (data.bound() >= 200) {
        std::uint64_t detection_bound = std::min<std::uint64_t>(2000, data.bound());
        for (const auto& cert : reducible_primes(data, detection_bound))
            detected.insert(cert.ell);
        detector_ran = true;
        if (data.source() == Source::builtin) {
            const auto& row = irreducibility_table().at(k);
            std::set<std::uint64_t> table_set(row.begin(), row.end());
            for (std::uint64_t ell : detected)
                if (!table_set.count(ell))
                    result.discrepancies.push_back(
                        "detector reports ell=" + std::to_string(ell) +
                        " reducible (bound " + std::to_string(detection_bound) +
                        ") but the table omits it; the table is trusted");
            for (std::uint64_t ell : table_set)
                if (!detected.count(ell))
                    result.discrepancies.push_back(
                        "table lists ell=" + std::to_string(ell) +
                        " but the detector (bound " + std::to_string(detection_bound) +
                        ") did not confirm it; the table is trusted");
        }
    } else {
        result.notes.push_back("reducibility detector skipped: eigenvalue bound " +
                               std::to_string(data.bound()) + " is below 200");
    }

    const bool builtin = data.source() == Source::builtin;
    bool mazur_range_used_with_S = false;

    std::vector<std::uint64_t> range_primes;
    if (lmax >= 2)
        for (std::uint64_t ell : primes_upto(lmax))
            if (ell >= lmin) range_primes.push_back(ell);

    for (std::uint64_t ell : range_primes) {
        ClassEntry entry;
        entry.ell = ell;

        bool not_irreducible =
            builtin ? !is_abs_irreducible(k, ell) : (detector_ran && detected.count(ell));
        if (not_irreducible) {
            entry.status = Status::NOT_ABS_IRREDUCIBLE;
            entry.reasons.push_back(
                {builtin ? "irreducibility_table" : "reducibility_detector", std::nullopt,
                 std::nullopt});
            result.entries.push_back(std::move(entry));
            continue;
        }
        if (ell == 2) {
            entry.status = Status::EXCLUDED_SMALL;
            entry.reasons.push_back({"even_characteristic", std::nullopt, std::nullopt});
            result.entries.push_back(std::move(entry));
            continue;
        }
        if (ell <= k + 1) {
            entry.status = Status::EXCLUDED_SMALL;
            entry.reasons.push_back({"small_prime_bound", std::nullopt, std::nullopt});
            result.entries.push_back(std::move(entry));
            continue;
        }

        std::vector<Reason> fails;
        std::vector<Reason> indeterminate;
        for (std::uint64_t p : sites) {
            if (data.level() % p == 0) {
                auto it = special_carrier.find(p);
                if (it != special_carrier.end()) {
                    if (it->second % ell == 0)
                        fails.push_back({"special_screen", p, ell});
                } else {
                    indeterminate.push_back({"indeterminate_local_type", p, std::nullopt});
                }
            } else if (p != ell) {
                const auto& u = unramified.at(p);
                if (u.degenerate)
                    fails.push_back({"degenerate_screen", p, std::nullopt});
                else if (u.divisibility_carrier % ell == 0)
                    fails.push_back({"unramified_screen", p, ell});
            }
        }
        if (!fails.empty()) {
            entry.status = Status::SCREEN_FAIL;
            entry.reasons = std::move(fails);
            result.entries.push_back(std::move(entry));
            continue;
        }
        if (!indeterminate.empty()) {
            entry.status = Status::INDETERMINATE_LOCAL_TYPE;
            entry.reasons = std::move(indeterminate);
            result.entries.push_back(std::move(entry));
            continue;
        }

        // ell is coprime to N here: otherwise it appeared as a ramified site
        // and was caught above (special carrier always contains p itself).
        ScreenResult r = ell_screen(data, ell);
        if (r == ScreenResult::fail) {
            entry.status = Status::SCREEN_FAIL;
            entry.reasons.push_back({"ell_screen", ell, std::nullopt});
            result.entries.push_back(std::move(entry));
            continue;
        }
        if (r == ScreenResult::small) {
            // k+1 < ell <= 2k: covered by the Mazur small-prime verification
            // for the six level-1 forms, unverified for ingested data.
            entry.reasons.push_back(
                {builtin ? "mazur_small_prime_check" : "mazur_range_unverified", ell,
                 std::nullopt});
            if (builtin && !S.empty()) mazur_range_used_with_S = true;
        }
        if (builtin) {
            entry.status = Status::CERTIFIED_UNOBSTRUCTED;
        } else {
            entry.status = Status::SCREEN_PASS;
            entry.reasons.push_back({"ingested_not_certifiable", std::nullopt, std::nullopt});
        }
        result.entries.push_back(std::move(entry));
    }

    if (mazur_range_used_with_S)
        result.notes.push_back(
            "certification of primes in (k+1, 2k] relies on the small-prime "
            "verification at the place ell, taken to be independent of S");

    return result;
}

}  // namespace defsieve
