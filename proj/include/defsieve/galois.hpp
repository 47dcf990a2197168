#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <defsieve/arith.hpp>
#include <defsieve/newform.hpp>

namespace defsieve {

// Witness that the mod-ell representation of a weight-k form is reducible:
// a_p = p^a + p^{k-1-a} (mod ell) held for every tested prime p <= tested_bound
// with p != ell, p not dividing the level.
struct ReducibilityCertificate {
    std::uint64_t ell = 0;
    std::uint64_t exponent_a = 0;
    std::uint64_t tested_bound = 0;
    unsigned weight = 0;
};

// Primes ell at which the mod-ell representation of the level-1 weight-k form
// fails to be absolutely irreducible. Shipped as authoritative ground truth;
// the detector below reproduces it as a cross-check.
inline const std::map<unsigned, std::vector<std::uint64_t>>& irreducibility_table() {
    static const std::map<unsigned, std::vector<std::uint64_t>> table = {
        {12, {2, 3, 5, 7, 691}},
        {16, {2, 3, 5, 7, 11, 3617}},
        {18, {2, 3, 5, 7, 11, 13, 43867}},
        {20, {2, 3, 5, 7, 11, 13, 283, 617}},
        {22, {2, 3, 5, 7, 13, 17, 131, 593}},
        {26, {2, 3, 5, 7, 11, 17, 19, 657931}},
    };
    return table;
}

inline bool is_abs_irreducible(unsigned weight, std::uint64_t ell) {
    auto it = irreducibility_table().find(weight);
    if (it == irreducibility_table().end())
        throw UnsupportedWeightError("is_abs_irreducible: weight " +
                                     std::to_string(weight) + " is not tabulated");
    const auto& row = it->second;
    return std::find(row.begin(), row.end(), ell) == row.end();
}

namespace detail {

// Second character exponent: k-1-a reduced mod ell-1, lifted to [1, ell-1]
// when the reduction is zero. The lift is immaterial mod ell for p != ell
// but fixes one representative for reproducibility.
inline std::uint64_t companion_exponent(unsigned k, std::uint64_t a, std::uint64_t ell) {
    std::int64_t raw = static_cast<std::int64_t>(k) - 1 - static_cast<std::int64_t>(a);
    std::int64_t mod = static_cast<std::int64_t>(ell - 1);
    std::int64_t b = ((raw % mod) + mod) % mod;
    return b == 0 ? static_cast<std::uint64_t>(mod) : static_cast<std::uint64_t>(b);
}

}  // namespace detail

// True iff a_p = p^a + p^{k-1-a} (mod ell) for every prime p <= bound with
// p != ell and p not dividing the level.
inline bool congruence_holds(const NewformData& data, std::uint64_t ell, std::uint64_t a,
                             std::uint64_t bound) {
    if (!is_prime(ell)) throw std::invalid_argument("congruence_holds: ell must be prime");
    if (ell >= 2 && a > ell - 2)
        throw std::invalid_argument("congruence_holds: exponent outside [0, ell-2]");
    const Integer ell_i(ell);
    const std::uint64_t b = detail::companion_exponent(data.weight(), a, ell);
    for (std::uint64_t p : primes_upto(bound)) {
        if (p == ell || data.level() % p == 0) continue;
        Integer expected = powmod(Integer(p), a, ell_i) + powmod(Integer(p), b, ell_i);
        if (mod_nonneg(data.a(p), ell_i) != mod_nonneg(expected, ell_i)) return false;
    }
    return true;
}

// Detect all reducible primes for the given data by (i) gcd accumulation of
// a_p - p^a - p^{k-1-a} over primes p in (k, bound] for each a in [0, k-2],
// whose nonzero stable values carry the large candidates, then (ii) exhaustive
// verification of every prime ell <= 2k+2 and every large candidate via
// congruence_holds. Certificates are deduplicated by ell (smallest exponent).
inline std::vector<ReducibilityCertificate> reducible_primes(const NewformData& data,
                                                             std::uint64_t bound) {
    if (bound < 200) throw std::invalid_argument("reducible_primes: bound must be >= 200");
    const unsigned k = data.weight();
    const std::vector<std::uint64_t> primes = primes_upto(bound);
    // Unchanged-for-20-consecutive-primes is the stabilization contract;
    // anything still moving at the end of the scan is reported, not guessed.
    constexpr unsigned kStabilizationRun = 20;

    std::set<std::pair<std::uint64_t, std::uint64_t>> candidates;  // (ell, a)
    for (std::uint64_t a = 0; a + 2 <= k; ++a) {
        Integer g = 0;
        unsigned streak = 0;
        for (std::uint64_t p : primes) {
            if (p <= k || data.level() % p == 0) continue;
            Integer term = data.a(p) - ipow(Integer(p), a) -
                           ipow(Integer(p), static_cast<std::uint64_t>(k) - 1 - a);
            Integer next = boost::multiprecision::gcd(g, term);
            streak = (next == g) ? streak + 1 : 0;
            g = std::move(next);
        }
        if (streak < kStabilizationRun)
            throw DetectionUnstableError(
                "reducible_primes: gcd for exponent " + std::to_string(a) +
                " failed to stabilize over the last " + std::to_string(kStabilizationRun) +
                " primes");
        if (g == 0) continue;
        for (const Integer& q : factor(g).prime_set()) {
            if (q <= 2 * k + 2) continue;  // small primes are handled exhaustively
            candidates.emplace(q.convert_to<std::uint64_t>(), a);
        }
    }
    for (std::uint64_t ell : primes_upto(2 * k + 2))
        for (std::uint64_t a = 0; a + 2 <= ell; ++a) candidates.emplace(ell, a);

    std::map<std::uint64_t, ReducibilityCertificate> confirmed;
    for (const auto& [ell, a] : candidates) {
        if (confirmed.count(ell)) continue;  // candidates iterate a ascending per ell
        if (congruence_holds(data, ell, a, bound))
            confirmed[ell] = ReducibilityCertificate{ell, a, bound, k};
    }
    std::vector<ReducibilityCertificate> out;
    out.reserve(confirmed.size());
    for (const auto& [ell, cert] : confirmed) out.push_back(cert);
    return out;
}

// Every p <= bound violating a_p^2 <= 4 p^{k-1}. Empty result = data passes
// the sanity gate.
inline std::vector<RamanujanViolation> ramanujan_validate(const NewformData& data,
                                                          std::uint64_t bound) {
    std::vector<RamanujanViolation> violations;
    for (std::uint64_t p : primes_upto(bound)) {
        const Integer& ap = data.a(p);
        if (ap * ap > 4 * ipow(Integer(p), data.weight() - 1))
            violations.push_back({p, ap});
    }
    return violations;
}

}  // namespace defsieve
