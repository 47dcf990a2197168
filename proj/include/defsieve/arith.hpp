#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include <defsieve/errors.hpp>

namespace defsieve {

// Exact arbitrary-precision integers and rationals. No floating point
// appears anywhere in the library.
using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline Integer ipow(const Integer& base, std::uint64_t exp) {
    Integer result = 1;
    Integer b = base;
    while (exp != 0) {
        if (exp & 1) result *= b;
        b *= b;
        exp >>= 1;
    }
    return result;
}

// Least non-negative residue; cpp_int's % follows the dividend's sign.
inline Integer mod_nonneg(const Integer& a, const Integer& m) {
    Integer r = a % m;
    if (r < 0) r += m;
    return r;
}

inline Integer powmod(Integer base, Integer exp, const Integer& m) {
    base = mod_nonneg(base, m);
    return boost::multiprecision::powm(base, exp, m);
}

// All primes <= bound, ascending.
inline std::vector<std::uint64_t> primes_upto(std::uint64_t bound) {
    if (bound < 2) throw std::invalid_argument("primes_upto: bound must be >= 2");
    std::vector<bool> composite(bound + 1, false);
    std::vector<std::uint64_t> primes;
    for (std::uint64_t n = 2; n <= bound; ++n) {
        if (composite[n]) continue;
        primes.push_back(n);
        for (std::uint64_t m = n * n; m <= bound; m += n) composite[m] = true;
    }
    return primes;
}

// Largest n for which the 13-witness Miller-Rabin test below is a proof
// (Sorenson & Webster): 3'317'044'064'679'887'385'961'981.
inline const Integer& miller_rabin_deterministic_bound() {
    static const Integer bound("3317044064679887385961981");
    return bound;
}

// Deterministic primality for 0 <= n below the bound above; larger inputs
// are rejected rather than answered probabilistically.
inline bool is_prime(const Integer& n) {
    if (n < 0) throw std::invalid_argument("is_prime: n must be non-negative");
    if (n >= miller_rabin_deterministic_bound())
        throw PrimalityBoundError("is_prime: " + n.str() +
                                  " is beyond the deterministic Miller-Rabin bound");
    if (n < 2) return false;
    static constexpr std::uint64_t witnesses[] = {2,  3,  5,  7,  11, 13, 17,
                                                  19, 23, 29, 31, 37, 41};
    for (std::uint64_t w : witnesses) {
        if (n == w) return true;
        if (n % w == 0) return false;
    }
    Integer d = n - 1;
    unsigned s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (std::uint64_t w : witnesses) {
        Integer x = powmod(w, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness_of_compositeness = true;
        for (unsigned r = 1; r < s; ++r) {
            x = (x * x) % n;
            if (x == n - 1) {
                witness_of_compositeness = false;
                break;
            }
        }
        if (witness_of_compositeness) return false;
    }
    return true;
}

inline bool is_prime(std::uint64_t n) { return is_prime(Integer(n)); }

struct FactorExponent {
    Integer prime;
    unsigned exponent = 0;

    friend bool operator==(const FactorExponent& a, const FactorExponent& b) {
        return a.prime == b.prime && a.exponent == b.exponent;
    }
};

struct Factorization {
    Integer value;  // the original (nonzero) input
    int sign = 1;
    std::vector<FactorExponent> factors;  // primes strictly ascending

    Integer recompose() const {
        Integer r = sign;
        for (const auto& fe : factors) r *= ipow(fe.prime, fe.exponent);
        return r;
    }

    std::vector<Integer> prime_set() const {
        std::vector<Integer> out;
        out.reserve(factors.size());
        for (const auto& fe : factors) out.push_back(fe.prime);
        return out;
    }
};

// Pollard rho / trial-division budget. The defaults split 64-bit-scale
// semiprimes comfortably; callers retry with a larger budget on
// BudgetExceededError.
struct FactorBudget {
    std::uint64_t trial_division_bound = 1'000'000;
    std::uint64_t rho_iterations_per_polynomial = 1u << 22;
    unsigned rho_polynomials = 24;
};

namespace detail {

// Brent-style rho on composite m with polynomial x^2 + c, start x = 2.
// Returns a proper divisor or 0 when the iteration budget runs out.
inline Integer pollard_rho_brent(const Integer& m, std::uint64_t c,
                                 std::uint64_t max_iterations) {
    Integer y = 2, q = 1, g = 1, x = 0, ys = 0;
    std::uint64_t r = 1, spent = 0;
    const std::uint64_t batch = 128;
    while (g == 1 && spent < max_iterations) {
        x = y;
        for (std::uint64_t i = 0; i < r; ++i) y = (y * y + c) % m;
        std::uint64_t k = 0;
        while (k < r && g == 1 && spent < max_iterations) {
            ys = y;
            std::uint64_t steps = std::min(batch, r - k);
            for (std::uint64_t i = 0; i < steps; ++i) {
                y = (y * y + c) % m;
                Integer diff = x - y;
                if (diff < 0) diff = -diff;
                q = (q * diff) % m;
            }
            spent += steps;
            g = boost::multiprecision::gcd(q, m);
            k += steps;
        }
        if (r <= (std::uint64_t(1) << 62)) r *= 2;
    }
    if (g == m) {
        // The batched gcd jumped past the factor; replay from the last
        // snapshot one step at a time.
        g = 1;
        for (std::uint64_t i = 0; g == 1 && i <= batch; ++i) {
            ys = (ys * ys + c) % m;
            Integer diff = x - ys;
            if (diff < 0) diff = -diff;
            g = boost::multiprecision::gcd(diff, m);
        }
    }
    if (g == 1 || g == m) return 0;
    return g;
}

}  // namespace detail

// Complete factorization of n != 0: trial division to the budget's fixed
// bound, then Pollard rho with the documented deterministic polynomial
// sequence c = 1, 2, 3, ... Never returns a partial factorization; a
// resistant cofactor raises BudgetExceededError instead.
inline Factorization factor(const Integer& n, const FactorBudget& budget = {}) {
    if (n == 0) throw std::invalid_argument("factor: n must be nonzero");
    Factorization result;
    result.value = n;
    result.sign = n < 0 ? -1 : 1;
    Integer m = boost::multiprecision::abs(n);

    std::vector<std::pair<Integer, unsigned>> found;
    auto record = [&found](const Integer& p, unsigned e) { found.emplace_back(p, e); };

    auto strip = [&m, &record](const Integer& d) {
        unsigned e = 0;
        while (m % d == 0) {
            m /= d;
            ++e;
        }
        if (e) record(d, e);
    };

    strip(2);
    for (std::uint64_t d = 3; d <= budget.trial_division_bound && Integer(d) * d <= m; d += 2)
        strip(d);

    if (m > 1) {
        const Integer trial_ceiling =
            Integer(budget.trial_division_bound) * budget.trial_division_bound;
        std::vector<Integer> pending{m};
        while (!pending.empty()) {
            Integer c = pending.back();
            pending.pop_back();
            // All factors of c exceed the trial bound, so c below the bound's
            // square is prime without any further test. Cofactors at or above
            // the Miller-Rabin bound are never declared prime; rho either
            // splits them or the budget runs out.
            if (c <= trial_ceiling ||
                (c < miller_rabin_deterministic_bound() && is_prime(c))) {
                record(c, 1);
                continue;
            }
            Integer divisor = 0;
            for (unsigned poly = 1; poly <= budget.rho_polynomials && divisor == 0; ++poly)
                divisor = detail::pollard_rho_brent(c, poly, budget.rho_iterations_per_polynomial);
            if (divisor == 0)
                throw BudgetExceededError("factor: cofactor " + c.str() +
                                          " resisted the factoring budget");
            pending.push_back(divisor);
            pending.push_back(c / divisor);
        }
    }

    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < found.size(); ++i) {
        if (!result.factors.empty() && result.factors.back().prime == found[i].first)
            result.factors.back().exponent += found[i].second;
        else
            result.factors.push_back({found[i].first, found[i].second});
    }
    return result;
}

// Sum of r-th powers of the divisors of n.
inline Integer sigma_r(std::uint64_t n, unsigned r) {
    if (n < 1) throw std::invalid_argument("sigma_r: n must be >= 1");
    Integer total = 0;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        total += ipow(Integer(d), r);
        std::uint64_t e = n / d;
        if (e != d) total += ipow(Integer(e), r);
    }
    return total;
}

// Exact Bernoulli number B_m (convention B_1 = -1/2), via the recurrence
// sum_{j=0}^{m} C(m+1, j) B_j = 0.
inline Rational bernoulli(unsigned m) {
    std::vector<Rational> b(m + 1);
    b[0] = 1;
    for (unsigned i = 1; i <= m; ++i) {
        Rational acc = 0;
        Integer binom = 1;  // C(i+1, j), updated multiplicatively over j
        for (unsigned j = 0; j < i; ++j) {
            acc += Rational(binom) * b[j];
            binom = binom * (i + 1 - j) / (j + 1);
        }
        b[i] = -acc / Rational(i + 1);
    }
    return b[m];
}

}  // namespace defsieve
