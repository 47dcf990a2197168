#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace defsieve {

// Base class for all domain errors raised by this library. Anything not
// derived from Error (std::invalid_argument etc.) indicates a contract
// violation by the caller rather than a data condition.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// factor(): a cofactor resisted the factoring budget.
class BudgetExceededError : public Error {
public:
    explicit BudgetExceededError(const std::string& what) : Error(what) {}
};

// is_prime(): input is at or above the deterministic Miller-Rabin bound.
class PrimalityBoundError : public Error {
public:
    explicit PrimalityBoundError(const std::string& what) : Error(what) {}
};

// eisenstein(): the normalizing scalar 2k/B_k is not an integer for this k.
class NonIntegralCoefficientError : public Error {
public:
    explicit NonIntegralCoefficientError(const std::string& what) : Error(what) {}
};

class UnsupportedWeightError : public Error {
public:
    explicit UnsupportedWeightError(const std::string& what) : Error(what) {}
};

class InsufficientPrecisionError : public Error {
public:
    explicit InsufficientPrecisionError(const std::string& what) : Error(what) {}
};

// Coefficient access beyond the known precision window.
class OutOfPrecisionError : public Error {
public:
    explicit OutOfPrecisionError(const std::string& what) : Error(what) {}
};

// A required eigenvalue (or other datum) is missing; names the prime.
class InsufficientDataError : public Error {
public:
    InsufficientDataError(const std::string& what, std::uint64_t missing_prime)
        : Error(what), missing_prime_(missing_prime) {}
    std::uint64_t missing_prime() const { return missing_prime_; }

private:
    std::uint64_t missing_prime_ = 0;
};

// reducible_primes(): some gcd accumulator failed to stabilize.
class DetectionUnstableError : public Error {
public:
    explicit DetectionUnstableError(const std::string& what) : Error(what) {}
};

// A screen was invoked at a prime outside its applicability hypothesis.
class NotApplicableError : public Error {
public:
    explicit NotApplicableError(const std::string& what) : Error(what) {}
};

// Unramified screen with a vanishing screen integer: every ell is a
// candidate, which the Ramanujan bound rules out for honest data.
class DegenerateScreenError : public Error {
public:
    DegenerateScreenError(const std::string& what, std::uint64_t p)
        : Error(what), p_(p) {}
    std::uint64_t p() const { return p_; }

private:
    std::uint64_t p_ = 0;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_ = 0;
    std::size_t column_ = 0;
};

class MissingPrimeError : public Error {
public:
    MissingPrimeError(const std::string& what, std::uint64_t p)
        : Error(what), p_(p) {}
    std::uint64_t p() const { return p_; }

private:
    std::uint64_t p_ = 0;
};

class NonPrimeIndexError : public Error {
public:
    NonPrimeIndexError(const std::string& what, std::uint64_t n)
        : Error(what), n_(n) {}
    std::uint64_t n() const { return n_; }

private:
    std::uint64_t n_ = 0;
};

}  // namespace defsieve
