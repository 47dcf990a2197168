#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <defsieve/arith.hpp>
#include <defsieve/errors.hpp>

namespace defsieve {

// Truncated q-series with exact integer coefficients. Precision T means the
// coefficients of q^0 .. q^{T-1} are known; access beyond that window is a
// hard error, never a silent zero. Values are immutable after construction.
class QExpansion {
public:
    explicit QExpansion(std::vector<Integer> coeffs,
                        std::optional<unsigned> weight_tag = std::nullopt)
        : coeffs_(std::move(coeffs)), weight_tag_(weight_tag) {
        if (coeffs_.empty())
            throw std::invalid_argument("QExpansion: precision must be positive");
    }

    static QExpansion zero(std::size_t terms) {
        return QExpansion(std::vector<Integer>(terms));
    }

    static QExpansion one(std::size_t terms) {
        std::vector<Integer> c(terms);
        c[0] = 1;
        return QExpansion(std::move(c));
    }

    std::size_t precision() const { return coeffs_.size(); }
    std::optional<unsigned> weight_tag() const { return weight_tag_; }
    const std::vector<Integer>& coefficients() const { return coeffs_; }

    const Integer& coefficient(std::size_t n) const {
        if (n >= coeffs_.size())
            throw OutOfPrecisionError("coefficient q^" + std::to_string(n) +
                                      " requested beyond precision " +
                                      std::to_string(coeffs_.size()));
        return coeffs_[n];
    }

    QExpansion truncated(std::size_t terms) const {
        if (terms == 0 || terms > coeffs_.size())
            throw OutOfPrecisionError("truncated: requested " + std::to_string(terms) +
                                      " terms from precision " +
                                      std::to_string(coeffs_.size()));
        return QExpansion(std::vector<Integer>(coeffs_.begin(), coeffs_.begin() + terms),
                          weight_tag_);
    }

    QExpansion with_weight_tag(unsigned k) const {
        return QExpansion(coeffs_, k);
    }

    // Equality compares precision and coefficients; the weight tag is an
    // annotation and does not participate.
    friend bool operator==(const QExpansion& a, const QExpansion& b) {
        return a.coeffs_ == b.coeffs_;
    }

    friend QExpansion operator+(const QExpansion& a, const QExpansion& b) {
        std::size_t t = std::min(a.precision(), b.precision());
        std::vector<Integer> c(t);
        for (std::size_t i = 0; i < t; ++i) c[i] = a.coeffs_[i] + b.coeffs_[i];
        return QExpansion(std::move(c));
    }

    friend QExpansion operator-(const QExpansion& a, const QExpansion& b) {
        std::size_t t = std::min(a.precision(), b.precision());
        std::vector<Integer> c(t);
        for (std::size_t i = 0; i < t; ++i) c[i] = a.coeffs_[i] - b.coeffs_[i];
        return QExpansion(std::move(c));
    }

    friend QExpansion operator-(const QExpansion& a) {
        std::vector<Integer> c(a.coeffs_);
        for (auto& x : c) x = -x;
        return QExpansion(std::move(c));
    }

    friend QExpansion operator*(const Integer& s, const QExpansion& a) {
        std::vector<Integer> c(a.coeffs_);
        for (auto& x : c) x *= s;
        return QExpansion(std::move(c));
    }

private:
    std::vector<Integer> coeffs_;
    std::optional<unsigned> weight_tag_;
};

namespace detail {

// Schoolbook convolution, truncated. Correctness baseline by design; any
// faster strategy must be bit-exact equal to this one.
inline std::vector<Integer> convolve(const std::vector<Integer>& a,
                                     const std::vector<Integer>& b,
                                     std::size_t terms) {
    std::vector<Integer> c(terms);
    for (std::size_t i = 0; i < std::min(a.size(), terms); ++i) {
        if (a[i] == 0) continue;
        std::size_t jmax = std::min(b.size(), terms - i);
        for (std::size_t j = 0; j < jmax; ++j) {
            if (b[j] == 0) continue;
            c[i + j] += a[i] * b[j];
        }
    }
    return c;
}

}  // namespace detail

// Product truncated to the weaker precision of the inputs.
inline QExpansion qexp_mul(const QExpansion& a, const QExpansion& b) {
    std::size_t t = std::min(a.precision(), b.precision());
    return QExpansion(detail::convolve(a.coefficients(), b.coefficients(), t));
}

inline QExpansion operator*(const QExpansion& a, const QExpansion& b) {
    return qexp_mul(a, b);
}

// E_k = 1 - (2k/B_k) sum_{n>=1} sigma_{k-1}(n) q^n. Only weights whose
// normalizing scalar is an integer are representable here; others raise
// NonIntegralCoefficientError.
inline QExpansion eisenstein(unsigned k, std::size_t terms) {
    if (k < 4 || k % 2 != 0)
        throw std::invalid_argument("eisenstein: weight must be even and >= 4");
    if (terms == 0) throw std::invalid_argument("eisenstein: terms must be positive");
    Rational scalar = Rational(-2 * static_cast<int>(k)) / bernoulli(k);
    if (denominator(scalar) != 1)
        throw NonIntegralCoefficientError("eisenstein: 2k/B_k is not an integer for k=" +
                                          std::to_string(k));
    Integer c = numerator(scalar);
    std::vector<Integer> coeffs(terms);
    coeffs[0] = 1;
    // sigma_{k-1} for all indices at once via the divisor sieve.
    for (std::size_t d = 1; d < terms; ++d) {
        Integer dp = ipow(Integer(d), k - 1);
        for (std::size_t n = d; n < terms; n += d) coeffs[n] += dp;
    }
    for (std::size_t n = 1; n < terms; ++n) coeffs[n] *= c;
    return QExpansion(std::move(coeffs), k);
}

namespace detail {

// Euler's pentagonal expansion of prod_{n>=1} (1 - q^n), dense to `terms`.
inline std::vector<Integer> eta_product(std::size_t terms) {
    std::vector<Integer> e(terms);
    e[0] = 1;
    for (std::int64_t j = 1;; ++j) {
        std::int64_t g1 = j * (3 * j - 1) / 2;
        std::int64_t g2 = j * (3 * j + 1) / 2;
        if (static_cast<std::size_t>(g1) >= terms) break;
        int sign = (j % 2 == 0) ? 1 : -1;
        e[static_cast<std::size_t>(g1)] += sign;
        if (static_cast<std::size_t>(g2) < terms) e[static_cast<std::size_t>(g2)] += sign;
    }
    return e;
}

}  // namespace detail

// Coefficients of Delta = q prod_{n>=1} (1 - q^n)^24. The product is raised
// to the 24th power by repeated squaring of the sparse pentagonal expansion.
inline QExpansion delta(std::size_t terms) {
    if (terms < 2) throw std::invalid_argument("delta: terms must be >= 2");
    std::size_t t = terms - 1;  // precision needed before the q-shift
    std::vector<Integer> e = detail::eta_product(t);
    std::vector<Integer> e2 = detail::convolve(e, e, t);
    std::vector<Integer> e4 = detail::convolve(e2, e2, t);
    std::vector<Integer> e8 = detail::convolve(e4, e4, t);
    std::vector<Integer> e16 = detail::convolve(e8, e8, t);
    std::vector<Integer> e24 = detail::convolve(e16, e8, t);
    std::vector<Integer> coeffs(terms);
    for (std::size_t n = 1; n < terms; ++n) coeffs[n] = std::move(e24[n - 1]);
    return QExpansion(std::move(coeffs), 12);
}

// The unique normalized cusp form of level 1, trivial character, and weight
// k in {12, 16, 18, 20, 22, 26}: Delta * E4^a * E6^b with 4a + 6b = k - 12.
inline QExpansion level1_cuspform(unsigned k, std::size_t terms) {
    unsigned a = 0, b = 0;
    switch (k) {
        case 12: a = 0; b = 0; break;
        case 16: a = 1; b = 0; break;
        case 18: a = 0; b = 1; break;
        case 20: a = 2; b = 0; break;
        case 22: a = 1; b = 1; break;
        case 26: a = 2; b = 1; break;
        default:
            throw UnsupportedWeightError("level1_cuspform: weight " + std::to_string(k) +
                                         " is not one of 12,16,18,20,22,26");
    }
    QExpansion f = delta(terms);
    if (a != 0) {
        QExpansion e4 = eisenstein(4, terms);
        for (unsigned i = 0; i < a; ++i) f = f * e4;
    }
    if (b != 0) {
        QExpansion e6 = eisenstein(6, terms);
        for (unsigned i = 0; i < b; ++i) f = f * e6;
    }
    return f.with_weight_tag(k);
}

// Hecke operator T_p in weight k: n-th output coefficient is
// a_{np} + p^{k-1} a_{n/p}, the second term only when p | n.
inline QExpansion hecke_tp(const QExpansion& f, std::uint64_t p, unsigned k) {
    std::size_t t_out = (f.precision() - 1) / p + 1;
    if (t_out < 2)
        throw InsufficientPrecisionError("hecke_tp: output precision would be " +
                                         std::to_string(t_out));
    Integer pk1 = ipow(Integer(p), k - 1);
    std::vector<Integer> c(t_out);
    for (std::size_t n = 0; n < t_out; ++n) {
        c[n] = f.coefficient(n * p);
        if (n % p == 0) c[n] += pk1 * f.coefficient(n / p);
    }
    return QExpansion(std::move(c), f.weight_tag());
}

}  // namespace defsieve
