#pragma once
// Divergences between distributions on [K] and checkable forms of the
// inequalities relating them. All logarithms are natural.
//
// Convention: chi2(p, q) = sum (p(i) - q(i))^2 / q(i), i.e. the second
// argument is the reference measure in the denominator, as for kl(p, q).

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

#include "klest/dist.hpp"

namespace klest {

// A real number or +inf. Infinity is a flag, never a sentinel float, so
// ordering and printing are unambiguous.
class ExtReal {
public:
    constexpr ExtReal() = default;
    constexpr explicit ExtReal(double v) : v_(v) {
        if (!(v == v) || v == std::numeric_limits<double>::infinity() ||
            v == -std::numeric_limits<double>::infinity())
            throw std::invalid_argument("ExtReal takes finite values; use ExtReal::infinity()");
    }
    static constexpr ExtReal infinity() {
        ExtReal r;
        r.inf_ = true;
        return r;
    }

    constexpr bool is_infinite() const noexcept { return inf_; }
    constexpr bool is_finite() const noexcept { return !inf_; }
    // Finite value; +inf maps to the IEEE infinity for numeric consumers.
    constexpr double value() const noexcept {
        return inf_ ? std::numeric_limits<double>::infinity() : v_;
    }

    friend constexpr bool operator==(const ExtReal& a, const ExtReal& b) noexcept {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend constexpr std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) noexcept {
        if (a.inf_ || b.inf_) return a.inf_ <=> b.inf_;
        return a.v_ <=> b.v_;
    }
    friend constexpr ExtReal operator+(const ExtReal& a, const ExtReal& b) noexcept {
        if (a.inf_ || b.inf_) return infinity();
        ExtReal r;
        r.v_ = a.v_ + b.v_;
        return r;
    }
    friend constexpr ExtReal operator-(const ExtReal& a, double b) noexcept {
        if (a.inf_) return a;
        ExtReal r;
        r.v_ = a.v_ - b;
        return r;
    }
    // Non-negative scaling; 0 * inf = 0.
    friend constexpr ExtReal operator*(double c, const ExtReal& a) {
        if (c < 0.0) throw std::invalid_argument("ExtReal scale must be non-negative");
        if (c == 0.0) return ExtReal{};
        if (a.inf_) return a;
        ExtReal r;
        r.v_ = c * a.v_;
        return r;
    }

    // 12 significant digits, "inf" for +inf.
    std::string to_string() const {
        if (inf_) return "inf";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.12g", v_);
        return buf;
    }

private:
    double v_ = 0.0;
    bool inf_ = false;
};

namespace detail {

inline void require_same_size(const ProbVec& p, const ProbVec& q) {
    if (p.size() != q.size())
        throw std::invalid_argument("dimension mismatch: K=" + std::to_string(p.size()) +
                                    " vs K=" + std::to_string(q.size()));
}

inline ExtReal non_negative(double x) { return ExtReal(x < 0.0 ? 0.0 : x); }

}  // namespace detail

inline ExtReal kl(const ProbVec& p, const ProbVec& q) {
    detail::require_same_size(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) continue;
        if (q[i] <= 0.0) return ExtReal::infinity();
        s += p[i] * std::log(p[i] / q[i]);
    }
    return detail::non_negative(s);
}

inline ExtReal chi2(const ProbVec& p, const ProbVec& q) {
    detail::require_same_size(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        if (q[i] <= 0.0) {
            if (d != 0.0) return ExtReal::infinity();
            continue;
        }
        s += d * d / q[i];
    }
    return detail::non_negative(s);
}

// Squared Hellinger distance without the 1/2 factor; lies in [0, 2].
inline ExtReal hellinger_sq(const ProbVec& p, const ProbVec& q) {
    detail::require_same_size(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        s += d * d;
    }
    return ExtReal(std::min(s, 2.0));
}

inline ExtReal l1(const ProbVec& p, const ProbVec& q) {
    detail::require_same_size(p, q);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return ExtReal(std::min(s, 2.0));
}

inline ExtReal pinsker_gap(const ProbVec& p, const ProbVec& q) {
    const ExtReal v = l1(p, q);
    return kl(p, q) - 0.5 * v.value() * v.value();
}

inline constexpr double kInequalityTol = 1e-12;

class RatioPreconditionError : public std::domain_error {
public:
    RatioPreconditionError(std::size_t category, double ratio)
        : std::domain_error("density ratio " + std::to_string(ratio) + " at index " +
                            std::to_string(category + 1) + " outside [1/2, 2]"),
          category_(category),
          ratio_(ratio) {}
    // 0-based offending category.
    std::size_t category() const noexcept { return category_; }
    double ratio() const noexcept { return ratio_; }

private:
    std::size_t category_;
    double ratio_;
};

struct ChainReport {
    // chi2(p||q)/6, chi2(q||p)/4, KL(p||q), 5/2 H^2(p||q), 5/2 KL(q||p),
    // 5/2 chi2(q||p), 5 chi2(p||q)
    std::array<ExtReal, 7> terms;
    bool monotone = true;
    // Index of the first link terms[k] > terms[k+1] + tol, or -1.
    int first_violation = -1;
};

// The seven-term divergence chain for strictly positive p, q whose density
// ratio lies in [1/2, 2] in both directions.
inline ChainReport chain_report(const ProbVec& p, const ProbVec& q) {
    detail::require_same_size(p, q);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0) || !(q[i] > 0.0)) throw RatioPreconditionError(i, p[i] / q[i]);
        const double r = p[i] / q[i];
        if (r > 2.0 * (1.0 + kInequalityTol) || r < 0.5 * (1.0 - kInequalityTol))
            throw RatioPreconditionError(i, r);
    }
    ChainReport rep;
    rep.terms = {(1.0 / 6.0) * chi2(p, q),
                 0.25 * chi2(q, p),
                 kl(p, q),
                 2.5 * hellinger_sq(p, q),
                 2.5 * kl(q, p),
                 2.5 * chi2(q, p),
                 5.0 * chi2(p, q)};
    for (std::size_t k = 0; k + 1 < rep.terms.size(); ++k) {
        if (rep.terms[k] > rep.terms[k + 1] + ExtReal(kInequalityTol)) {
            rep.monotone = false;
            if (rep.first_violation < 0) rep.first_violation = static_cast<int>(k);
        }
    }
    return rep;
}

// RHS - LHS of the generalized Yang-Barron inequality
//   sum p (ln r/q)^2 <= (2 + ln V) (sum p ln(r/q) + sum p q/r - 1)
// for r(i)/q(i) <= V. Non-negative whenever the hypothesis holds.
inline double yang_barron_gap(const ProbVec& p, const ProbVec& q, const ProbVec& r, double V) {
    detail::require_same_size(p, q);
    detail::require_same_size(q, r);
    if (!(V > 0.0)) throw std::invalid_argument("yang_barron_gap: V must be positive");
    double log_term = 0.0, inv_term = 0.0, sq_term = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(q[i] > 0.0) || !(r[i] > 0.0))
            throw std::domain_error("yang_barron_gap: q and r must be strictly positive");
        const double ratio = r[i] / q[i];
        if (ratio > V * (1.0 + kInequalityTol))
            throw std::domain_error("yang_barron_gap: r/q = " + std::to_string(ratio) +
                                    " exceeds V at index " + std::to_string(i + 1));
        if (p[i] == 0.0) continue;
        const double lr = std::log(ratio);
        log_term += p[i] * lr;
        inv_term += p[i] / ratio;
        sq_term += p[i] * lr * lr;
    }
    return (2.0 + std::log(V)) * (log_term + inv_term - 1.0) - sq_term;
}

}  // namespace klest
