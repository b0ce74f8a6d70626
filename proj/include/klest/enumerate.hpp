#pragma once
// Exact risk distributions for small instances by full enumeration.
//
// Count-sufficient estimators enumerate the compositions of n into K parts
// with multinomial weights. The adaptive estimator depends on the split
// (first floor(n/2) items, remaining items), so it enumerates pairs of
// compositions. The online-to-batch estimator depends on order and
// enumerates all K^n sequences.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "klest/divergences.hpp"
#include "klest/estimators.hpp"

namespace klest {

inline constexpr double kMaxEnumerationOutcomes = 1e6;

struct ExactDistribution {
    // Ascending distinct values with their probabilities.
    std::vector<std::pair<ExtReal, double>> atoms;
    double total_probability = 0.0;
    double prob_infinite = 0.0;
    std::size_t outcomes = 0;

    // Smallest value x with P(X <= x) >= level (1e-12 slack for rounding in
    // the accumulated probabilities).
    ExtReal quantile_at(double level) const {
        if (atoms.empty()) throw std::logic_error("empty exact distribution");
        double cum = 0.0;
        for (const auto& [v, pr] : atoms) {
            cum += pr;
            if (cum >= level - 1e-12) return v;
        }
        return atoms.back().first;
    }

    double cdf(const ExtReal& x) const {
        double cum = 0.0;
        for (const auto& [v, pr] : atoms) {
            if (v > x) break;
            cum += pr;
        }
        return cum;
    }

    double prob_at_least(const ExtReal& x) const {
        double s = 0.0;
        for (const auto& [v, pr] : atoms)
            if (v >= x) s += pr;
        return s;
    }
};

namespace detail {

inline double log_binomial(double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Number of compositions of n into K non-negative parts, C(n+K-1, K-1).
inline double composition_count(std::size_t n, std::size_t K) {
    return std::exp(log_binomial(static_cast<double>(n + K - 1), static_cast<double>(K - 1)));
}

inline ExactDistribution collect(std::vector<std::pair<ExtReal, double>> raw) {
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    ExactDistribution d;
    d.outcomes = raw.size();
    for (auto& [v, pr] : raw) {
        d.total_probability += pr;
        if (v.is_infinite()) d.prob_infinite += pr;
        if (!d.atoms.empty() && d.atoms.back().first == v) d.atoms.back().second += pr;
        else d.atoms.emplace_back(v, pr);
    }
    return d;
}

// Calls visit(counts, probability) for every composition with positive
// multinomial probability under p.
inline void for_each_composition(const ProbVec& p, std::size_t n,
                                 const std::function<void(const Counts&, double)>& visit) {
    const std::size_t K = p.size();
    std::vector<double> log_p(K);
    for (std::size_t i = 0; i < K; ++i) log_p[i] = p[i] > 0.0 ? std::log(p[i]) : 0.0;
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    Counts c(K, 0);
    std::function<void(std::size_t, std::size_t, double)> rec = [&](std::size_t i, std::size_t left,
                                                                    double logw) {
        if (i + 1 == K) {
            if (left > 0 && p[i] == 0.0) return;
            c[i] = left;
            const double lw = logw - std::lgamma(static_cast<double>(left) + 1.0) +
                              static_cast<double>(left) * log_p[i];
            visit(c, std::exp(log_n_fact + lw));
            return;
        }
        for (std::size_t k = 0; k <= left; ++k) {
            if (k > 0 && p[i] == 0.0) break;
            c[i] = k;
            rec(i + 1, left - k,
                logw - std::lgamma(static_cast<double>(k) + 1.0) + static_cast<double>(k) * log_p[i]);
        }
    };
    rec(0, n, 0.0);
}

}  // namespace detail

// Exact distribution of stat(counts) for counts ~ Multinomial(n, p).
template <class Stat>
ExactDistribution enumerate_counts(const ProbVec& p, std::size_t n, Stat&& stat) {
    if (detail::composition_count(n, p.size()) > kMaxEnumerationOutcomes * (1 + 1e-9))
        throw std::invalid_argument("instance too large: C(n+K-1, K-1) exceeds 1e6");
    std::vector<std::pair<ExtReal, double>> raw;
    detail::for_each_composition(p, n, [&](const Counts& c, double pr) { raw.emplace_back(stat(c), pr); });
    return detail::collect(std::move(raw));
}

// Exact distribution of stat(first, second) where first and second are the
// independent count vectors of the first floor(n/2) and last n - floor(n/2)
// draws.
template <class Stat>
ExactDistribution enumerate_split_counts(const ProbVec& p, std::size_t n, Stat&& stat) {
    const std::size_t m = n / 2;
    if (detail::composition_count(m, p.size()) * detail::composition_count(n - m, p.size()) >
        kMaxEnumerationOutcomes * (1 + 1e-9))
        throw std::invalid_argument("instance too large: split compositions exceed 1e6");
    std::vector<std::pair<Counts, double>> first, second;
    detail::for_each_composition(p, m, [&](const Counts& c, double pr) { first.emplace_back(c, pr); });
    detail::for_each_composition(p, n - m, [&](const Counts& c, double pr) { second.emplace_back(c, pr); });
    std::vector<std::pair<ExtReal, double>> raw;
    raw.reserve(first.size() * second.size());
    for (const auto& [a, pa] : first)
        for (const auto& [b, pb] : second) raw.emplace_back(stat(a, b), pa * pb);
    return detail::collect(std::move(raw));
}

// Exact distribution of stat(sequence) over all K^n sequences.
template <class Stat>
ExactDistribution enumerate_sequences(const ProbVec& p, std::size_t n, Stat&& stat) {
    const std::size_t K = p.size();
    if (static_cast<double>(n) * std::log(static_cast<double>(K)) >
        std::log(kMaxEnumerationOutcomes) + 1e-9)
        throw std::invalid_argument("instance too large: K^n exceeds 1e6");
    if (n == 0) throw std::invalid_argument("enumerate_sequences needs n >= 1");
    std::vector<std::uint32_t> items(n, 0);
    std::vector<std::pair<ExtReal, double>> raw;
    while (true) {
        double pr = 1.0;
        for (auto x : items) pr *= p[x];
        if (pr > 0.0) raw.emplace_back(stat(SampleSeq(K, items)), pr);
        // Odometer increment.
        std::size_t pos = 0;
        while (pos < n && ++items[pos] == K) items[pos++] = 0;
        if (pos == n) break;
    }
    return detail::collect(std::move(raw));
}

// Range [quantile_at(u - z s), quantile_at(u + z s)], u = 1 - delta,
// s = sqrt(u (1 - u) / trials): where the Monte Carlo order statistic of
// rank ceil(u * trials) falls except with probability about that of a
// z-sigma binomial deviation.
inline std::pair<ExtReal, ExtReal> order_statistic_bracket(const ExactDistribution& d, double delta,
                                                           std::size_t trials, double z = 4.0) {
    const double u = 1.0 - delta;
    const double s = std::sqrt(u * (1.0 - u) / static_cast<double>(trials));
    return {d.quantile_at(std::max(0.0, u - z * s)), d.quantile_at(std::min(1.0, u + z * s))};
}

enum class EnumerationMode { counts, split_counts, sequences };

inline EnumerationMode enumeration_mode(const EstimatorSpec& spec) {
    if (spec.count_sufficient()) return EnumerationMode::counts;
    if (std::holds_alternative<AddAdaptive>(spec.kind())) return EnumerationMode::split_counts;
    return EnumerationMode::sequences;
}

inline const char* to_string(EnumerationMode m) {
    switch (m) {
        case EnumerationMode::counts: return "counts";
        case EnumerationMode::split_counts: return "split_counts";
        case EnumerationMode::sequences: return "sequences";
    }
    return "?";
}

struct ExactRisk {
    ExtReal quantile;
    ExactDistribution distribution;
    EnumerationMode mode = EnumerationMode::counts;
};

// Exact (1 - delta)-quantile of KL(p* || p_hat). `mode` must match what the
// estimator requires; an order-dependent estimator never gets a count-based
// oracle.
inline ExactRisk exact_risk_enumeration(const EstimatorSpec& spec, const ProbVec& p_star,
                                        std::size_t n, double delta, EnumerationMode mode) {
    detail::require_delta(delta);
    if (n < 1) throw std::invalid_argument("exact enumeration needs n >= 1");
    if (mode != enumeration_mode(spec))
        throw std::invalid_argument(std::string("enumeration mode '") + to_string(mode) +
                                    "' does not match estimator '" + spec.to_string() + "'");
    ExactRisk r;
    r.mode = mode;
    switch (mode) {
        case EnumerationMode::counts:
            r.distribution = enumerate_counts(
                p_star, n, [&](const Counts& c) { return kl(p_star, fit_counts(spec, c)); });
            break;
        case EnumerationMode::split_counts: {
            const double est_delta = std::get<AddAdaptive>(spec.kind()).delta;
            r.distribution = enumerate_split_counts(p_star, n, [&](const Counts& a, const Counts& b) {
                return kl(p_star, adaptive_estimate(a, b, est_delta));
            });
            break;
        }
        case EnumerationMode::sequences:
            r.distribution = enumerate_sequences(
                p_star, n, [&](const SampleSeq& s) { return kl(p_star, fit(spec, s)); });
            break;
    }
    r.quantile = r.distribution.quantile_at(1.0 - delta);
    return r;
}

inline ExactRisk exact_risk_enumeration(const EstimatorSpec& spec, const ProbVec& p_star,
                                        std::size_t n, double delta) {
    return exact_risk_enumeration(spec, p_star, n, delta, enumeration_mode(spec));
}

}  // namespace klest
