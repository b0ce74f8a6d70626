#pragma once
// Lower-bound instances.
//
// The estimator-dependent attack probes what an estimator outputs after
// seeing only category K, then plants mass alpha/n = (2/3) ln(1/delta) / n
// on the category it neglects most. With probability (1 - alpha/n)^n > delta
// that category is never observed and the KL risk is at least `bound`.
//
// The hard family P_2..P_K puts 1 - alpha/n on category 1 and alpha/n on
// category j; its members are separated by (alpha/n) ln(K - 1) from their
// uniform mixture.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "klest/divergences.hpp"
#include "klest/estimators.hpp"

namespace klest {

inline double attack_alpha(double delta) {
    detail::require_delta(delta);
    return (2.0 / 3.0) * std::log(1.0 / delta);
}

struct AdversarialInstance {
    ProbVec p_star = uniform(2);
    double alpha = 0.0;
    std::size_t attacked_index = 0;  // 0-based i', always < K - 1
    ExtReal bound;
    double delta = 0.0;
    std::uint64_t n = 0;
    double neglected_mass = 0.0;  // s = sum_{i<K} p_hat0(i)
};

// Estimator output on the sample consisting of n copies of category K.
inline ProbVec probe_zero_counts(const EstimatorSpec& spec, std::size_t K, std::uint64_t n) {
    if (K < 2) throw std::invalid_argument("probe_zero_counts needs K >= 2");
    if (n < 1) throw std::invalid_argument("probe_zero_counts needs n >= 1");
    const SampleSeq all_last(K, std::vector<std::uint32_t>(n, static_cast<std::uint32_t>(K - 1)));
    return fit(spec, all_last);
}

// Closed-form lower bound
//   (alpha/n) (ln(alpha (K-1) / (n s)) - 1) + s,  alpha = (2/3) ln(1/delta),
// or +inf when s = 0.
inline ExtReal attack_bound(std::size_t K, std::uint64_t n, double delta, double s) {
    if (s <= 0.0) return ExtReal::infinity();
    const double a_over_n = attack_alpha(delta) / static_cast<double>(n);
    return ExtReal(a_over_n * (std::log(a_over_n * static_cast<double>(K - 1) / s) - 1.0) + s);
}

inline AdversarialInstance build_attack(const ProbVec& p_hat0, std::uint64_t n, double delta) {
    detail::require_delta(delta);
    const std::size_t K = p_hat0.size();
    if (!(static_cast<double>(n) > (4.0 / 3.0) * std::log(1.0 / delta)))
        throw std::invalid_argument("attack needs n > (4/3) ln(1/delta)");

    AdversarialInstance inst;
    inst.delta = delta;
    inst.n = n;
    inst.alpha = attack_alpha(delta);

    // Lowest-index argmin over the first K-1 categories.
    std::size_t arg = 0;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < K; ++i) {
        s += p_hat0[i];
        if (p_hat0[i] < p_hat0[arg]) arg = i;
    }
    inst.attacked_index = arg;
    inst.neglected_mass = s;

    const double a_over_n = inst.alpha / static_cast<double>(n);
    std::vector<double> p(K, 0.0);
    p[arg] = a_over_n;
    p[K - 1] = 1.0 - a_over_n;
    inst.p_star = ProbVec::assume_normalized(std::move(p));
    inst.bound = attack_bound(K, n, delta, s);
    return inst;
}

// (1 - alpha/n)^n, the probability that n draws from the attack instance
// never hit the planted category.
inline double attack_event_probability(double alpha, std::uint64_t n) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be non-negative");
    const double nd = static_cast<double>(n);
    if (!(nd > 2.0 * alpha)) throw std::invalid_argument("attack event needs n > 2 alpha");
    return std::exp(nd * std::log1p(-alpha / nd));
}

struct HardFamily {
    // members[k] is P_{k+2}: mass on category 1 and category k+2 (1-based).
    std::vector<ProbVec> members;
    double alpha = 0.0;
    double separation = 0.0;        // (alpha/n) ln(K-1)
    double pairwise_mixture_kl = 0.0;  // KL(P_j || (P_j + P_k)/2) = (alpha/n) ln 2
    ProbVec mixture = uniform(2);   // uniform mixture of the members

    // 1-based family index j of members[k].
    static std::size_t member_label(std::size_t k) { return k + 2; }
};

inline HardFamily hard_family(std::size_t K, std::uint64_t n, double delta) {
    if (K < 2) throw std::invalid_argument("hard family needs K >= 2");
    HardFamily fam;
    fam.alpha = attack_alpha(delta);
    const double nd = static_cast<double>(n);
    if (fam.alpha > 0.5 * nd) throw std::invalid_argument("hard family needs alpha <= n/2");
    const double a_over_n = fam.alpha / nd;

    for (std::size_t j = 1; j < K; ++j) {
        std::vector<double> p(K, 0.0);
        p[0] = 1.0 - a_over_n;
        p[j] = a_over_n;
        fam.members.push_back(ProbVec::assume_normalized(std::move(p)));
    }
    std::vector<double> mix(K, a_over_n / static_cast<double>(K - 1));
    mix[0] = 1.0 - a_over_n;
    fam.mixture = ProbVec::assume_normalized(std::move(mix));
    fam.separation = a_over_n * std::log(static_cast<double>(K - 1));
    fam.pairwise_mixture_kl = a_over_n * std::log(2.0);
    return fam;
}

}  // namespace klest
