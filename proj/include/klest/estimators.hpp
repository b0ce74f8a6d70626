#pragma once
// Count-based estimators of a distribution on [K] from an i.i.d. sample:
// maximum likelihood, add-gamma smoothing, per-category add-gamma_i with
// biases chosen from the first half of the sample, and the suffix-averaged
// online-to-batch estimator built from the follow-the-regularized-leader
// iterates p_t(i) = (n_{i,t-1} + gamma_i) / (t - 1 + sum_j gamma_j).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "klest/dist.hpp"

namespace klest {

namespace detail {

inline void require_count_sum(std::span<const std::uint64_t> counts, std::uint64_t n) {
    if (total(counts) != n)
        throw std::invalid_argument("counts sum to " + std::to_string(total(counts)) +
                                    ", expected n = " + std::to_string(n));
}

inline void require_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must lie in (0, 1), got " + std::to_string(delta));
}

inline void require_alphabet(std::size_t K) {
    if (K < 2) throw std::invalid_argument("alphabet needs K >= 2");
}

}  // namespace detail

// Cutoff below which a first-half count marks its category as small:
// 32 ln(4K / delta).
inline double small_count_threshold(std::size_t K, double delta) {
    return 32.0 * std::log(4.0 * static_cast<double>(K) / delta);
}

struct GammaProfile {
    std::vector<double> gammas;
    std::vector<std::size_t> small_set;  // 0-based, increasing
    std::size_t J = 3;                   // max{3, |small_set|}
    double threshold = 0.0;
    double delta = 0.0;

    double sum() const {
        double s = 0.0;
        for (double g : gammas) s += g;
        return s;
    }
    std::size_t size() const noexcept { return gammas.size(); }

    static GammaProfile constant(std::size_t K, double gamma) {
        GammaProfile g;
        g.gammas.assign(K, gamma);
        return g;
    }
};

struct TrueSmallSet {
    std::vector<std::size_t> tilde_set;  // 0-based
    std::size_t tilde_J = 3;
};

// ---------------------------------------------------------------------------
// Estimator selection

struct Mle {};
struct AddConstant {
    double gamma = 1.0;
};
struct AddAdaptive {
    double delta = 0.05;
};
struct Otb {
    double delta = 0.05;
};

class EstimatorSpec {
public:
    using Kind = std::variant<Mle, AddConstant, AddAdaptive, Otb>;

    EstimatorSpec() = default;
    EstimatorSpec(Kind k) : kind_(k) { validate(); }  // NOLINT: implicit by intent

    const Kind& kind() const noexcept { return kind_; }

    // True when the estimate depends on the sample only through final counts.
    bool count_sufficient() const {
        return std::holds_alternative<Mle>(kind_) || std::holds_alternative<AddConstant>(kind_);
    }

    // mle | laplace | kt | addgamma:G | adaptive:DELTA | otb:DELTA
    static EstimatorSpec parse(const std::string& text) {
        auto number_after_colon = [&](std::size_t prefix_len) {
            const std::string tail = text.substr(prefix_len);
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(tail, &pos);
            } catch (const std::exception&) {
                pos = std::string::npos;
            }
            if (tail.empty() || pos != tail.size())
                throw std::invalid_argument("bad estimator parameter in '" + text + "'");
            return v;
        };
        if (text == "mle") return EstimatorSpec(Mle{});
        if (text == "laplace") return EstimatorSpec(AddConstant{1.0});
        if (text == "kt") return EstimatorSpec(AddConstant{0.5});
        if (text.rfind("addgamma:", 0) == 0) return EstimatorSpec(AddConstant{number_after_colon(9)});
        if (text.rfind("adaptive:", 0) == 0) return EstimatorSpec(AddAdaptive{number_after_colon(9)});
        if (text.rfind("otb:", 0) == 0) return EstimatorSpec(Otb{number_after_colon(4)});
        throw std::invalid_argument("unknown estimator '" + text +
                                    "' (expected mle|laplace|kt|addgamma:G|adaptive:DELTA|otb:DELTA)");
    }

    std::string to_string() const {
        auto num = [](double v) {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.12g", v);
            return std::string(buf);
        };
        return std::visit(
            [&](const auto& k) -> std::string {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, Mle>) return "mle";
                else if constexpr (std::is_same_v<T, AddConstant>) {
                    if (k.gamma == 1.0) return "laplace";
                    if (k.gamma == 0.5) return "kt";
                    return "addgamma:" + num(k.gamma);
                } else if constexpr (std::is_same_v<T, AddAdaptive>)
                    return "adaptive:" + num(k.delta);
                else
                    return "otb:" + num(k.delta);
            },
            kind_);
    }

    friend bool operator==(const EstimatorSpec& a, const EstimatorSpec& b) {
        return a.to_string() == b.to_string();
    }

private:
    void validate() const {
        std::visit(
            [](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, AddConstant>) {
                    if (!(k.gamma >= 0.0) || !std::isfinite(k.gamma))
                        throw std::invalid_argument("add-constant gamma must be >= 0");
                } else if constexpr (std::is_same_v<T, AddAdaptive> || std::is_same_v<T, Otb>) {
                    detail::require_delta(k.delta);
                }
            },
            kind_);
    }

    Kind kind_ = Mle{};
};

// ---------------------------------------------------------------------------
// Estimators

inline ProbVec mle(std::span<const std::uint64_t> counts, std::uint64_t n) {
    detail::require_alphabet(counts.size());
    if (n == 0) throw std::invalid_argument("mle needs n >= 1");
    detail::require_count_sum(counts, n);
    std::vector<double> p(counts.size());
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts[i]) / nd;
    return ProbVec::assume_normalized(std::move(p));
}

// (n_i + gamma) / (n + gamma K). gamma = 1 is Laplace, gamma = 1/2 is
// Krichevsky-Trofimov, gamma = 0 is the MLE.
inline ProbVec add_constant(std::span<const std::uint64_t> counts, std::uint64_t n, double gamma) {
    detail::require_alphabet(counts.size());
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
    detail::require_count_sum(counts, n);
    const double denom = static_cast<double>(n) + gamma * static_cast<double>(counts.size());
    if (!(denom > 0.0)) throw std::invalid_argument("add_constant with n = 0 needs gamma > 0");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = (static_cast<double>(counts[i]) + gamma) / denom;
    return ProbVec::assume_normalized(std::move(p));
}

// Biases from first-half counts: gamma_i = 0 when n_{i,n/2} >= 32 ln(4K/delta),
// else max{1, ln(K/delta) / J} with J = max{3, #small categories}.
inline GammaProfile adaptive_gammas(std::span<const std::uint64_t> first_half_counts, std::uint64_t n,
                                    double delta) {
    detail::require_delta(delta);
    const std::size_t K = first_half_counts.size();
    detail::require_alphabet(K);
    detail::require_count_sum(first_half_counts, n / 2);

    GammaProfile g;
    g.delta = delta;
    g.threshold = small_count_threshold(K, delta);
    for (std::size_t i = 0; i < K; ++i)
        if (static_cast<double>(first_half_counts[i]) < g.threshold) g.small_set.push_back(i);
    g.J = std::max<std::size_t>(3, g.small_set.size());
    const double bias =
        std::max(1.0, std::log(static_cast<double>(K) / delta) / static_cast<double>(g.J));
    g.gammas.assign(K, 0.0);
    for (auto i : g.small_set) g.gammas[i] = bias;
    return g;
}

inline ProbVec add_gamma_vec(std::span<const std::uint64_t> counts, std::uint64_t n,
                             const GammaProfile& profile) {
    detail::require_alphabet(counts.size());
    if (profile.size() != counts.size())
        throw std::invalid_argument("gamma profile has K=" + std::to_string(profile.size()) +
                                    ", counts have K=" + std::to_string(counts.size()));
    detail::require_count_sum(counts, n);
    const double denom = static_cast<double>(n) + profile.sum();
    if (!(denom > 0.0)) throw std::invalid_argument("add_gamma_vec: empty data and zero biases");
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = (static_cast<double>(counts[i]) + profile.gammas[i]) / denom;
    return ProbVec::assume_normalized(std::move(p));
}

// The add-gamma_i estimator p_{n+1}: biases from the first floor(n/2) items,
// smoothing applied to all n.
inline ProbVec adaptive_estimate(const SampleSeq& seq, double delta) {
    const std::size_t n = seq.size();
    const GammaProfile g = adaptive_gammas(seq.prefix_counts(n / 2), n, delta);
    return add_gamma_vec(seq.counts(), n, g);
}

// Same estimator from split counts (first floor(n/2) items, remaining items).
inline ProbVec adaptive_estimate(std::span<const std::uint64_t> first_half,
                                 std::span<const std::uint64_t> second_half, double delta) {
    if (first_half.size() != second_half.size())
        throw std::invalid_argument("adaptive_estimate: half counts differ in K");
    const std::uint64_t m = total(first_half);
    const std::uint64_t n = m + total(second_half);
    if (m != n / 2) throw std::invalid_argument("adaptive_estimate: first half must hold floor(n/2) items");
    Counts all(first_half.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = first_half[i] + second_half[i];
    return add_gamma_vec(all, n, adaptive_gammas(first_half, n, delta));
}

enum class OtbPath { fast, naive };

// Suffix average (1/(n-m)) sum_{t=m+1}^{n} p_t with m = floor(n/2).
//
// The fast path uses suffix harmonic sums H(s) = sum_{u=s}^{n-1} 1/(u + S):
// category i contributes (n_{i,m} + gamma_i) H(m) plus H(s) for every
// occurrence at a time s in (m, n-1]. O(n + K).
inline ProbVec otb_estimate(const SampleSeq& seq, double delta, OtbPath path = OtbPath::fast) {
    detail::require_delta(delta);
    const std::size_t n = seq.size();
    if (n < 2) throw std::invalid_argument("otb_estimate needs n >= 2");
    const std::size_t K = seq.K();
    const std::size_t m = n / 2;
    const Counts first = seq.prefix_counts(m);
    const GammaProfile g = adaptive_gammas(first, n, delta);
    const double S = g.sum();
    const double span_len = static_cast<double>(n - m);
    std::vector<double> out(K, 0.0);

    if (path == OtbPath::naive) {
        Counts c = first;
        std::vector<double> pt(K);
        for (std::size_t t = m + 1; t <= n; ++t) {
            // c holds n_{., t-1}
            const double denom = static_cast<double>(t - 1) + S;
            for (std::size_t i = 0; i < K; ++i)
                out[i] += (static_cast<double>(c[i]) + g.gammas[i]) / denom;
            ++c[seq[t - 1]];
        }
        for (double& x : out) x /= span_len;
        return ProbVec::assume_normalized(std::move(out));
    }

    // H[u - m] = sum_{v=u}^{n-1} 1 / (v + S), u in [m, n].
    std::vector<double> H(n - m + 1, 0.0);
    for (std::size_t u = n; u-- > m;)
        H[u - m] = H[u - m + 1] + 1.0 / (static_cast<double>(u) + S);
    for (std::size_t i = 0; i < K; ++i)
        out[i] = (static_cast<double>(first[i]) + g.gammas[i]) * H[0];
    // The item at 1-based time s (index s-1) enters n_{i,u} for u >= s.
    for (std::size_t s = m + 1; s <= n - 1; ++s) out[seq[s - 1]] += H[s - m];
    for (double& x : out) x /= span_len;
    return ProbVec::assume_normalized(std::move(out));
}

inline TrueSmallSet true_small_set(const ProbVec& p_star, std::uint64_t n, double delta) {
    detail::require_delta(delta);
    const double K = static_cast<double>(p_star.size());
    const double cutoff = 32.0 * std::log(K / delta);
    TrueSmallSet s;
    for (std::size_t i = 0; i < p_star.size(); ++i)
        if (static_cast<double>(n) * p_star[i] < cutoff) s.tilde_set.push_back(i);
    s.tilde_J = std::max<std::size_t>(3, s.tilde_set.size());
    return s;
}

// p+(i) = (n p*(i) + gamma_i) / (n + sum gamma).
inline ProbVec p_plus(const ProbVec& p_star, const GammaProfile& profile, std::uint64_t n) {
    if (profile.size() != p_star.size())
        throw std::invalid_argument("p_plus: dimension mismatch");
    const double nd = static_cast<double>(n);
    const double denom = nd + profile.sum();
    if (!(denom > 0.0)) throw std::invalid_argument("p_plus: n + sum gamma must be positive");
    std::vector<double> out(p_star.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (p_star[i] * nd + profile.gammas[i]) / denom;
    return ProbVec::assume_normalized(std::move(out));
}

// Run the estimator on an ordered sample.
inline ProbVec fit(const EstimatorSpec& spec, const SampleSeq& seq) {
    return std::visit(
        [&](const auto& k) -> ProbVec {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, Mle>) return mle(seq.counts(), seq.size());
            else if constexpr (std::is_same_v<T, AddConstant>)
                return add_constant(seq.counts(), seq.size(), k.gamma);
            else if constexpr (std::is_same_v<T, AddAdaptive>)
                return adaptive_estimate(seq, k.delta);
            else
                return otb_estimate(seq, k.delta);
        },
        spec.kind());
}

// Count-sufficient estimators only (MLE, add-constant).
inline ProbVec fit_counts(const EstimatorSpec& spec, std::span<const std::uint64_t> counts) {
    const std::uint64_t n = total(counts);
    if (const auto* a = std::get_if<AddConstant>(&spec.kind())) return add_constant(counts, n, a->gamma);
    if (std::holds_alternative<Mle>(spec.kind())) return mle(counts, n);
    throw std::invalid_argument("estimator '" + spec.to_string() + "' is not a function of final counts");
}

}  // namespace klest
