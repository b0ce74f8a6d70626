#pragma once
// Monte Carlo measurement of high-probability KL risk.
//
// A run draws `trials` independent samples of size n from p*, one RNG stream
// per trial index under a master seed, fits the estimator and records
// KL(p* || p_hat). The reported risk is the ceil((1 - delta) * trials)-th
// order statistic with +inf sorted last.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "klest/adversarial.hpp"
#include "klest/divergences.hpp"
#include "klest/estimators.hpp"
#include "klest/parallel.hpp"

namespace klest {

inline std::string format_real(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// 1-based rank ceil((1 - delta) * trials), guarded against the product
// landing a rounding error above an integer.
inline std::size_t quantile_rank(std::size_t trials, double delta) {
    const double x = (1.0 - delta) * static_cast<double>(trials);
    auto r = static_cast<std::size_t>(std::ceil(x - 1e-9 * std::max(1.0, x)));
    return std::clamp<std::size_t>(r, 1, trials);
}

// `sorted` must be ascending.
inline ExtReal empirical_quantile(const std::vector<ExtReal>& sorted, double delta) {
    if (sorted.empty()) throw std::invalid_argument("empirical_quantile of an empty sample");
    return sorted[quantile_rank(sorted.size(), delta) - 1];
}

struct RiskSummary {
    ExtReal quantile;
    ExtReal mean;
    double frac_infinite = 0.0;
    std::size_t trials = 0;
};

// Sorts in place and summarizes; the mean is +inf if any value is.
inline RiskSummary summarize(std::vector<ExtReal>& values, double delta) {
    std::sort(values.begin(), values.end(),
              [](const ExtReal& a, const ExtReal& b) { return a < b; });
    RiskSummary s;
    s.trials = values.size();
    s.quantile = empirical_quantile(values, delta);
    std::size_t n_inf = 0;
    double sum = 0.0;
    for (const auto& v : values) {
        if (v.is_infinite()) ++n_inf;
        else sum += v.value();
    }
    s.frac_infinite = static_cast<double>(n_inf) / static_cast<double>(values.size());
    s.mean = n_inf > 0 ? ExtReal::infinity() : ExtReal(sum / static_cast<double>(values.size()));
    return s;
}

// Evaluates stat(sample) for each trial t on stream (master, t). Results are
// in trial order.
template <class Stat>
std::vector<ExtReal> simulate_statistic(const ProbVec& p_star, std::size_t n, std::size_t trials,
                                        std::uint64_t master, Stat&& stat,
                                        std::size_t threads = default_thread_count()) {
    const CategoricalSampler sampler(p_star);
    std::vector<ExtReal> out(trials);
    parallel_for(
        trials,
        [&](std::size_t t) { out[t] = stat(sample_iid(sampler, n, Seed{master, t})); },
        threads);
    return out;
}

struct TrialConfig {
    EstimatorSpec estimator;
    ProbVec p_star = uniform(2);
    std::size_t n = 1;
    double delta = 0.1;
    std::size_t trials = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        detail::require_delta(delta);
        if (std::holds_alternative<Otb>(estimator.kind()) && n < 2)
            throw std::invalid_argument("otb estimator needs n >= 2");
    }
};

struct RiskReport {
    ExtReal quantile;
    ExtReal mean_kl;
    double frac_infinite = 0.0;
    std::size_t trials = 0;
    TrialConfig config;
};

// KL(p* || p_hat) for every trial, in trial order.
inline std::vector<ExtReal> simulate_kl(const TrialConfig& cfg,
                                        std::size_t threads = default_thread_count()) {
    cfg.validate();
    return simulate_statistic(
        cfg.p_star, cfg.n, cfg.trials, cfg.seed,
        [&](const SampleSeq& seq) { return kl(cfg.p_star, fit(cfg.estimator, seq)); }, threads);
}

inline RiskReport run_trials(const TrialConfig& cfg, std::size_t threads = default_thread_count()) {
    auto values = simulate_kl(cfg, threads);
    const RiskSummary s = summarize(values, cfg.delta);
    return RiskReport{s.quantile, s.mean, s.frac_infinite, s.trials, cfg};
}

// ---------------------------------------------------------------------------
// Reverse-KL check for the empirical distribution:
// (1-delta)-quantile of KL(p_bar_n || p*) against (7K + 6 ln(1/delta)) / n.

struct MeanKlReport {
    ExtReal quantile;
    ExtReal mean;
    double bound = 0.0;
    bool within = false;
    std::size_t trials = 0;
};

inline double mean_kl_bound(std::size_t K, std::size_t n, double delta) {
    return (7.0 * static_cast<double>(K) + 6.0 * std::log(1.0 / delta)) / static_cast<double>(n);
}

inline MeanKlReport mean_kl_check(const ProbVec& p_star, std::size_t n, double delta,
                                  std::size_t trials, std::uint64_t seed,
                                  std::size_t threads = default_thread_count()) {
    detail::require_delta(delta);
    if (trials < 1 || n < 1) throw std::invalid_argument("mean_kl_check needs n, trials >= 1");
    auto values = simulate_statistic(
        p_star, n, trials, seed,
        [&](const SampleSeq& seq) { return kl(mle(seq.counts(), seq.size()), p_star); }, threads);
    const RiskSummary s = summarize(values, delta);
    MeanKlReport r;
    r.quantile = s.quantile;
    r.mean = s.mean;
    r.bound = mean_kl_bound(p_star.size(), n, delta);
    r.within = s.quantile <= ExtReal(r.bound);
    r.trials = trials;
    return r;
}

// ---------------------------------------------------------------------------
// Density-ratio diagnostics for the add-gamma_i iterates.
//
// For t in [m+1, n+1] (m = floor(n/2)) and every category the five ratios
//   p*/p_t <= zeta xi,  p_t/p+ <= zeta,  p+/p_t <= 1 + zeta xi,
//   p*/p+ <= xi,        (n_{i,n} + g_i)/(n_{i,m} + g_i) <= 6 + zeta
// with xi = 1 + sum g / n and
//   zeta_i = 3 (1 + 2 (3 n_{i,m} + 27 L) / max{g_i, n_{i,m}/2 - 9 L}),
//   L = ln(4K/delta).

enum RatioKind : std::size_t {
    kStarOverIterate = 0,
    kIterateOverPlus,
    kPlusOverIterate,
    kStarOverPlus,
    kCountGrowth,
    kRatioKinds
};

inline constexpr std::array<const char*, kRatioKinds> kRatioNames = {
    "pstar_over_pt", "pt_over_pplus", "pplus_over_pt", "pstar_over_pplus", "count_growth"};

using RatioRow = std::array<double, kRatioKinds>;

struct TrialRatioRecord {
    std::vector<RatioRow> worst;  // per category, max over t
    std::vector<RatioRow> caps;   // per category
    std::vector<double> zeta;
    double xi = 1.0;
    bool violated = false;
};

namespace detail {
inline double safe_ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}
}  // namespace detail

inline TrialRatioRecord ratio_check_trial(const SampleSeq& seq, const ProbVec& p_star, double delta) {
    const std::size_t n = seq.size();
    const std::size_t K = seq.K();
    if (n < 4) throw std::invalid_argument("ratio diagnostics need n >= 4");
    if (p_star.size() != K) throw std::invalid_argument("ratio diagnostics: dimension mismatch");
    const std::size_t m = n / 2;
    const Counts first = seq.prefix_counts(m);
    const Counts final_counts = seq.counts();
    const GammaProfile g = adaptive_gammas(first, n, delta);
    const double S = g.sum();
    const ProbVec plus = p_plus(p_star, g, n);
    const double L = std::log(4.0 * static_cast<double>(K) / delta);

    TrialRatioRecord rec;
    rec.xi = 1.0 + S / static_cast<double>(n);
    rec.worst.assign(K, RatioRow{});
    rec.caps.assign(K, RatioRow{});
    rec.zeta.assign(K, 0.0);
    for (std::size_t i = 0; i < K; ++i) {
        const double nm = static_cast<double>(first[i]);
        const double zeta =
            3.0 * (1.0 + 2.0 * (3.0 * nm + 27.0 * L) / std::max(g.gammas[i], 0.5 * nm - 9.0 * L));
        rec.zeta[i] = zeta;
        rec.caps[i] = {zeta * rec.xi, zeta, 1.0 + zeta * rec.xi, rec.xi, 6.0 + zeta};
        rec.worst[i][kStarOverPlus] = detail::safe_ratio(p_star[i], plus[i]);
        rec.worst[i][kCountGrowth] = detail::safe_ratio(static_cast<double>(final_counts[i]) + g.gammas[i],
                                                        nm + g.gammas[i]);
    }

    Counts c = first;  // n_{., t-1}
    for (std::size_t t = m + 1; t <= n + 1; ++t) {
        const double denom = static_cast<double>(t - 1) + S;
        for (std::size_t i = 0; i < K; ++i) {
            const double pt = (static_cast<double>(c[i]) + g.gammas[i]) / denom;
            auto& w = rec.worst[i];
            w[kStarOverIterate] = std::max(w[kStarOverIterate], detail::safe_ratio(p_star[i], pt));
            w[kIterateOverPlus] = std::max(w[kIterateOverPlus], detail::safe_ratio(pt, plus[i]));
            w[kPlusOverIterate] = std::max(w[kPlusOverIterate], detail::safe_ratio(plus[i], pt));
        }
        if (t <= n) ++c[seq[t - 1]];
    }
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t k = 0; k < kRatioKinds; ++k)
            if (rec.worst[i][k] > rec.caps[i][k] * (1.0 + kInequalityTol)) rec.violated = true;
    return rec;
}

struct RatioDiagnostics {
    std::size_t trials = 0;
    std::vector<RatioRow> worst_ratio;        // per category, max over trials
    std::vector<RatioRow> worst_utilization;  // per category, max of ratio / cap
    std::vector<RatioRow> tightest_cap;       // per category, min cap over trials
    double xi_max = 1.0;
    std::size_t violating_trials = 0;
    double violation_fraction = 0.0;
};

inline RatioDiagnostics ratio_diagnostics(const ProbVec& p_star, std::size_t n, double delta,
                                          std::size_t trials, std::uint64_t seed,
                                          std::size_t threads = default_thread_count()) {
    detail::require_delta(delta);
    if (n < 4) throw std::invalid_argument("ratio diagnostics need n >= 4");
    if (trials < 1) throw std::invalid_argument("ratio diagnostics need trials >= 1");
    const CategoricalSampler sampler(p_star);
    std::vector<TrialRatioRecord> recs(trials);
    parallel_for(
        trials,
        [&](std::size_t t) {
            recs[t] = ratio_check_trial(sample_iid(sampler, n, Seed{seed, t}), p_star, delta);
        },
        threads);

    const std::size_t K = p_star.size();
    RatioDiagnostics d;
    d.trials = trials;
    d.worst_ratio.assign(K, RatioRow{});
    d.worst_utilization.assign(K, RatioRow{});
    RatioRow inf_row;
    inf_row.fill(std::numeric_limits<double>::infinity());
    d.tightest_cap.assign(K, inf_row);
    for (const auto& r : recs) {
        if (r.violated) ++d.violating_trials;
        d.xi_max = std::max(d.xi_max, r.xi);
        for (std::size_t i = 0; i < K; ++i)
            for (std::size_t k = 0; k < kRatioKinds; ++k) {
                d.worst_ratio[i][k] = std::max(d.worst_ratio[i][k], r.worst[i][k]);
                d.worst_utilization[i][k] =
                    std::max(d.worst_utilization[i][k], r.worst[i][k] / r.caps[i][k]);
                d.tightest_cap[i][k] = std::min(d.tightest_cap[i][k], r.caps[i][k]);
            }
    }
    d.violation_fraction = static_cast<double>(d.violating_trials) / static_cast<double>(trials);
    return d;
}

// ---------------------------------------------------------------------------
// Parameter sweeps.

// Target distributions a sweep cell can use. `attack` depends on the
// estimator and (K, n, delta) of the cell; `file` fixes K.
struct PStarSpec {
    enum class Kind { uniform, heavy, half, attack, file };
    Kind kind = Kind::uniform;
    std::string label = "uniform";
    std::optional<ProbVec> fixed;  // for Kind::file

    static PStarSpec from_file(std::string label, ProbVec p) {
        PStarSpec s;
        s.kind = Kind::file;
        s.label = std::move(label);
        s.fixed = std::move(p);
        return s;
    }
    static PStarSpec named(const std::string& name) {
        PStarSpec s;
        s.label = name;
        if (name == "uniform") s.kind = Kind::uniform;
        else if (name == "heavy") s.kind = Kind::heavy;
        else if (name == "half") s.kind = Kind::half;
        else if (name == "attack") s.kind = Kind::attack;
        else throw std::invalid_argument("unknown pstar '" + name + "'");
        return s;
    }
};

// `adaptive` and `otb` without a parameter take the cell's delta.
inline EstimatorSpec resolve_estimator(const std::string& text, double delta) {
    if (text == "adaptive") return EstimatorSpec(AddAdaptive{delta});
    if (text == "otb") return EstimatorSpec(Otb{delta});
    return EstimatorSpec::parse(text);
}

inline ProbVec resolve_pstar(const PStarSpec& spec, const EstimatorSpec& est, std::size_t K,
                             std::size_t n, double delta) {
    switch (spec.kind) {
        case PStarSpec::Kind::uniform:
            return uniform(K);
        case PStarSpec::Kind::heavy: {
            // One atom carrying half the mass, the rest spread evenly.
            std::vector<double> p(K, 0.5 / static_cast<double>(K - 1));
            p[0] = 0.5;
            return ProbVec::assume_normalized(std::move(p));
        }
        case PStarSpec::Kind::half: {
            const std::size_t support = (K + 1) / 2;
            std::vector<double> p(K, 0.0);
            for (std::size_t i = 0; i < support; ++i) p[i] = 1.0 / static_cast<double>(support);
            return ProbVec::assume_normalized(std::move(p));
        }
        case PStarSpec::Kind::attack:
            return build_attack(probe_zero_counts(est, K, n), n, delta).p_star;
        case PStarSpec::Kind::file:
            if (spec.fixed->size() != K)
                throw std::invalid_argument("pstar file has K=" + std::to_string(spec.fixed->size()) +
                                            " but the cell asks for K=" + std::to_string(K));
            return *spec.fixed;
    }
    throw std::logic_error("unreachable pstar kind");
}

struct SweepGrid {
    std::vector<std::string> estimators;
    std::vector<std::size_t> Ks;
    std::vector<std::size_t> ns;
    std::vector<double> deltas;
    std::vector<PStarSpec> pstars{PStarSpec{}};
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
};

struct SweepCell {
    std::string pstar_label;
    TrialConfig config;
};

// Expands and validates every cell; throws before anything runs.
inline std::vector<SweepCell> expand_grid(const SweepGrid& g) {
    std::vector<SweepCell> cells;
    for (const auto& est_text : g.estimators)
        for (const auto& ps : g.pstars)
            for (std::size_t K : g.Ks)
                for (std::size_t n : g.ns)
                    for (double delta : g.deltas) {
                        detail::require_delta(delta);
                        if (K < 2) throw std::invalid_argument("K must be >= 2");
                        SweepCell c;
                        c.pstar_label = ps.label;
                        c.config.estimator = resolve_estimator(est_text, delta);
                        c.config.p_star = resolve_pstar(ps, c.config.estimator, K, n, delta);
                        c.config.n = n;
                        c.config.delta = delta;
                        c.config.trials = g.trials;
                        c.config.seed = g.seed;
                        c.config.validate();
                        cells.push_back(std::move(c));
                    }
    return cells;
}

inline constexpr const char* kSweepCsvHeader =
    "estimator,K,n,delta,trials,seed,quantile,mean_kl,frac_infinite,rate_K_over_n,"
    "rate_logKlog1d_over_n,rate_combined_over_n,pstar";

inline std::string sweep_csv_row(const SweepCell& cell, const RiskReport& r) {
    const auto& c = cell.config;
    const double K = static_cast<double>(c.p_star.size());
    const double n = static_cast<double>(c.n);
    const double logK_log1d = std::log(K) * std::log(1.0 / c.delta);
    std::string row;
    row += c.estimator.to_string() + ',';
    row += std::to_string(c.p_star.size()) + ',';
    row += std::to_string(c.n) + ',';
    row += format_real(c.delta) + ',';
    row += std::to_string(c.trials) + ',';
    row += std::to_string(c.seed) + ',';
    row += r.quantile.to_string() + ',';
    row += r.mean_kl.to_string() + ',';
    row += format_real(r.frac_infinite) + ',';
    row += format_real(K / n) + ',';
    row += format_real(logK_log1d / n) + ',';
    row += format_real((K + logK_log1d) / n) + ',';
    row += cell.pstar_label;
    return row;
}

struct SweepResult {
    std::vector<SweepCell> cells;
    std::vector<RiskReport> reports;

    std::string csv() const {
        std::string out = std::string(kSweepCsvHeader) + '\n';
        for (std::size_t i = 0; i < cells.size(); ++i) out += sweep_csv_row(cells[i], reports[i]) + '\n';
        return out;
    }
};

inline SweepResult run_cells(std::vector<SweepCell> cells, std::size_t threads = default_thread_count()) {
    SweepResult res;
    res.cells = std::move(cells);
    for (const auto& c : res.cells) res.reports.push_back(run_trials(c.config, threads));
    return res;
}

inline SweepResult sweep(const SweepGrid& grid, std::size_t threads = default_thread_count()) {
    return run_cells(expand_grid(grid), threads);
}

}  // namespace klest
