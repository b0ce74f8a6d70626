#pragma once
// Probability vectors on a finite alphabet [K], seeded i.i.d. sampling and
// prefix-count bookkeeping.
//
// Categories are 0-based inside the library. Files and the CLI use 1-based
// indices; the conversion happens in io.hpp and SampleSeq::from_one_based.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace klest {

using Counts = std::vector<std::uint64_t>;

inline constexpr double kSimplexSumTol = 1e-9;
inline constexpr double kNegativeClampTol = 1e-15;

class ProbVec {
public:
    // Checked construction: see validate_prob_vec.
    static ProbVec validated(std::span<const double> raw);

    // For library code that builds a distribution by an exact formula whose
    // entries are non-negative and sum to one up to rounding.
    static ProbVec assume_normalized(std::vector<double> probs) {
        return ProbVec(std::move(probs));
    }

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    std::span<const double> probs() const noexcept { return p_; }
    auto begin() const noexcept { return p_.begin(); }
    auto end() const noexcept { return p_.end(); }

    friend bool operator==(const ProbVec&, const ProbVec&) = default;

private:
    explicit ProbVec(std::vector<double> p) : p_(std::move(p)) {}
    std::vector<double> p_;
};

// Accepts entries >= -1e-15 (clamped to 0) with sum within 1e-9 of one, and
// renormalizes. Rejects K < 2, non-finite entries, and anything further off.
inline ProbVec ProbVec::validated(std::span<const double> raw) {
    if (raw.size() < 2)
        throw std::invalid_argument("probability vector needs K >= 2 entries, got " +
                                    std::to_string(raw.size()));
    std::vector<double> p(raw.begin(), raw.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!std::isfinite(p[i]))
            throw std::invalid_argument("non-finite probability at category " +
                                        std::to_string(i + 1));
        if (p[i] < -kNegativeClampTol)
            throw std::invalid_argument("negative probability at category " +
                                        std::to_string(i + 1));
        if (p[i] < 0.0) p[i] = 0.0;
        sum += p[i];
    }
    if (std::abs(sum - 1.0) > kSimplexSumTol)
        throw std::invalid_argument("probabilities sum to " + std::to_string(sum) +
                                    ", not 1");
    for (double& x : p) x /= sum;
    return ProbVec(std::move(p));
}

inline ProbVec validate_prob_vec(std::span<const double> raw) { return ProbVec::validated(raw); }

inline ProbVec uniform(std::size_t K) {
    if (K < 2) throw std::invalid_argument("uniform distribution needs K >= 2");
    return ProbVec::assume_normalized(std::vector<double>(K, 1.0 / static_cast<double>(K)));
}

// (master, stream) fully determines a trial's random sequence.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

// One independent generator per (master, stream) key; no state is shared
// between streams, so trials can run in any order or in parallel.
class StreamRng {
public:
    explicit StreamRng(Seed seed) : engine_(make_engine(seed)) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    static std::mt19937_64 make_engine(Seed s) {
        std::seed_seq seq{static_cast<std::uint32_t>(s.master),
                          static_cast<std::uint32_t>(s.master >> 32),
                          static_cast<std::uint32_t>(s.stream),
                          static_cast<std::uint32_t>(s.stream >> 32)};
        return std::mt19937_64(seq);
    }
    std::mt19937_64 engine_;
};

// Inverse-CDF sampler over a fixed ProbVec.
class CategoricalSampler {
public:
    explicit CategoricalSampler(const ProbVec& p) : cdf_(p.size()) {
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc += p[i];
            cdf_[i] = acc;
            if (p[i] > 0.0) last_positive = i;
        }
        // Zero-mass tail categories must stay unreachable.
        for (std::size_t i = last_positive; i < cdf_.size(); ++i) cdf_[i] = 1.0;
    }

    std::uint32_t draw(StreamRng& rng) const {
        const double u = rng.uniform();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<std::uint32_t>(it - cdf_.begin());
    }

    std::size_t size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

// An ordered sample x_1..x_n over [K], stored 0-based.
class SampleSeq {
public:
    SampleSeq(std::size_t K, std::vector<std::uint32_t> items) : K_(K), items_(std::move(items)) {
        if (K_ < 2) throw std::invalid_argument("sample alphabet needs K >= 2");
        if (items_.empty()) throw std::invalid_argument("sample must be non-empty");
        for (auto x : items_)
            if (x >= K_) throw std::invalid_argument("sample item outside [K]");
    }

    static SampleSeq from_one_based(std::size_t K, std::span<const std::int64_t> items) {
        std::vector<std::uint32_t> v;
        v.reserve(items.size());
        for (auto x : items) {
            if (x < 1 || static_cast<std::uint64_t>(x) > K)
                throw std::invalid_argument("category index " + std::to_string(x) +
                                            " outside 1.." + std::to_string(K));
            v.push_back(static_cast<std::uint32_t>(x - 1));
        }
        return SampleSeq(K, std::move(v));
    }

    std::size_t K() const noexcept { return K_; }
    std::size_t size() const noexcept { return items_.size(); }
    std::span<const std::uint32_t> items() const noexcept { return items_; }
    std::uint32_t operator[](std::size_t t) const { return items_[t]; }

    // Counts over the first t items; t = 0 gives all zeros.
    Counts prefix_counts(std::size_t t) const {
        if (t > items_.size())
            throw std::out_of_range("prefix length " + std::to_string(t) + " exceeds n = " +
                                    std::to_string(items_.size()));
        Counts c(K_, 0);
        for (std::size_t s = 0; s < t; ++s) ++c[items_[s]];
        return c;
    }

    Counts counts() const { return prefix_counts(items_.size()); }

private:
    std::size_t K_;
    std::vector<std::uint32_t> items_;
};

inline Counts prefix_counts(const SampleSeq& seq, std::size_t t) { return seq.prefix_counts(t); }

inline SampleSeq sample_iid(const CategoricalSampler& sampler, std::size_t n, Seed seed) {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    StreamRng rng(seed);
    std::vector<std::uint32_t> items(n);
    for (auto& x : items) x = sampler.draw(rng);
    return SampleSeq(sampler.size(), std::move(items));
}

inline SampleSeq sample_iid(const ProbVec& p, std::size_t n, Seed seed) {
    return sample_iid(CategoricalSampler(p), n, seed);
}

inline std::uint64_t total(std::span<const std::uint64_t> counts) {
    std::uint64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

}  // namespace klest
