#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "klest/dist.hpp"

using namespace klest;

TEST(ProbVec, AcceptsValidVectors) {
    const auto p = validate_prob_vec(std::vector<double>{0.5, 0.5});
    ASSERT_EQ(p.size(), 2u);
    EXPECT_DOUBLE_EQ(p[0], 0.5);
    EXPECT_DOUBLE_EQ(p[1], 0.5);

    const auto vertex = validate_prob_vec(std::vector<double>{1.0, 0.0, 0.0});
    EXPECT_EQ(vertex[0], 1.0);
    EXPECT_EQ(vertex[1], 0.0);
    EXPECT_EQ(vertex[2], 0.0);
}

TEST(ProbVec, RejectsBadNormalization) {
    EXPECT_THROW(validate_prob_vec(std::vector<double>{0.3, 0.3}), std::invalid_argument);
    EXPECT_THROW(validate_prob_vec(std::vector<double>{0.5, 0.5 + 2e-9}), std::invalid_argument);
}

TEST(ProbVec, RejectsSmallAlphabetAndNegatives) {
    EXPECT_THROW(validate_prob_vec(std::vector<double>{1.0}), std::invalid_argument);
    EXPECT_THROW(validate_prob_vec(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(validate_prob_vec(std::vector<double>{1.1, -0.1}), std::invalid_argument);
    EXPECT_THROW(validate_prob_vec(std::vector<double>{1.0, -1e-14}), std::invalid_argument);
    EXPECT_THROW(validate_prob_vec(std::vector<double>{NAN, 1.0}), std::invalid_argument);
}

TEST(ProbVec, ClampsAndRenormalizesNearValidInput) {
    const auto p = validate_prob_vec(std::vector<double>{1.0 + 5e-10, -1e-16, 0.0});
    EXPECT_EQ(p[1], 0.0);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    const auto q = validate_prob_vec(std::vector<double>{0.3333333333, 0.3333333333, 0.3333333333});
    EXPECT_NEAR(q[0] + q[1] + q[2], 1.0, 1e-12);
}

TEST(Sampling, DegenerateDistribution) {
    const auto p = validate_prob_vec(std::vector<double>{1.0, 0.0});
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto seq = sample_iid(p, 5, Seed{s, s * 7});
        for (auto x : seq.items()) EXPECT_EQ(x, 0u);
    }
}

TEST(Sampling, ZeroMassTailIsUnreachable) {
    const auto p = validate_prob_vec(std::vector<double>{0.3, 0.7, 0.0, 0.0});
    const auto seq = sample_iid(p, 100000, Seed{3, 0});
    const auto c = seq.counts();
    EXPECT_EQ(c[2], 0u);
    EXPECT_EQ(c[3], 0u);
}

TEST(Sampling, DeterministicPerSeed) {
    const auto p = uniform(7);
    const auto a = sample_iid(p, 1000, Seed{42, 5});
    const auto b = sample_iid(p, 1000, Seed{42, 5});
    const auto c = sample_iid(p, 1000, Seed{42, 6});
    EXPECT_TRUE(std::equal(a.items().begin(), a.items().end(), b.items().begin()));
    EXPECT_FALSE(std::equal(a.items().begin(), a.items().end(), c.items().begin()));
}

TEST(Sampling, FairCoinLawOfLargeNumbers) {
    // 6 sigma of Binomial(1e6, 1/2) frequency is 0.003; the tighter 0.002
    // band is what the contract asks for at this seed.
    const auto p = validate_prob_vec(std::vector<double>{0.5, 0.5});
    const auto seq = sample_iid(p, 1000000, Seed{2024, 0});
    const double freq = static_cast<double>(seq.counts()[0]) / 1e6;
    EXPECT_NEAR(freq, 0.5, 0.002);
}

TEST(Sampling, GoodnessOfFitSixSigma) {
    const std::vector<std::vector<double>> panels = {
        {0.01, 0.09, 0.2, 0.3, 0.4}, {0.5, 0.25, 0.25}, {0.02, 0.98}};
    const std::size_t n = 100000;
    for (const auto& raw : panels) {
        const auto p = validate_prob_vec(raw);
        const auto c = sample_iid(p, n, Seed{11, 0}).counts();
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double f = static_cast<double>(c[i]) / n;
            EXPECT_LE(std::abs(f - p[i]), 6.0 * std::sqrt(p[i] * (1 - p[i]) / n)) << "category " << i + 1;
        }
    }
}

TEST(SampleSeq, PrefixCounts) {
    const std::vector<std::int64_t> raw = {1, 2, 1, 1};
    const auto seq = SampleSeq::from_one_based(2, raw);
    EXPECT_EQ(prefix_counts(seq, 4), (Counts{3, 1}));
    EXPECT_EQ(prefix_counts(seq, 0), (Counts{0, 0}));
    EXPECT_EQ(prefix_counts(seq, 2), (Counts{1, 1}));
    EXPECT_THROW(prefix_counts(seq, 5), std::out_of_range);
}

TEST(SampleSeq, RejectsOutOfRangeItems) {
    const std::vector<std::int64_t> zero = {0, 1};
    const std::vector<std::int64_t> big = {1, 3};
    EXPECT_THROW(SampleSeq::from_one_based(2, zero), std::invalid_argument);
    EXPECT_THROW(SampleSeq::from_one_based(2, big), std::invalid_argument);
}

TEST(SampleSeq, PrefixCountInvariants) {
    const auto seq = sample_iid(uniform(6), 500, Seed{9, 1});
    Counts prev(6, 0);
    for (std::size_t t = 0; t <= seq.size(); ++t) {
        const auto c = seq.prefix_counts(t);
        EXPECT_EQ(total(c), t);
        for (std::size_t i = 0; i < 6; ++i) EXPECT_GE(c[i], prev[i]);
        prev = c;
    }
}
