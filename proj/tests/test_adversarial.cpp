#include <gtest/gtest.h>

#include <cmath>

#include "klest/adversarial.hpp"

using namespace klest;

TEST(Probe, LaplaceZeroCounts) {
    const auto p = probe_zero_counts(EstimatorSpec(AddConstant{1.0}), 10, 100);
    for (int i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(p[i], 1.0 / 110.0);
    EXPECT_DOUBLE_EQ(p[9], 101.0 / 110.0);
}

TEST(Probe, MleAndKt) {
    for (std::size_t K : {2u, 5u, 30u}) {
        const auto p = probe_zero_counts(EstimatorSpec(Mle{}), K, 17);
        for (std::size_t i = 0; i + 1 < K; ++i) EXPECT_EQ(p[i], 0.0);
        EXPECT_EQ(p[K - 1], 1.0);
    }
    const auto kt = probe_zero_counts(EstimatorSpec(AddConstant{0.5}), 3, 10);
    EXPECT_DOUBLE_EQ(kt[0], 0.5 / 11.5);
    EXPECT_DOUBLE_EQ(kt[1], 0.5 / 11.5);
    EXPECT_DOUBLE_EQ(kt[2], 10.5 / 11.5);
}

TEST(Attack, LaplaceInstance) {
    const auto p0 = probe_zero_counts(EstimatorSpec(AddConstant{1.0}), 10, 100);
    const auto inst = build_attack(p0, 100, 0.1);
    EXPECT_NEAR(inst.alpha, 1.5350567286626971227, 1e-15);
    EXPECT_EQ(inst.attacked_index, 0u);  // all tied, lowest index
    EXPECT_NEAR(inst.neglected_mass, 9.0 / 110.0, 1e-15);
    EXPECT_NEAR(inst.p_star[0], inst.alpha / 100, 1e-17);
    EXPECT_NEAR(inst.p_star[9], 1 - inst.alpha / 100, 1e-15);
    for (int i = 1; i < 9; ++i) EXPECT_EQ(inst.p_star[i], 0.0);
    // mpmath evaluation of the closed form with s = 9/110.
    ASSERT_TRUE(inst.bound.is_finite());
    EXPECT_NEAR(inst.bound.value(), 0.074509431605356565110, 1e-14);
}

TEST(Attack, BoundIsBelowKlOnTheBadEvent) {
    for (double gamma : {0.05, 0.5, 1.0, 3.0}) {
        const auto p0 = probe_zero_counts(EstimatorSpec(AddConstant{gamma}), 10, 100);
        const auto inst = build_attack(p0, 100, 0.1);
        EXPECT_GE(kl(inst.p_star, p0), inst.bound) << gamma;
    }
}

TEST(Attack, MleBoundIsInfinite) {
    const auto inst = build_attack(probe_zero_counts(EstimatorSpec(Mle{}), 10, 100), 100, 0.1);
    EXPECT_TRUE(inst.bound.is_infinite());
}

TEST(Attack, LowestIndexArgmin) {
    const auto p0 = validate_prob_vec(std::vector<double>{0.2, 0.1, 0.1, 0.6});
    EXPECT_EQ(build_attack(p0, 50, 0.1).attacked_index, 1u);
    const auto sym = validate_prob_vec(std::vector<double>{0.25, 0.25, 0.25, 0.25});
    EXPECT_EQ(build_attack(sym, 50, 0.1).attacked_index, 0u);
    // Category K is never attacked even when it is the smallest.
    const auto last_small = validate_prob_vec(std::vector<double>{0.3, 0.4, 0.3, 0.0});
    EXPECT_EQ(build_attack(last_small, 50, 0.1).attacked_index, 0u);
}

TEST(Attack, HypothesisChecked) {
    const auto p0 = uniform(3);
    EXPECT_THROW(build_attack(p0, 3, 0.1), std::invalid_argument);  // 3 < (4/3) ln 10
    EXPECT_NO_THROW(build_attack(p0, 4, 0.1));
    EXPECT_THROW(build_attack(p0, 100, 0.0), std::invalid_argument);
}

TEST(AttackEvent, Probability) {
    EXPECT_EQ(attack_event_probability(0.0, 10), 1.0);
    const double a = attack_alpha(0.1);
    const double pe = attack_event_probability(a, 100);
    EXPECT_NEAR(pe, 0.21289403966059170246, 1e-14);  // mpmath
    EXPECT_GT(pe, 0.1);
    EXPECT_GT(pe, std::exp(-1.5 * a));
    EXPECT_THROW(attack_event_probability(5.0, 10), std::invalid_argument);
}

TEST(AttackEvent, ExceedsDeltaAcrossGrid) {
    for (double delta : {0.5, 0.1, 0.01, 1e-4, 1e-8})
        for (std::uint64_t n : {10ull, 30ull, 100ull, 10000ull}) {
            const double a = attack_alpha(delta);
            if (!(n > 2 * a)) continue;
            EXPECT_GT(attack_event_probability(a, n), delta) << delta << " " << n;
        }
}

TEST(AttackEvent, NearHalfMassAsymptotics) {
    // alpha = n/2 - 1: (1/2 + 1/n)^n = 2^{-n} (1 + 2/n)^n -> e^2 2^{-n}.
    for (std::uint64_t n : {200ull, 1000ull}) {
        const double nd = static_cast<double>(n);
        const double log_p = std::log(attack_event_probability(nd / 2 - 1, n));
        const double exact = nd * std::log(0.5 + 1.0 / nd);
        EXPECT_NEAR(log_p, exact, 1e-9 * nd);
        EXPECT_NEAR(log_p, -nd * std::log(2.0) + 2.0, 4.0 / nd);
    }
}

TEST(HardFamily, DegenerateK2) {
    const auto fam = hard_family(2, 100, 0.1);
    ASSERT_EQ(fam.members.size(), 1u);
    EXPECT_EQ(fam.separation, 0.0);
    EXPECT_NEAR(kl(fam.members[0], fam.mixture).value(), 0.0, 1e-15);
}

TEST(HardFamily, ClosedFormSeparation) {
    const auto fam = hard_family(10, 100, 0.1);
    ASSERT_EQ(fam.members.size(), 9u);
    EXPECT_NEAR(fam.separation, 0.033728643718230142869, 1e-15);  // mpmath
    for (std::size_t k = 0; k < fam.members.size(); ++k) {
        const auto& P = fam.members[k];
        EXPECT_NEAR(P[0], 1 - fam.alpha / 100, 1e-15);
        EXPECT_NEAR(P[HardFamily::member_label(k) - 1], fam.alpha / 100, 1e-17);
        EXPECT_NEAR(kl(P, fam.mixture).value(), fam.separation, 1e-12);
    }
    EXPECT_EQ(HardFamily::member_label(0), 2u);
}

TEST(HardFamily, PairwiseMixture) {
    const auto fam = hard_family(5, 60, 0.05);
    const auto& a = fam.members[0];
    const auto& b = fam.members[2];
    std::vector<double> mid(5);
    for (int i = 0; i < 5; ++i) mid[i] = 0.5 * (a[i] + b[i]);
    EXPECT_NEAR(kl(a, validate_prob_vec(mid)).value(), fam.pairwise_mixture_kl, 1e-14);
}

TEST(HardFamily, AlphaMustNotExceedHalfN) {
    EXPECT_THROW(hard_family(5, 2, 0.01), std::invalid_argument);
    EXPECT_THROW(hard_family(1, 100, 0.1), std::invalid_argument);
}
