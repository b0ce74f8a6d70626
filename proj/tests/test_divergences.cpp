#include <gtest/gtest.h>

#include <cmath>

#include "klest/divergences.hpp"
#include "test_support.hpp"

using namespace klest;

namespace {
ProbVec pv(std::vector<double> v) { return validate_prob_vec(v); }
}  // namespace

TEST(ExtReal, OrderingAndArithmetic) {
    const auto inf = ExtReal::infinity();
    EXPECT_LT(ExtReal(1e300), inf);
    EXPECT_EQ(inf, inf);
    EXPECT_EQ(inf + ExtReal(1.0), inf);
    EXPECT_EQ(2.0 * inf, inf);
    EXPECT_EQ(0.0 * inf, ExtReal(0.0));
    EXPECT_EQ(inf.to_string(), "inf");
    EXPECT_EQ(ExtReal(1.0 / 3.0).to_string(), "0.333333333333");
    EXPECT_THROW(ExtReal(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(Kl, Examples) {
    EXPECT_EQ(kl(pv({0.5, 0.5}), pv({0.5, 0.5})), ExtReal(0.0));
    EXPECT_TRUE(kl(pv({0.5, 0.5}), pv({1, 0})).is_infinite());
    EXPECT_NEAR(kl(pv({0.5, 0.5}), pv({0.25, 0.75})).value(), 0.5 * std::log(4.0 / 3.0), 1e-15);
    // 0 log 0 = 0
    EXPECT_NEAR(kl(pv({1, 0}), pv({0.5, 0.5})).value(), std::log(2.0), 1e-15);
    EXPECT_THROW(kl(pv({0.5, 0.5}), pv({0.2, 0.3, 0.5})), std::invalid_argument);
}

TEST(Chi2, Examples) {
    EXPECT_EQ(chi2(pv({0.3, 0.7}), pv({0.3, 0.7})), ExtReal(0.0));
    EXPECT_NEAR(chi2(pv({0.5, 0.5}), pv({0.25, 0.75})).value(), 1.0 / 3.0, 1e-15);
    EXPECT_TRUE(chi2(pv({1, 0}), pv({0, 1})).is_infinite());
    // 0/0 terms contribute nothing.
    EXPECT_NEAR(chi2(pv({0.5, 0.5, 0}), pv({0.25, 0.75, 0})).value(), 1.0 / 3.0, 1e-15);
}

TEST(Hellinger, Examples) {
    EXPECT_EQ(hellinger_sq(pv({0.2, 0.8}), pv({0.2, 0.8})), ExtReal(0.0));
    EXPECT_DOUBLE_EQ(hellinger_sq(pv({1, 0}), pv({0, 1})).value(), 2.0);
    // mpmath, 40 digits: 0.06814834742186342650...
    EXPECT_NEAR(hellinger_sq(pv({0.5, 0.5}), pv({0.25, 0.75})).value(), 0.0681483474218634265, 1e-15);
}

TEST(L1, Examples) {
    EXPECT_EQ(l1(pv({0.2, 0.8}), pv({0.2, 0.8})), ExtReal(0.0));
    EXPECT_DOUBLE_EQ(l1(pv({1, 0}), pv({0, 1})).value(), 2.0);
    EXPECT_DOUBLE_EQ(l1(pv({0.5, 0.5}), pv({0.25, 0.75})).value(), 0.5);
}

TEST(Pinsker, Examples) {
    EXPECT_EQ(pinsker_gap(pv({0.2, 0.8}), pv({0.2, 0.8})), ExtReal(0.0));
    // mpmath: 0.5 ln(4/3) - 1/8
    EXPECT_NEAR(pinsker_gap(pv({0.5, 0.5}), pv({0.25, 0.75})).value(), 0.0188410362258904637, 1e-15);
    EXPECT_TRUE(pinsker_gap(pv({0.5, 0.5}), pv({1, 0})).is_infinite());
}

TEST(Divergences, NonNegativityAndRanges) {
    std::mt19937_64 rng(17);
    for (std::size_t K : {2u, 3u, 10u, 100u}) {
        for (int rep = 0; rep < 200; ++rep) {
            const auto p = test_util::random_simplex(rng, K, 0.5);
            const auto q = test_util::random_simplex(rng, K, 0.5);
            EXPECT_GE(kl(p, q), ExtReal(0.0));
            EXPECT_GE(chi2(p, q), ExtReal(0.0));
            const double h = hellinger_sq(p, q).value();
            const double v = l1(p, q).value();
            EXPECT_GE(h, 0.0);
            EXPECT_LE(h, 2.0);
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 2.0);
            EXPECT_EQ(kl(p, p), ExtReal(0.0));
            EXPECT_EQ(chi2(p, p), ExtReal(0.0));
            EXPECT_EQ(hellinger_sq(p, p), ExtReal(0.0));
            EXPECT_EQ(l1(p, p), ExtReal(0.0));
        }
    }
}

TEST(Pinsker, SeededPairs) {
    std::mt19937_64 rng(2);
    int violations = 0;
    for (std::size_t K : {2u, 3u, 10u, 100u})
        for (int rep = 0; rep < 2500; ++rep) {
            const auto p = test_util::random_simplex(rng, K, 0.7);
            const auto q = test_util::random_simplex(rng, K, 0.7);
            if (pinsker_gap(p, q) < ExtReal(-kInequalityTol)) ++violations;
        }
    EXPECT_EQ(violations, 0);
}

TEST(Chain, IdentityIsAllZero) {
    const auto r = chain_report(pv({0.5, 0.5}), pv({0.5, 0.5}));
    for (const auto& t : r.terms) EXPECT_EQ(t, ExtReal(0.0));
    EXPECT_TRUE(r.monotone);
}

TEST(Chain, SymmetricPairValues) {
    const auto r = chain_report(pv({0.6, 0.4}), pv({0.4, 0.6}));
    // Independent evaluation (mpmath / numpy):
    const double expected[7] = {0.0277777777777778, 0.0416666666666667, 0.0810930216216329,
                                0.1010205144336438, 0.2027325540540822, 0.4166666666666667,
                                0.8333333333333333};
    for (int k = 0; k < 7; ++k) EXPECT_NEAR(r.terms[k].value(), expected[k], 1e-13) << k;
    EXPECT_TRUE(r.monotone);
}

TEST(Chain, RatioPreconditionReportsIndex) {
    try {
        chain_report(pv({0.9, 0.1}), pv({0.3, 0.7}));
        FAIL() << "expected RatioPreconditionError";
    } catch (const RatioPreconditionError& e) {
        EXPECT_EQ(e.category(), 0u);  // category 1
        EXPECT_NEAR(e.ratio(), 3.0, 1e-12);
    }
    EXPECT_THROW(chain_report(pv({1, 0}), pv({0.5, 0.5})), RatioPreconditionError);
}

// At density ratio 2 the first link chi2(p||q)/6 <= chi2(q||p)/4 can fail:
// termwise it needs p/q <= 3/2. This pair is a concrete witness.
TEST(Chain, FirstLinkFailsNearRatioTwo) {
    const auto r = chain_report(pv({0.2, 0.8}), pv({0.1, 0.9}));
    EXPECT_NEAR(r.terms[0].value(), 0.1111111111111111 / 6.0, 1e-15);
    EXPECT_NEAR(r.terms[1].value(), 0.0625 / 4.0, 1e-15);
    EXPECT_FALSE(r.monotone);
    EXPECT_EQ(r.first_violation, 0);
}

TEST(Chain, HoldsWhenRatioWithinThreeHalves) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t K = 2 + rep % 9;
        const auto [p, q] = test_util::ratio_bounded_pair(rng, K, 1.5);
        EXPECT_TRUE(chain_report(p, q).monotone);
    }
}

TEST(Chain, LaterLinksHoldAtRatioTwo) {
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 1000; ++rep) {
        const auto [p, q] = test_util::ratio_bounded_pair(rng, 2 + rep % 9);
        const auto r = chain_report(p, q);
        for (std::size_t k = 1; k + 1 < 7; ++k)
            EXPECT_LE(r.terms[k].value(), r.terms[k + 1].value() + kInequalityTol) << "link " << k;
    }
}

TEST(YangBarron, IdentityGapIsZero) {
    const auto u = uniform(4);
    EXPECT_EQ(yang_barron_gap(u, u, u, 1.0), 0.0);
}

TEST(YangBarron, HandExample) {
    const double gap = yang_barron_gap(pv({0.5, 0.5}), pv({0.5, 0.5}), pv({0.75, 0.25}), 1.5);
    // Direct evaluation of both sides.
    const double l1_ = std::log(1.5), l2_ = std::log(0.5);
    const double lhs = 0.5 * l1_ * l1_ + 0.5 * l2_ * l2_;
    const double rhs = (2 + std::log(1.5)) * (0.5 * l1_ + 0.5 * l2_ + 0.5 / 1.5 + 0.5 / 0.5 - 1.0);
    EXPECT_NEAR(gap, rhs - lhs, 1e-15);
    EXPECT_GE(gap, 0.0);
}

TEST(YangBarron, SeededTriples) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> vdist(1.0, 6.0);
    int accepted = 0;
    while (accepted < 1000) {
        const std::size_t K = 2 + accepted % 12;
        const auto p = test_util::random_simplex(rng, K, 0.8);
        const auto q = test_util::random_simplex(rng, K, 2.0);
        const auto r = test_util::random_simplex(rng, K, 2.0);
        const double V = vdist(rng);
        bool ok = true;
        for (std::size_t i = 0; i < K; ++i) ok = ok && r[i] / q[i] <= V;
        if (!ok) continue;
        ++accepted;
        EXPECT_GE(yang_barron_gap(p, q, r, V), -kInequalityTol);
    }
}

TEST(YangBarron, RejectsRatioAboveV) {
    EXPECT_THROW(yang_barron_gap(pv({0.5, 0.5}), pv({0.5, 0.5}), pv({0.75, 0.25}), 1.2),
                 std::domain_error);
}
