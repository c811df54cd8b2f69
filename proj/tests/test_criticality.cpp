#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "stm/criticality.hpp"

using namespace stm;

namespace {

// s(m) by plain bisection on the antisymmetrized and series forms separately.
double s_oracle(double m, FRep rep) {
    const MassParam mp(m);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f_total({1, 0}, mp, mid, rep) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::string regime_message(double m) {
    try {
        s_of_m(MassParam(m));
    } catch (const RegimeError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(CriticalPair, SectorOneRanges) {
    const auto p = critical_pair({1, 0});
    EXPECT_NEAR(p.m_star.m, 0.0735, 5e-4);
    EXPECT_NEAR(p.m_star_star.m, 0.116, 1e-3);
    // regression on the computed values
    EXPECT_NEAR(p.m_star.m, 0.0734917705, 1e-9);
    EXPECT_NEAR(p.m_star_star.m, 0.1160284359, 1e-9);
    EXPECT_LE(p.residual_star, 1e-10);
    EXPECT_LE(p.residual_star_star, 1e-10);
}

TEST(CriticalPair, SectorThreeRanges) {
    const auto p = critical_pair({3, 0});
    EXPECT_NEAR(p.m_star_star.m, 0.0142, 3e-4);
    EXPECT_NEAR(p.m_star_star.m, 0.0142712850, 1e-9);
    EXPECT_LT(p.m_star.m, p.m_star_star.m);
    EXPECT_LE(p.residual_star, 1e-10);
    EXPECT_LE(p.residual_star_star, 1e-10);
}

TEST(CriticalPair, SectorOrdering) {
    const auto one = critical_pair({1, 0}), three = critical_pair({3, 0}), five = critical_pair({5, 0});
    EXPECT_LT(three.m_star_star.m, one.m_star.m);
    EXPECT_LT(three.m_star.m, one.m_star.m);
    EXPECT_LT(five.m_star.m, three.m_star.m);
    EXPECT_LT(five.m_star_star.m, three.m_star_star.m);
}

TEST(CriticalPair, ZeroOfFWithinBracket) {
    const auto p = critical_pair({1, 0});
    EXPECT_LT(f_total({1, 0}, MassParam(p.m_star.m - 1e-9), 0.0), 0.0);
    EXPECT_GT(f_total({1, 0}, MassParam(p.m_star.m + 1e-9), 0.0), 0.0);
}

TEST(CriticalPair, EvenSectorRejected) {
    EXPECT_THROW(critical_pair({2, 0}), DomainError);
    EXPECT_THROW(m_of_s({4, 0}, 0.5), DomainError);
}

TEST(SOfM, AtReferenceMassAgreesWithIndependentBisection) {
    const double s = s_of_m(MassParam(0.09)).value;
    EXPECT_GT(s, 0.0);
    EXPECT_LT(s, 1.0);
    EXPECT_NEAR(s, s_oracle(0.09, FRep::Antisymmetrized), 1e-9);
    EXPECT_NEAR(s, s_oracle(0.09, FRep::Series), 1e-9);
}

TEST(SOfM, RoundTripThroughMOfS) {
    for (int i = 1; i <= 9; ++i) {
        const double s = i / 10.0;
        const auto m = m_of_s({1, 0}, s);
        EXPECT_NEAR(s_of_m(MassParam(m.value)).value, s, 1e-6) << s;
    }
}

TEST(SOfM, IncreasingInMass) {
    const auto p = critical_pair({1, 0});
    double prev = -1.0;
    for (int i = 0; i < 20; ++i) {
        const double m = p.m_star.m + (p.m_star_star.m - p.m_star.m) * (i + 0.5) / 20.0;
        const double s = s_of_m(MassParam(m)).value;
        EXPECT_GT(s, prev);
        prev = s;
    }
}

TEST(SOfM, EndpointsClamp) {
    const auto p = critical_pair({1, 0});
    EXPECT_EQ(s_of_m(p.m_star).value, 0.0);
    EXPECT_EQ(s_of_m(p.m_star_star).value, 1.0);
}

TEST(SOfM, OutsideWindowIsARegimeErrorNamingTheBound) {
    EXPECT_THROW(s_of_m(MassParam(0.05)), RegimeError);
    EXPECT_THROW(s_of_m(MassParam(0.2)), RegimeError);
    EXPECT_NE(regime_message(0.05).find("m*"), std::string::npos);
    EXPECT_NE(regime_message(0.2).find("m**"), std::string::npos);
}
