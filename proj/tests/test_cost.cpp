#include "flowsense/cost.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "flowsense/rng.hpp"

using namespace flowsense;

namespace {

ExpectedCostParams params(double b, double w, double c, double mu_tilde,
                          double sigma) {
  return ExpectedCostParams{b, w, c, mu_tilde, sigma};
}

}  // namespace

TEST(BprCost, ZeroFlowReturnsNominal) {
  EXPECT_DOUBLE_EQ(bpr_cost(0.0, 0.0, params(2.5, 0.3, 7.0, 0, 0)), 2.5);
}

TEST(BprCost, AtCapacityAddsWeight) {
  EXPECT_DOUBLE_EQ(bpr_cost(3.0, 4.0, params(2.5, 0.3, 7.0, 0, 0)), 2.8);
}

TEST(BprCost, DirectArithmetic) {
  // b=1, w=0.15, c=2, f+y=4 -> 1 + 0.15*16
  EXPECT_NEAR(bpr_cost(1.0, 3.0, params(1.0, 0.15, 2.0, 0, 0)), 3.4, 1e-12);
}

TEST(ExpectedCost, SigmaZeroReducesToBpr) {
  // mu_tilde = mu - f_hat; with mu = 4, f_hat = 9: psi(y) = phi(y + 5)
  const auto p = params(1.0, 0.7, 3.0, 4.0 - 9.0, 0.0);
  for (double y : {0.0, 0.5, 2.0, 11.0})
    EXPECT_NEAR(expected_link_cost(y, p), bpr_cost(y, 5.0, p), 1e-12);
}

TEST(ExpectedCost, CentralFourthMoment) {
  // m = 0: b + 3 w sigma^4 / c^4
  const auto p = params(2.0, 0.5, 2.0, 1.0, 3.0);
  EXPECT_NEAR(expected_link_cost(1.0, p), 2.0 + 0.5 * 3.0 * 81.0 / 16.0, 1e-12);
}

TEST(ExpectedCost, MomentIdentity) {
  // b=0, w=1, c=1, m=1, sigma=1 -> 1 + 6 + 3 = 10
  EXPECT_NEAR(expected_link_cost(1.0, params(0, 1, 1, 0.0, 1.0)), 10.0, 1e-12);
}

TEST(ExpectedCost, MatchesMonteCarloAverage) {
  RngStream rng(123, {0});
  const auto p = params(1.2, 0.8, 2.5, -1.7, 0.9);
  const double y = 3.1;
  const double m = y - p.mu_tilde;
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.gaussian(m, p.sigma);
    const double phi = p.b + p.w * std::pow(v / p.c, 4);
    sum += phi;
    sum2 += phi * phi;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  EXPECT_NEAR(expected_link_cost(y, p), mean, 4.0 * se);
}

TEST(PolyCoeffs, PureQuarticAtObservedFlow) {
  const auto z = poly_coefficients(params(2.0, 0.6, 3.0, 0.0, 0.0)).zeta;
  EXPECT_DOUBLE_EQ(z[1], 2.0);
  EXPECT_DOUBLE_EQ(z[2], 0.0);
  EXPECT_DOUBLE_EQ(z[3], 0.0);
  EXPECT_DOUBLE_EQ(z[4], 0.0);
  EXPECT_DOUBLE_EQ(z[5], 0.6 / 81.0);
}

TEST(PolyCoeffs, CentralMoments) {
  const auto z = poly_coefficients(params(0, 1, 1, 0.0, 1.0)).zeta;
  EXPECT_DOUBLE_EQ(z[1], 3.0);
  EXPECT_DOUBLE_EQ(z[2], 0.0);
  EXPECT_DOUBLE_EQ(z[3], 6.0);
  EXPECT_DOUBLE_EQ(z[4], 0.0);
  EXPECT_DOUBLE_EQ(z[5], 1.0);
}

TEST(PolyCoeffs, ExpansionMatchesMomentForm) {
  RngStream rng(7, {1});
  for (int trial = 0; trial < 200; ++trial) {
    const double c = 0.5 + 5.0 * rng.uniform();
    const auto p = params(5.0 * rng.uniform(), 0.05 + 2.0 * rng.uniform(), c,
                          (2.0 * rng.uniform() - 1.0) * 2.0 * c,
                          rng.uniform() * c);
    const PolyCoeffs poly = poly_coefficients(p);
    for (int i = 0; i < 100; ++i) {
      const double y = 10.0 * c * rng.uniform();
      const double direct = y * expected_link_cost(y, p);
      EXPECT_NEAR(poly.eval(y), direct, 1e-9 * (1.0 + std::abs(direct)));
    }
  }
}

TEST(ObjectiveDerivative, AtZeroEqualsZeta1) {
  const auto p = params(1.5, 0.4, 2.0, -0.7, 0.3);
  EXPECT_DOUBLE_EQ(objective_derivative(0.0, p), poly_coefficients(p).zeta[1]);
}

TEST(ObjectiveDerivative, PureQuintic) {
  // mu_tilde = sigma = b = 0, w = c = 1: d/dy y^5 at y = 1 is 5
  EXPECT_DOUBLE_EQ(objective_derivative(1.0, params(0, 1, 1, 0, 0)), 5.0);
}

TEST(ObjectiveDerivative, MatchesFiniteDifferences) {
  RngStream rng(11, {2});
  for (int trial = 0; trial < 200; ++trial) {
    const double c = 0.5 + 4.0 * rng.uniform();
    const auto p = params(5.0 * rng.uniform(), 0.05 + 2.0 * rng.uniform(), c,
                          -2.0 * c * rng.uniform(), rng.uniform() * c);
    const double y = 3.0 * c * rng.uniform();
    const double h = 1e-5 * std::max(1.0, y);
    const double fd = (poly_coefficients(p).eval(y + h) -
                       poly_coefficients(p).eval(y - h)) /
                      (2.0 * h);
    const double exact = objective_derivative(y, p);
    EXPECT_NEAR(exact, fd, 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST(CostKernel, ConvexWhenMuTildeNonPositive) {
  RngStream rng(13, {3});
  for (int trial = 0; trial < 200; ++trial) {
    const double c = 0.5 + 4.0 * rng.uniform();
    const auto p = params(5.0 * rng.uniform(), 0.05 + 2.0 * rng.uniform(), c,
                          -3.0 * c * rng.uniform(), rng.uniform() * c);
    const PolyCoeffs poly = poly_coefficients(p);
    EXPECT_TRUE(convex_on_range(poly, 10.0 * c));
    // second finite differences on a grid
    const double h = 1e-3 * c;
    for (int i = 1; i < 16; ++i) {
      const double y = 10.0 * c * i / 16.0;
      const double dd = (poly.eval(y + h) - 2.0 * poly.eval(y) + poly.eval(y - h)) / (h * h);
      EXPECT_GE(dd, -1e-8 * std::max(1.0, std::abs(dd)));
    }
  }
}

TEST(CostKernel, NonConvexWithPositiveMuTilde) {
  // y (y - 1)^4 has negative curvature near 0
  EXPECT_FALSE(convex_on_range(poly_coefficients(params(0, 1, 1, 1.0, 0)), 1.0));
}

TEST(CostKernel, PsiNeverBelowNominalCost) {
  RngStream rng(17, {4});
  for (int trial = 0; trial < 500; ++trial) {
    const double c = 0.5 + 4.0 * rng.uniform();
    const auto p = params(5.0 * rng.uniform(), 0.05 + 2.0 * rng.uniform(), c,
                          (2.0 * rng.uniform() - 1.0) * 3.0 * c, rng.uniform() * c);
    EXPECT_GE(expected_link_cost(10.0 * c * rng.uniform(), p), p.b);
  }
}
