#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "skewlab/bundles.hpp"
#include "skewlab/errors.hpp"
#include "skewlab/rng.hpp"

using namespace skewlab;

namespace {

RotationExtension reference_map(double r = 0.3, double eps = 2.0) {
  BumpParams p;
  p.radius = r;
  p.amplitude = eps;
  return RotationExtension::paper_example(p);
}

TangentVector tv(double a, double b, double c) {
  TangentVector v(3);
  v << a, b, c;
  return v;
}

}  // namespace

TEST(Angle, AccurateForNearlyParallelLines) {
  EXPECT_NEAR(angle_between(tv(1, 0, 0), tv(1, 1e-12, 0)), 1e-12, 1e-24);
  EXPECT_NEAR(angle_between(tv(1, 0, 0), tv(-1, 1e-9, 0)), 1e-9, 1e-21);
  EXPECT_NEAR(angle_between(tv(1, 0, 0), tv(0, 0, 3)), std::numbers::pi / 2, 1e-15);
  EXPECT_EQ(angle_between(tv(0, 2, 0), tv(0, -5, 0)), 0.0);
  EXPECT_THROW(Direction(tv(0, 0, 0)), DegenerateSeed);
}

// At the fixed point O the bundles are eigenvectors of dF(O).
TEST(Bundles, FixedPointAgreesWithDenseEigenvectors) {
  for (double eps : {0.05, 2.0, -0.7}) {
    const RotationExtension F = reference_map(0.3, eps);
    const FiberedPoint O{{0.0, 0.0}, 0.25};
    const Eigen::MatrixXd D = F.derivative(O);
    const Preorbit constant = sample_preorbit(F, O, 60, FixedItineraryPolicy{{0}});
    const DirectionEstimate u = estimate_unstable_direction(F, constant, 60);
    const DirectionEstimate s = estimate_stable_direction(F, O, 30);
    const DirectionEstimate c = estimate_center_direction(F, O, constant, 30);
    EXPECT_LT(oracle::line_angle(u.direction.vector(), oracle::eigenvector_near(D, F.a_u())), 1e-12);
    EXPECT_LT(oracle::line_angle(s.direction.vector(), oracle::eigenvector_near(D, *F.a_s())), 1e-12);
    EXPECT_LT(oracle::line_angle(c.direction.vector(), oracle::eigenvector_near(D, 1.0)), 1e-12);
    // closed form of the unstable fiber slope: eps / (a_u - 1)
    const TangentVector& w = u.direction.vector();
    EXPECT_NEAR(w(2) / w.head<2>().dot(F.v_u()), eps / (F.a_u() - 1.0), 1e-12);
  }
}

TEST(Bundles, CenterIsVertical) {
  const RotationExtension F = reference_map();
  auto g = stream_rng(41, 0);
  for (int i = 0; i < 20; ++i) {
    const FiberedPoint x = F.random_point(g);
    const Preorbit pre = sample_preorbit(F, x, 60, UniformRandomPolicy{static_cast<std::uint64_t>(i)});
    const DirectionEstimate c = estimate_center_direction(F, x, pre, 60);
    EXPECT_LT(angle_between(c.direction.vector(), tv(0, 0, 1)), 1e-12);
  }
}

TEST(Bundles, SplittingIsInvariantAndGrowsAtBaseRates) {
  const RotationExtension F = reference_map();
  auto g = stream_rng(42, 0);
  for (int i = 0; i < 30; ++i) {
    const FiberedPoint x = F.random_point(g);
    const Preorbit pre = sample_preorbit(F, x, 60, UniformRandomPolicy{static_cast<std::uint64_t>(i)});
    const SplittingEstimate s = estimate_splitting(F, pre, 60);
    EXPECT_LT(s.residual_u, 1e-8);
    EXPECT_LT(s.residual_c, 1e-8);
    EXPECT_LT(*s.residual_s, 1e-8);
    // forward iterates of e_s shrink like a_s^n, up to a bounded factor
    TangentVector w = s.e_s->vector();
    FiberedPoint p = x;
    for (int n = 1; n <= 20; ++n) {
      w = F.derivative(p) * w;
      p = F.apply(p);
    }
    const double rate = std::log(w.norm()) / 20.0;
    EXPECT_NEAR(rate, std::log(*F.a_s()), 0.1);
    // base component of e_u is along v_u
    const TangentVector& u = s.e_u.vector();
    EXPECT_NEAR(std::abs(u.head<2>().normalized().dot(F.v_u())), 1.0, 1e-12);
  }
}

TEST(Bundles, StableDirectionNeedsTorus) {
  const RotationExtension D = RotationExtension::product(ExpandingCircleMap(2));
  EXPECT_THROW(estimate_stable_direction(D, {{0.1, 0}, 0}, 10), std::invalid_argument);
  const Preorbit pre = sample_preorbit(D, {{0.1, 0}, 0}, 30, UniformRandomPolicy{1});
  const SplittingEstimate s = estimate_splitting(D, pre, 30);
  EXPECT_FALSE(s.e_s.has_value());
  EXPECT_LT(s.residual_u, 1e-8);
}

TEST(Bundles, SpreadMatchesSlopeSeries) {
  for (double eps : {0.05, 2.0}) {
    const RotationExtension F = reference_map(0.3, eps);
    const FiberedPoint O{{0, 0}, 0};
    const std::vector<Preorbit> pre = {sample_preorbit(F, O, 60, FixedItineraryPolicy{{0}}),
                                       sample_preorbit(F, O, 60, stay_outside_support(F))};
    const double s1 = eps / (1.0 + std::numbers::sqrt2);
    const double s2 = eps / (2.0 + std::numbers::sqrt2);
    EXPECT_NEAR(unstable_direction_spread(F, pre, 60), std::atan(s1) - std::atan(s2), 1e-12);
  }
  const RotationExtension P = RotationExtension::product(LinearToralEndomorphism({3, 1, 1, 1}));
  const FiberedPoint O{{0, 0}, 0};
  const std::vector<Preorbit> pre = {sample_preorbit(P, O, 60, FixedItineraryPolicy{{0}}),
                                     sample_preorbit(P, O, 60, UniformRandomPolicy{5})};
  EXPECT_LT(unstable_direction_spread(P, pre, 60), 1e-10);
}

TEST(Bundles, SpreadRejectsDifferentAnchors) {
  const RotationExtension F = reference_map();
  const std::vector<Preorbit> pre = {sample_preorbit(F, {{0, 0}, 0}, 10, FixedItineraryPolicy{}),
                                     sample_preorbit(F, {{0.1, 0}, 0}, 10, FixedItineraryPolicy{})};
  EXPECT_THROW(unstable_direction_spread(F, pre, 10), std::invalid_argument);
}

TEST(Lyapunov, TriangularCocycleTargets) {
  for (const RotationExtension& F :
       {reference_map(), reference_map(0.15, 0.05),
        RotationExtension::product(LinearToralEndomorphism({3, 1, 1, 1}))}) {
    const LyapunovTriple l = lyapunov_exponents(F, {{0.1, 0.2}, 0.3}, 100000, 7);
    EXPECT_NEAR(l.unstable, std::log(2.0 + std::numbers::sqrt2), 1e-3);
    EXPECT_NEAR(*l.stable, std::log(2.0 - std::numbers::sqrt2), 1e-3);
    EXPECT_NEAR(l.center, 0.0, 1e-7);
    EXPECT_NEAR(l.sum(), std::log(2.0), 1e-6);
    EXPECT_EQ(l.iterations, 100000);
  }
  EXPECT_THROW(lyapunov_exponents(reference_map(), {{0, 0}, 0}, 999, 1), std::invalid_argument);
}

TEST(Lyapunov, CircleBase) {
  BumpParams b;
  b.radius = 0.2;
  b.amplitude = 2.0;
  const RotationExtension D(ExpandingCircleMap(3), make_bump(b, Eigen::Vector2d(1, 0)));
  const LyapunovTriple l = lyapunov_exponents(D, {{0.1, 0}, 0.3}, 50000, 7);
  EXPECT_FALSE(l.stable.has_value());
  EXPECT_NEAR(l.unstable, std::log(3.0), 1e-6);
  EXPECT_NEAR(l.center, 0.0, 1e-7);
}

TEST(Lyapunov, Deterministic) {
  const RotationExtension F = reference_map();
  const LyapunovTriple a = lyapunov_exponents(F, {{0.1, 0.2}, 0.3}, 5000, 3);
  const LyapunovTriple b = lyapunov_exponents(F, {{0.1, 0.2}, 0.3}, 5000, 3);
  EXPECT_EQ(a.unstable, b.unstable);
  EXPECT_EQ(a.center, b.center);
  EXPECT_EQ(*a.stable, *b.stable);
}

TEST(MonteCarlo, BatchMean) {
  const MonteCarloEstimate c = batch_mean(std::vector<double>(100, 2.5));
  EXPECT_EQ(c.mean, 2.5);
  EXPECT_EQ(c.standard_error, 0.0);
  EXPECT_EQ(c.samples, 100);
  std::vector<double> v;
  for (int i = 0; i < 10; ++i) v.push_back(i);
  const MonteCarloEstimate e = batch_mean(v);
  EXPECT_DOUBLE_EQ(e.mean, 4.5);
  EXPECT_NEAR(e.standard_error, std::sqrt(55.0 / 6.0) / std::sqrt(10.0), 1e-12);
}

TEST(MonteCarlo, CenterExponentAndEntropy) {
  const RotationExtension F = reference_map();
  const MonteCarloEstimate c = mean_center_exponent(F, 40, 2000, 11);
  EXPECT_NEAR(c.mean, 0.0, 2e-3);
  const MonteCarloEstimate h = pesin_entropy_estimate(F, 10, 20000);
  EXPECT_NEAR(h.mean, std::log(2.0 + std::numbers::sqrt2), 2e-3);
}

TEST(Rates, CertifyPartialHyperbolicity) {
  const RateEstimates r = estimate_rates(reference_map(), 4, 100, 5);
  ASSERT_TRUE(r.nu.has_value());
  EXPECT_TRUE(r.certifies_partial_hyperbolicity());
  EXPECT_NEAR(*r.nu, 2.0 - std::numbers::sqrt2, 0.01);
  EXPECT_NEAR(r.mu, 2.0 + std::numbers::sqrt2, 0.01);
  EXPECT_NEAR(r.gamma1, 1.0, 1e-9);
  EXPECT_NEAR(r.gamma2, 1.0, 1e-9);
  EXPECT_GE(r.C, 1.0);

  RateEstimates bad = r;
  bad.mu = 0.9;
  EXPECT_FALSE(bad.certifies_partial_hyperbolicity());
}

TEST(Bundles, CsvHeaders) {
  const RotationExtension F = reference_map();
  std::ostringstream a;
  write_lyapunov_csv(a, {{FiberedPoint{{0.1, 0.2}, 0.3}, lyapunov_exponents(F, {{0.1, 0.2}, 0.3}, 1000, 1)}});
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "start_x,start_y,start_theta,N,lambda_s,lambda_c,lambda_u,se_s,se_c,se_u,sum");
}
