#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "skewlab/ergodic.hpp"
#include "skewlab/errors.hpp"
#include "skewlab/foliations.hpp"

using namespace skewlab;

namespace {

RotationExtension reference_map(double r = 0.3, double eps = 2.0) {
  BumpParams p;
  p.radius = r;
  p.amplitude = eps;
  return RotationExtension::paper_example(p);
}

const RotationExtension& product_map() {
  static const RotationExtension P = RotationExtension::product(LinearToralEndomorphism({3, 1, 1, 1}));
  return P;
}

double sample_std(std::vector<double> v) {
  double m = 0;
  for (double x : v) m += x;
  m /= v.size();
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1));
}

// A map with the interface of a rotation extension whose volume is not
// preserved: preimage weights sum to `scale`.
struct ScaledMap {
  RotationExtension F;
  double scale;
  std::vector<FiberedPoint> preimages(const FiberedPoint& p) const { return F.preimages(p); }
  double jacobian_determinant(const FiberedPoint& p) const { return F.jacobian_determinant(p) / scale; }
  FiberedPoint random_point(std::mt19937_64& g) const { return F.random_point(g); }
};

}  // namespace

TEST(Observables, Catalog) {
  for (Observable o : {Observable::one, Observable::cos_theta, Observable::sin_theta, Observable::cos_x,
                       Observable::cos_x_plus_theta}) {
    EXPECT_EQ(parse_observable(observable_name(o)), o);
    // space average by a midpoint rule on a grid
    double s = 0;
    const int n = 64;
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < n; ++k) s += evaluate(o, {{(i + 0.5) / n, 0.3}, (k + 0.5) / n});
    }
    EXPECT_NEAR(s / (n * n), space_average(o), 1e-12);
  }
  EXPECT_THROW(parse_observable("cos_y"), std::invalid_argument);
}

TEST(Birkhoff, ConstantAndBounds) {
  const RotationExtension F = reference_map();
  EXPECT_EQ(birkhoff_average(F, Observable::one, {{0.1, 0.2}, 0.3}, 1000), 1.0);
  const double a = birkhoff_average(F, Observable::cos_theta, {{0.1, 0.2}, 0.3}, 10000, 4);
  EXPECT_LE(std::abs(a), 1.0);
  EXPECT_EQ(a, birkhoff_average(F, Observable::cos_theta, {{0.1, 0.2}, 0.3}, 10000, 4));
}

TEST(Birkhoff, ProductMapFreezesTheFiber) {
  const double theta = 0.3;
  const double a = birkhoff_average(product_map(), Observable::cos_theta, {{0.1, 0.2}, theta}, 5000, 1);
  EXPECT_NEAR(a, std::cos(2 * std::numbers::pi * theta), 1e-12);
}

TEST(Birkhoff, DispersionContrast) {
  const BirkhoffReport mixed = birkhoff_dispersion(reference_map(), Observable::cos_theta, 20, 100000, 3);
  const BirkhoffReport frozen = birkhoff_dispersion(product_map(), Observable::cos_theta, 20, 1000, 3);
  EXPECT_LT(mixed.dispersion, 0.05);
  EXPECT_GT(frozen.dispersion, 0.5);
  // relabeling starts leaves the dispersion unchanged
  std::vector<double> v = mixed.averages;
  std::reverse(v.begin(), v.end());
  EXPECT_NEAR(sample_std(v), mixed.dispersion, 1e-15);
  for (double x : mixed.averages) EXPECT_LE(std::abs(x), 1.0);
  EXPECT_EQ(mixed.starts.size(), 20u);
}

TEST(Transitivity, MonotoneAndContrast) {
  const RotationExtension F = reference_map();
  const FiberedPoint c{{0.5, 0.5}, 0.5};
  const TransitivityReport small = box_transitivity(F, c, 0.05, 10, 2000, 50, 9);
  const TransitivityReport large = box_transitivity(F, c, 0.05, 10, 2000, 200, 9);
  for (std::size_t i = 1; i < small.checkpoints.size(); ++i) {
    EXPECT_GE(small.checkpoints[i].second, small.checkpoints[i - 1].second);
    EXPECT_GT(small.checkpoints[i].first, small.checkpoints[i - 1].first);
  }
  EXPECT_EQ(small.checkpoints.back().first, 2000);
  EXPECT_GE(large.fraction, small.fraction);
  EXPECT_GT(large.fraction, 0.9);
  // product: the cloud never leaves the fiber slab [0.45, 0.55]
  const TransitivityReport slab = box_transitivity(product_map(), c, 0.05, 20, 2000, 200, 9);
  EXPECT_LE(slab.fraction, 3.0 / 20.0);
}

TEST(Transitivity, DoesNotDependOnThreadCount) {
  const RotationExtension F = reference_map();
  const FiberedPoint c{{0.2, 0.5}, 0.1};
  setenv("SKEWLAB_THREADS", "1", 1);
  const TransitivityReport a = box_transitivity(F, c, 0.05, 8, 300, 64, 5);
  setenv("SKEWLAB_THREADS", "4", 1);
  const TransitivityReport b = box_transitivity(F, c, 0.05, 8, 300, 64, 5);
  unsetenv("SKEWLAB_THREADS");
  EXPECT_EQ(a.checkpoints, b.checkpoints);
}

TEST(Srb, DeltaUProperties) {
  const RotationExtension F = reference_map();
  const FiberedPoint x{{0.0, 0.0}, 0.0};
  const Preorbit pre = sample_preorbit(F, x, 60, default_u_policy(F, x));
  EXPECT_EQ(srb_delta_u(F, pre, pre, 60).value, 1.0);
  const UnstableLeafChart chart(F, pre, 60);
  const Preorbit y = shadow_preorbit(F, pre, {chart.base_at(0.1), 0.0});
  const Preorbit z = shadow_preorbit(F, pre, {chart.base_at(-0.2), 0.0});
  const DeltaU xy = srb_delta_u(F, pre, y, 60), yz = srb_delta_u(F, y, z, 60), xz = srb_delta_u(F, pre, z, 60);
  EXPECT_GT(xy.value, 0.0);
  EXPECT_NEAR(xy.log_value + yz.log_value, xz.log_value, 1e-8);
  EXPECT_NE(xy.value, 1.0);
  EXPECT_LT(xy.log_tail_bound, 1e-12);
  const Preorbit pp = sample_preorbit(product_map(), x, 60, UniformRandomPolicy{1});
  const Preorbit py = shadow_preorbit(product_map(), pp, {{0.1, 0.1}, 0.0});
  EXPECT_EQ(srb_delta_u(product_map(), pp, py, 60).value, 1.0);
}

TEST(Srb, DensityNormalizationAndContrast) {
  const RotationExtension F = reference_map();
  const FiberedPoint x{{0.0, 0.0}, 0.0};
  const SrbLeafDensity d = srb_density(F, sample_preorbit(F, x, 60, default_u_policy(F, x)), 0.3, 201);
  EXPECT_NEAR(d.integral, 1.0, 1e-8);
  EXPECT_GT(d.deviation, 1e-4);
  for (double r : d.rho) EXPECT_GT(r, 0.0);
  const SrbLeafDensity u =
      srb_density(product_map(), sample_preorbit(product_map(), x, 60, UniformRandomPolicy{2}), 0.3, 51);
  EXPECT_EQ(u.deviation, 0.0);
  EXPECT_NEAR(u.normalization, 0.6, 1e-15);
  EXPECT_THROW(srb_density(F, sample_preorbit(F, x, 60, UniformRandomPolicy{2}), 0.5, 11), LegTooLong);
}

TEST(Volume, Certificates) {
  const VolumeCertificate a = volume_preservation_certificate(reference_map(), 2000, 1);
  EXPECT_TRUE(a.pass);
  EXPECT_LT(a.max_deviation, 1e-12);
  BumpParams b;
  b.radius = 0.2;
  const RotationExtension D(ExpandingCircleMap(2), make_bump(b, Eigen::Vector2d(1, 0)));
  EXPECT_TRUE(volume_preservation_certificate(D, 2000, 1).pass);
  const VolumeCertificate bad = volume_preservation_certificate(ScaledMap{reference_map(), 1.01}, 100, 1);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.max_deviation, 0.01, 1e-12);
}

TEST(Ergodic, CsvHeaders) {
  BirkhoffReport r;
  TransitivityReport t;
  SrbLeafDensity d;
  std::ostringstream a, b, c;
  write_birkhoff_csv(a, r);
  write_transitivity_csv(b, t);
  write_srb_csv(c, d);
  EXPECT_EQ(a.str(), "start_x,start_y,start_theta,N,average\n");
  EXPECT_EQ(b.str(), "N,fraction\n");
  EXPECT_EQ(c.str(), "t,delta_u,rho\n");
}
