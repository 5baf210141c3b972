#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "skewlab/errors.hpp"
#include "skewlab/foliations.hpp"
#include "skewlab/rng.hpp"

using namespace skewlab;
using oracle::hp;

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

hp phi_hp(const RotationExtension& F, const hp& x, const hp& y) {
  const BumpFunction& b = *F.bump();
  return oracle::bump<hp>(x, y, b.center().x, b.center().y, b.radius(), b.amplitude(), b.direction().x(),
                          b.direction().y());
}

// Exact eigenvectors of (3,1;1,1) in 50 digits.
std::array<hp, 2> v_s_hp() {
  const hp s2 = sqrt(hp(2));
  const hp n = sqrt(hp(1) + (hp(1) + s2) * (hp(1) + s2));
  return {hp(1) / n, -(hp(1) + s2) / n};
}
std::array<hp, 2> v_u_hp() {
  const hp s2 = sqrt(hp(2));
  const hp n = sqrt(hp(1) + (s2 - 1) * (s2 - 1));
  return {hp(1) / n, (s2 - 1) / n};
}

void step_hp(hp& x, hp& y) {
  const hp nx = oracle::frac(3 * x + y), ny = oracle::frac(x + y);
  x = nx;
  y = ny;
}

}  // namespace

TEST(StableLeaf, OffsetMatchesFiftyDigitSeries) {
  const RotationExtension F = reference_map();
  const auto vs = v_s_hp();
  auto g = stream_rng(51, 0);
  for (int i = 0; i < 20; ++i) {
    const FiberedPoint x = F.random_point(g);
    const double t = 0.45 * (2 * uniform01(g) - 1);
    const StableLeafChart chart(F, x, 60);
    hp ax = x.base.x, ay = x.base.y, bx = ax + t * vs[0], by = ay + t * vs[1], sum = 0;
    for (int k = 0; k < 60; ++k) {
      sum += phi_hp(F, ax, ay) - phi_hp(F, bx, by);
      step_hp(ax, ay);
      step_hp(bx, by);
    }
    EXPECT_NEAR(chart.offset(0.0, t), sum.convert_to<double>(), 1e-12);
    EXPECT_LE(chart.tail_bound(0.0, t), 1e-12);
  }
}

// Fiber and base distances of stable-leaf pairs shrink at rate a_s.
TEST(StableLeaf, ContractionRate) {
  const RotationExtension F = reference_map();
  const auto vs = v_s_hp();
  const FiberedPoint x{{0.11, 0.37}, 0.2};
  const double t = 0.3;
  const StableLeafChart chart(F, x, 60);
  hp ax = x.base.x, ay = x.base.y, at = x.theta;
  hp bx = ax + t * vs[0], by = ay + t * vs[1], bt = at + chart.offset(0.0, t);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int n = 1; n <= 40; ++n) {
    at += phi_hp(F, ax, ay);
    bt += phi_hp(F, bx, by);
    step_hp(ax, ay);
    step_hp(bx, by);
    auto circ = [](const hp& a, const hp& b) {
      hp d = oracle::frac(a - b);
      return d > 0.5 ? hp(1) - d : d;
    };
    const hp d = std::max({circ(ax, bx), circ(ay, by), circ(at, bt)});
    const double ld = log(d).convert_to<double>();
    sx += n;
    sy += ld;
    sxx += double(n) * n;
    sxy += n * ld;
  }
  const double slope = (40 * sxy - sx * sy) / (40 * sxx - sx * sx);
  EXPECT_NEAR(slope / std::log(*F.a_s()), 1.0, 0.05);
}

TEST(StableLeaf, InvarianceAndAdditivity) {
  const RotationExtension F = reference_map();
  auto g = stream_rng(52, 0);
  for (int i = 0; i < 50; ++i) {
    const FiberedPoint x = F.random_point(g);
    const double t = 0.4 * (2 * uniform01(g) - 1);
    const StableLeafChart cx(F, x, 61), cfx(F, F.apply(x), 60);
    const FiberedPoint image = F.apply(cx.at(t));
    EXPECT_LT(fibered_distance(image, cfx.at(*F.a_s() * t)), 1e-9);
    EXPECT_NEAR(cx.offset(-0.2, 0.1) + cx.offset(0.1, t), cx.offset(-0.2, t), 1e-13);
    EXPECT_EQ(cx.offset(t, t), 0.0);
  }
}

TEST(UnstableLeaf, OffsetMatchesFiftyDigitSeries) {
  const RotationExtension F = reference_map();
  const auto vu = v_u_hp();
  const hp au = 2 + sqrt(hp(2));
  auto g = stream_rng(53, 0);
  for (int i = 0; i < 20; ++i) {
    const FiberedPoint x = F.random_point(g);
    const Preorbit pre = sample_preorbit(F, x, 60, UniformRandomPolicy{static_cast<std::uint64_t>(i)});
    const double t = 0.45 * (2 * uniform01(g) - 1);
    const UnstableLeafChart chart(F, pre, 60);
    hp sum = 0, scale = 1;
    for (int k = 1; k <= 60; ++k) {
      scale /= au;
      const hp px = pre.at(k).base.x, py = pre.at(k).base.y;
      sum += phi_hp(F, px + t * scale * vu[0], py + t * scale * vu[1]) - phi_hp(F, px, py);
    }
    EXPECT_NEAR(chart.offset(0.0, t), sum.convert_to<double>(), 1e-12);
    const OffsetResult r = unstable_fiber_offset(F, pre, chart.base_at(t));
    EXPECT_NEAR(r.value, chart.offset(0.0, t), 1e-12);
  }
}

TEST(UnstableLeaf, Invariance) {
  const RotationExtension F = reference_map();
  auto g = stream_rng(54, 0);
  for (int i = 0; i < 50; ++i) {
    const FiberedPoint x = F.random_point(g);
    const Preorbit pre = sample_preorbit(F, x, 61, UniformRandomPolicy{static_cast<std::uint64_t>(i)});
    const UnstableLeafChart c(F, pre, 60);
    // leaf of F(x) along the preorbit extended by x
    Preorbit next;
    next.anchor = F.apply(x);
    const auto cands = F.preimages(next.anchor);
    for (std::size_t j = 0; j < cands.size(); ++j) {
      if (fibered_distance(cands[j], x) < 1e-12) next.branches.push_back(static_cast<int>(j));
    }
    next.points.push_back(x);
    next.branches.insert(next.branches.end(), pre.branches.begin(), pre.branches.end() - 1);
    next.points.insert(next.points.end(), pre.points.begin(), pre.points.end() - 1);
    const UnstableLeafChart cn(F, next, 61);
    const double t = 0.12 * (2 * uniform01(g) - 1);
    EXPECT_LT(fibered_distance(F.apply(c.at(t)), cn.at(F.a_u() * t)), 1e-9);
    const Preorbit along = c.preorbit_at(t);
    EXPECT_LT(preorbit_residual(F, along), 1e-12);
  }
}

TEST(LeafCharts, Errors) {
  const RotationExtension F = reference_map();
  const FiberedPoint x{{0.2, 0.3}, 0.0};
  const StableLeafChart c(F, x);
  EXPECT_THROW(c.offset(0.0, 0.5), LegTooLong);
  EXPECT_THROW(stable_fiber_offset(F, x, translate(x.base, 0.1 * F.v_u())), std::invalid_argument);
  EXPECT_THROW(stable_fiber_offset(F, x, translate(x.base, 0.49 * F.v_s() + 0.02 * F.v_s())), LegTooLong);
  const OffsetResult r = stable_fiber_offset(F, x, translate(x.base, 0.2 * F.v_s()));
  EXPECT_NEAR(r.value, c.offset(0.0, 0.2), 1e-15);
  const RotationExtension D = RotationExtension::product(ExpandingCircleMap(2));
  EXPECT_THROW(StableLeafChart(D, x), std::invalid_argument);
  EXPECT_THROW(leaf_density_radius(D, x, 10, 5), std::invalid_argument);
}

TEST(Holonomy, ProductMapIsIntegrable) {
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) {
      QuadrilateralSpec q;
      q.corner = {{0.3, 0.6}, 0.1};
      q.t = 0.04 * i;
      q.s = 0.04 * j;
      EXPECT_LT(std::abs(quadrilateral_holonomy(product_map(), q)), 1e-12);
    }
  }
}

TEST(Holonomy, ReferenceMapIsNotIntegrable) {
  const RotationExtension F = reference_map(0.15, 0.05);
  std::vector<std::pair<double, double>> scales;
  for (int i = 1; i <= 10; ++i) {
    for (int j = 1; j <= 10; ++j) scales.emplace_back(0.04 * i, 0.04 * j);
  }
  EXPECT_GT(integrability_defect(F, {{0, 0}, 0}, scales), 1e-6);
}

TEST(Holonomy, OrientationAndBisection) {
  const RotationExtension F = reference_map();
  QuadrilateralSpec q;
  q.corner = {{0.0, 0.0}, 0.4};
  q.t = 0.3;
  q.s = 0.25;
  const double h = quadrilateral_holonomy(F, q);
  q.reversed = true;
  EXPECT_EQ(quadrilateral_holonomy(F, q), -h);
  const HolonomyChart chart(F, q.corner, default_u_policy(F, q.corner));
  EXPECT_EQ(chart.holonomy(0, 0, 0.3, 0.25), h);
  EXPECT_NEAR(chart.holonomy(0, 0, 0.15, 0.25) + chart.holonomy(0.15, 0, 0.15, 0.25), h, 1e-10);
  EXPECT_NEAR(chart.holonomy(0, 0, 0.3, 0.1) + chart.holonomy(0, 0.1, 0.3, 0.15), h, 1e-10);
}

// The chart legs agree with the public leaf offsets evaluated from scratch.
TEST(Holonomy, LegsAgreeWithFiberOffsets) {
  const RotationExtension F = reference_map();
  const FiberedPoint corner{{0.05, 0.02}, 0.0};
  const PreorbitPolicy policy = default_u_policy(F, corner);
  const HolonomyChart chart(F, corner, policy);
  const double t = 0.2, s = 0.15;
  const Preorbit pre = sample_preorbit(F, corner, kLeafDepth, policy);
  const double u = unstable_fiber_offset(F, pre, chart.point(t, 0)).value;
  EXPECT_NEAR(chart.u_leg(0.0, 0.0, t), u, 1e-14);
  const FiberedPoint c1{chart.point(t, 0), corner.theta};
  EXPECT_NEAR(chart.s_leg(t, 0.0, s), stable_fiber_offset(F, c1, chart.point(t, s)).value, 1e-14);
}

TEST(SuPath, ReachesTargetsForReferenceMap) {
  const RotationExtension F = reference_map();
  auto g = stream_rng(55, 0);
  for (int i = 0; i < 5; ++i) {
    const FiberedPoint from = F.random_point(g), to = F.random_point(g);
    const SuPath path = build_su_path(F, from, to, 1e-4);
    EXPECT_LT(path.fiber_error, 1e-4);
    EXPECT_LT(torus_distance(path.endpoint().base, to.base), 1e-12);
    EXPECT_LT(circle_distance(path.endpoint().theta, to.theta), 1e-4);
    EXPECT_LT(verify_su_path(F, path), 1e-9);
    for (const SuLeg& leg : path.legs) EXPECT_LT(std::abs(leg.t_end - leg.t_start), 0.5);
  }
  const SuPath trivial = build_su_path(F, {{0.1, 0.1}, 0.1}, {{0.1, 0.1}, 0.1}, 1e-4);
  EXPECT_TRUE(trivial.empty());
}

TEST(SuPath, ProductMapIsNotAccessible) {
  const FiberedPoint from{{0.2, 0.2}, 0.1};
  try {
    build_su_path(product_map(), from, {{0.7, 0.4}, 0.35}, 1e-4);
    FAIL() << "expected NotAccessibleNumerically";
  } catch (const NotAccessibleNumerically& e) {
    EXPECT_NEAR(e.achieved_error(), 0.25, 1e-12);
  }
  // the fiber is preserved, so reaching a point on the same level works
  const SuPath level = build_su_path(product_map(), from, {{0.7, 0.4}, 0.1}, 1e-4);
  EXPECT_LT(level.fiber_error, 1e-12);
}

TEST(LeafDensity, ContrastAndMonotonicity) {
  const RotationExtension F = reference_map();
  const FiberedPoint x{{0.1, 0.2}, 0.3};
  const double r1 = leaf_density_radius(F, x, 500, 8);
  const double r2 = leaf_density_radius(F, x, 2000, 8);
  EXPECT_LE(r2, r1);
  EXPECT_LT(r2, 0.1);
  // the product leaf stays on one fiber level
  EXPECT_GE(leaf_density_radius(product_map(), x, 2000, 8), 0.2);
}

TEST(Holonomy, CsvLayouts) {
  std::ostringstream h;
  write_holonomy_csv(h, {{0.1, 0.2, 0.3}});
  EXPECT_EQ(h.str(), "t,s,dtheta\n0.10000000000000001,0.20000000000000001,0.29999999999999999\n");
}
