#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "skewlab/orbit_space.hpp"
#include "skewlab/skew_product.hpp"

namespace skewlab {

// The foliation tools below need a stable direction and therefore a torus
// base; circle bases raise std::invalid_argument.

inline constexpr int kLeafDepth = 60;

struct OffsetResult {
  double value = 0.0;
  double tail_bound = 0.0;
};

// Stable leaf through `anchor`: base anchor.base + t v_s, fiber anchor.theta
// plus sum_k phi(f^k x) - phi(f^k x + t a_s^k v_s).
class StableLeafChart {
 public:
  StableLeafChart(const RotationExtension& F, const FiberedPoint& anchor, int depth = kLeafDepth);

  const FiberedPoint& anchor() const { return anchor_; }
  int depth() const { return depth_; }
  TorusPoint2 base_at(double t) const;
  // Fiber change from parameter t0 to t1.
  double offset(double t0, double t1) const;
  FiberedPoint at(double t) const;
  double tail_bound(double t0, double t1) const;

 private:
  const RotationExtension* F_;
  FiberedPoint anchor_;
  int depth_;
  std::vector<TorusPoint2> orbit_;
  std::vector<double> scale_;
};

// Unstable leaf of a preorbit: base anchor.base + t v_u, fiber anchor.theta
// plus sum_{k>=1} phi(x_{-k} + t a_u^{-k} v_u) - phi(x_{-k}).
class UnstableLeafChart {
 public:
  UnstableLeafChart(const RotationExtension& F, Preorbit anchor, int depth = kLeafDepth);

  const Preorbit& preorbit() const { return pre_; }
  const FiberedPoint& anchor() const { return pre_.anchor; }
  int depth() const { return depth_; }
  TorusPoint2 base_at(double t) const;
  double offset(double t0, double t1) const;
  FiberedPoint at(double t) const;
  // Preorbit of the chart point at t along this leaf.
  Preorbit preorbit_at(double t) const;
  double tail_bound(double t0, double t1) const;

 private:
  const RotationExtension* F_;
  Preorbit pre_;
  int depth_;
  std::vector<double> scale_;
};

// x_base' must lie on the stable line of x.base; |t| >= 0.5 raises LegTooLong.
OffsetResult stable_fiber_offset(const RotationExtension& F, const FiberedPoint& x,
                                 const TorusPoint2& x_base_prime, int depth = kLeafDepth);

// Sum over the shadowed preorbit of x_base'; depth <= pre.depth().
OffsetResult unstable_fiber_offset(const RotationExtension& F, const Preorbit& pre,
                                   const TorusPoint2& x_base_prime, int depth = kLeafDepth);

// Chart (tau, sigma) -> corner + tau v_u + sigma v_s. The u-line at height
// sigma uses the policy preorbit of chart point (0, sigma); the s-line at tau
// uses the forward orbit of chart point (tau, 0). Lines are cached, so loops
// that share an edge use identical leaf data. Not thread-safe.
class HolonomyChart {
 public:
  HolonomyChart(const RotationExtension& F, const FiberedPoint& corner, PreorbitPolicy u_policy,
                int depth = kLeafDepth);

  const FiberedPoint& corner() const { return corner_; }
  TorusPoint2 point(double tau, double sigma) const;
  const UnstableLeafChart& u_line(double sigma) const;
  const StableLeafChart& s_line(double tau) const;

  double u_leg(double sigma, double tau_from, double tau_to) const;
  double s_leg(double tau, double sigma_from, double sigma_to) const;

  // Loop (tau0,sigma0) -> (tau0+t,sigma0) -> (tau0+t,sigma0+s) -> (tau0,sigma0+s) -> back.
  double holonomy(double tau0, double sigma0, double t, double s) const;

 private:
  const RotationExtension* F_;
  FiberedPoint corner_;
  PreorbitPolicy policy_;
  int depth_;
  mutable std::map<double, UnstableLeafChart> u_lines_;
  mutable std::map<double, StableLeafChart> s_lines_;
};

struct QuadrilateralSpec {
  FiberedPoint corner;
  double t = 0.0;  // u-leg length
  double s = 0.0;  // s-leg length
  std::optional<PreorbitPolicy> u_policy;  // default: stay outside the bump support
  bool reversed = false;
  int depth = kLeafDepth;
};

// Net fiber displacement of u(+t), s(+s), u(-t), s(-s) from the corner.
double quadrilateral_holonomy(const RotationExtension& F, const QuadrilateralSpec& q);

// Default u-leg policy: stay outside the bump support, else uniform-random.
PreorbitPolicy default_u_policy(const RotationExtension& F, const FiberedPoint& anchor,
                                std::uint64_t seed = 0);

double integrability_defect(const RotationExtension& F, const FiberedPoint& x,
                            const std::vector<std::pair<double, double>>& scales,
                            std::optional<PreorbitPolicy> u_policy = std::nullopt);

enum class LegKind { stable, unstable };

struct SuLeg {
  LegKind kind = LegKind::stable;
  FiberedPoint start;
  FiberedPoint end;
  FiberedPoint anchor;              // chart anchor on the same leaf as start
  double t_start = 0.0;             // chart parameters of start and end
  double t_end = 0.0;
  std::optional<Preorbit> preorbit; // u-legs: preorbit of the anchor
};

struct SuPath {
  FiberedPoint from;
  FiberedPoint to;
  std::vector<SuLeg> legs;
  double fiber_error = 0.0;
  int shooting_iterations = 0;
  bool empty() const { return legs.empty(); }
  FiberedPoint endpoint() const { return legs.empty() ? from : legs.back().end; }
};

struct SuPathOptions {
  double max_leg = 0.25;
  double loop_t = 0.3;
  double loop_s = 0.3;
  int bracket_scales = 16;
  int max_iterations = 64;
  int depth = kLeafDepth;
  std::uint64_t seed = 0;
};

// Base path u-leg then s-leg (split into pieces of at most max_leg), then
// holonomy shooting with loops at the endpoint. Throws
// NotAccessibleNumerically when the fiber error stays >= tol.
SuPath build_su_path(const RotationExtension& F, const FiberedPoint& from, const FiberedPoint& to,
                     double tol, const SuPathOptions& options = {});

// Largest mismatch found by re-evaluating every leg with the public offset
// operations from its anchor, plus endpoint joins.
double verify_su_path(const RotationExtension& F, const SuPath& path);

// Covering radius of the stable leaf through x sampled over arc length L
// (centered at x), measured at the centers of a G^3 grid in the sup metric.
double leaf_density_radius(const RotationExtension& F, const FiberedPoint& x, double L, int G);

struct HolonomySample {
  double t = 0.0;
  double s = 0.0;
  double dtheta = 0.0;
};
void write_holonomy_csv(std::ostream& out, const std::vector<HolonomySample>& rows);
void write_su_path_csv(std::ostream& out, const SuPath& path);

}  // namespace skewlab
