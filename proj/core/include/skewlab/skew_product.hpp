#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "skewlab/base_dynamics.hpp"

namespace skewlab {

// Point of M x S^1; the fiber angle is in turns. Circle bases use base.y = 0.
struct FiberedPoint {
  TorusPoint2 base;
  double theta = 0.0;
  friend bool operator==(const FiberedPoint&, const FiberedPoint&) = default;
};

// Square of size dim() (3 over T^2, 2 over S^1).
using DerivativeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using TangentVector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

// F(x, theta) = (f(x), theta + phi(x)); no bump means the product map.
class RotationExtension {
 public:
  RotationExtension(BaseMap base, std::optional<BumpFunction> bump);

  // A = (3,1;1,1) with a bump along v_u at O (default radius 0.15, amplitude 0.05).
  static RotationExtension paper_example(const BumpParams& params = {});
  static RotationExtension product(const BaseMap& base);

  const BaseMap& base_map() const { return base_; }
  const std::optional<BumpFunction>& bump() const { return bump_; }
  bool is_product() const { return !bump_.has_value(); }
  bool torus_base() const { return std::holds_alternative<LinearToralEndomorphism>(base_); }
  int base_dim() const { return torus_base() ? 2 : 1; }
  int dim() const { return base_dim() + 1; }
  int degree() const;

  double phi(const TorusPoint2& p) const { return bump_ ? (*bump_)(p) : 0.0; }
  Eigen::Vector2d grad_phi(const TorusPoint2& p) const {
    return bump_ ? bump_->gradient(p) : Eigen::Vector2d::Zero();
  }

  TorusPoint2 base_apply(const TorusPoint2& p) const;
  std::vector<TorusPoint2> base_preimages(const TorusPoint2& p) const;

  // Linear data of the base. Circle bases: v_u = (1,0), no stable direction.
  double a_u() const { return a_u_; }
  std::optional<double> a_s() const { return a_s_; }
  const Eigen::Vector2d& v_u() const { return v_u_; }
  const Eigen::Vector2d& v_s() const { return v_s_; }
  // Base derivative embedded in a 2x2 matrix (circle: diag(k, 0)).
  const Eigen::Matrix2d& base_matrix() const { return mat_; }
  double log_abs_det() const;

  FiberedPoint apply(const FiberedPoint& p) const;
  std::vector<FiberedPoint> preimages(const FiberedPoint& p) const;
  DerivativeMatrix derivative(const FiberedPoint& p) const;
  DerivativeMatrix inverse_derivative(const FiberedPoint& p) const;
  double jacobian_determinant(const FiberedPoint& p) const;

  FiberedPoint normalized(const FiberedPoint& p) const;
  FiberedPoint random_point(std::mt19937_64& g) const;

 private:
  BaseMap base_;
  std::optional<BumpFunction> bump_;
  double a_u_ = 0.0;
  std::optional<double> a_s_;
  Eigen::Vector2d v_u_, v_s_;
  Eigen::Matrix2d mat_;
};

FiberedPoint apply_F(const RotationExtension& F, const FiberedPoint& p);
DerivativeMatrix dF(const RotationExtension& F, const FiberedPoint& p);
std::vector<FiberedPoint> F_preimages(const RotationExtension& F, const FiberedPoint& p);
FiberedPoint vertical_rotate(double alpha, const FiberedPoint& p);
double jacobian_sum_check(const RotationExtension& F, const FiberedPoint& p);

// Sup of base and fiber circle distances.
double fibered_distance(const FiberedPoint& a, const FiberedPoint& b);

// F on the universal cover R^2 x R (circle bases ignore the y entry).
Eigen::Vector3d lift_apply(const RotationExtension& F, const Eigen::Vector3d& p);

// Seeded pseudo-orbit for long statistics. Floating-point orbits of an
// integer endomorphism with even determinant lose one bit per step and
// collapse onto a periodic point after ~100 steps; the driver adds uniform
// noise of size 2^-48 to the base after every exact step.
class OrbitDriver {
 public:
  static constexpr double kNoise = 0x1.0p-48;

  OrbitDriver(const RotationExtension& F, const FiberedPoint& start, std::uint64_t seed);

  const FiberedPoint& point() const { return p_; }
  const FiberedPoint& step();

 private:
  const RotationExtension* F_;
  FiberedPoint p_;
  std::mt19937_64 rng_;
};

}  // namespace skewlab
