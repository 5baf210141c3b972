#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "skewlab/torus.hpp"

namespace skewlab {

struct EigenData {
  double a_s = 0.0;
  double a_u = 0.0;
  Eigen::Vector2d v_s = Eigen::Vector2d::Zero();
  Eigen::Vector2d v_u = Eigen::Vector2d::Zero();
};

// Throws NotHyperbolic for complex eigenvalues or |a| within 1e-9 of 1.
EigenData eigen_data(const std::array<long, 4>& entries);

// x -> M x mod Z^2 for an integer matrix M (row major a b / c d).
class LinearToralEndomorphism {
 public:
  explicit LinearToralEndomorphism(const std::array<long, 4>& entries);

  const std::array<long, 4>& entries() const { return m_; }
  long det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  int degree() const;
  const EigenData& eigen() const { return eig_; }
  Eigen::Matrix2d matrix() const;
  Eigen::Matrix2d inverse_matrix() const;

  TorusPoint2 apply(const TorusPoint2& p) const;
  // All preimages, distinct, in canonical (lexicographic) order.
  std::vector<TorusPoint2> preimages(const TorusPoint2& p) const;

 private:
  std::array<long, 4> m_;
  EigenData eig_;
};

// x -> k x mod 1.
class ExpandingCircleMap {
 public:
  explicit ExpandingCircleMap(int multiplier);

  int multiplier() const { return k_; }
  int degree() const { return k_ < 0 ? -k_ : k_; }

  double apply(double x) const;
  std::vector<double> preimages(double x) const;

 private:
  int k_;
};

using BaseMap = std::variant<LinearToralEndomorphism, ExpandingCircleMap>;

TorusPoint2 apply_base(const LinearToralEndomorphism& f, const TorusPoint2& p);
double apply_base(const ExpandingCircleMap& f, double x);
std::vector<TorusPoint2> base_preimages(const LinearToralEndomorphism& f, const TorusPoint2& p);
std::vector<double> base_preimages(const ExpandingCircleMap& f, double x);
EigenData eigen_data(const LinearToralEndomorphism& f);

// phi(q) = eps * beta(|d|^2 / r^2) * (d . v), d = q - center (nearest lift),
// beta(t) = exp(1 - 1/(1-t)) on [0,1), zero beyond.
class BumpFunction {
 public:
  BumpFunction(TorusPoint2 center, double radius, double amplitude, Eigen::Vector2d direction);

  const TorusPoint2& center() const { return center_; }
  double radius() const { return r_; }
  double amplitude() const { return eps_; }
  const Eigen::Vector2d& direction() const { return v_; }

  double operator()(const TorusPoint2& p) const;
  Eigen::Vector2d gradient(const TorusPoint2& p) const;
  bool in_support(const TorusPoint2& p) const;

  // Upper bounds over the torus, from the profile maxima.
  double sup_abs() const;
  double lipschitz() const;
  double hessian_bound() const;
  double c1_norm() const { return sup_abs() + lipschitz(); }

  static double profile(double t);

 private:
  TorusPoint2 center_;
  double r_;
  double eps_;
  Eigen::Vector2d v_;
};

// Shipped defaults: center O, r = 0.15, eps = 0.05, direction v_u of the base.
struct BumpParams {
  TorusPoint2 center{};
  double radius = 0.15;
  double amplitude = 0.05;
  std::optional<Eigen::Vector2d> direction;
};

BumpFunction make_bump(const BumpParams& params, const Eigen::Vector2d& default_direction);

double bump_eval(const BumpFunction& phi, const TorusPoint2& p);
Eigen::Vector2d bump_grad(const BumpFunction& phi, const TorusPoint2& p);

}  // namespace skewlab
