#include "skewlab/skew_product.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

#include "skewlab/rng.hpp"

namespace skewlab {

RotationExtension::RotationExtension(BaseMap base, std::optional<BumpFunction> bump)
    : base_(std::move(base)), bump_(std::move(bump)) {
  if (const auto* lin = std::get_if<LinearToralEndomorphism>(&base_)) {
    const EigenData& e = lin->eigen();
    a_u_ = e.a_u;
    a_s_ = e.a_s;
    v_u_ = e.v_u;
    v_s_ = e.v_s;
    mat_ = lin->matrix();
  } else {
    const auto& circ = std::get<ExpandingCircleMap>(base_);
    a_u_ = circ.multiplier();
    v_u_ = Eigen::Vector2d(1.0, 0.0);
    v_s_ = Eigen::Vector2d::Zero();
    mat_ << double(circ.multiplier()), 0.0, 0.0, 0.0;
    if (bump_ && (bump_->center().y != 0.0 || bump_->direction().y() != 0.0)) {
      throw std::invalid_argument("a bump over a circle base must have center.y = 0 and direction (±1, 0)");
    }
  }
}

RotationExtension RotationExtension::paper_example(const BumpParams& params) {
  LinearToralEndomorphism a({3, 1, 1, 1});
  BumpFunction phi = make_bump(params, a.eigen().v_u);
  return RotationExtension(a, phi);
}

RotationExtension RotationExtension::product(const BaseMap& base) {
  return RotationExtension(base, std::nullopt);
}

int RotationExtension::degree() const {
  return std::visit([](const auto& f) { return f.degree(); }, base_);
}

double RotationExtension::log_abs_det() const {
  return std::log(static_cast<double>(degree()));
}

TorusPoint2 RotationExtension::base_apply(const TorusPoint2& p) const {
  if (const auto* lin = std::get_if<LinearToralEndomorphism>(&base_)) return lin->apply(p);
  return {std::get<ExpandingCircleMap>(base_).apply(p.x), 0.0};
}

std::vector<TorusPoint2> RotationExtension::base_preimages(const TorusPoint2& p) const {
  if (const auto* lin = std::get_if<LinearToralEndomorphism>(&base_)) return lin->preimages(p);
  std::vector<TorusPoint2> out;
  for (double x : std::get<ExpandingCircleMap>(base_).preimages(p.x)) out.push_back({x, 0.0});
  return out;
}

FiberedPoint RotationExtension::apply(const FiberedPoint& p) const {
  return {base_apply(p.base), wrap01(p.theta + phi(p.base))};
}

std::vector<FiberedPoint> RotationExtension::preimages(const FiberedPoint& p) const {
  std::vector<FiberedPoint> out;
  for (const TorusPoint2& q : base_preimages(p.base)) out.push_back({q, wrap01(p.theta - phi(q))});
  return out;
}

DerivativeMatrix RotationExtension::derivative(const FiberedPoint& p) const {
  const Eigen::Vector2d g = grad_phi(p.base);
  DerivativeMatrix m = DerivativeMatrix::Zero(dim(), dim());
  if (torus_base()) {
    m.topLeftCorner<2, 2>() = mat_;
    m(2, 0) = g.x();
    m(2, 1) = g.y();
    m(2, 2) = 1.0;
  } else {
    m(0, 0) = mat_(0, 0);
    m(1, 0) = g.x();
    m(1, 1) = 1.0;
  }
  return m;
}

DerivativeMatrix RotationExtension::inverse_derivative(const FiberedPoint& p) const {
  const Eigen::Vector2d g = grad_phi(p.base);
  DerivativeMatrix m = DerivativeMatrix::Zero(dim(), dim());
  if (torus_base()) {
    const Eigen::Matrix2d inv = std::get<LinearToralEndomorphism>(base_).inverse_matrix();
    m.topLeftCorner<2, 2>() = inv;
    const Eigen::RowVector2d row = -g.transpose() * inv;
    m(2, 0) = row.x();
    m(2, 1) = row.y();
    m(2, 2) = 1.0;
  } else {
    m(0, 0) = 1.0 / mat_(0, 0);
    m(1, 0) = -g.x() / mat_(0, 0);
    m(1, 1) = 1.0;
  }
  return m;
}

double RotationExtension::jacobian_determinant(const FiberedPoint& p) const {
  const DerivativeMatrix m = derivative(p);
  if (torus_base()) return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) * m(2, 2);
  return m(0, 0) * m(1, 1);
}

FiberedPoint RotationExtension::normalized(const FiberedPoint& p) const {
  return {torus_base() ? reduce(p.base.x, p.base.y) : TorusPoint2{wrap01(p.base.x), 0.0},
          wrap01(p.theta)};
}

FiberedPoint RotationExtension::random_point(std::mt19937_64& g) const {
  FiberedPoint p;
  p.base.x = uniform01(g);
  p.base.y = torus_base() ? uniform01(g) : 0.0;
  p.theta = uniform01(g);
  return p;
}

FiberedPoint apply_F(const RotationExtension& F, const FiberedPoint& p) { return F.apply(p); }
DerivativeMatrix dF(const RotationExtension& F, const FiberedPoint& p) { return F.derivative(p); }
std::vector<FiberedPoint> F_preimages(const RotationExtension& F, const FiberedPoint& p) {
  return F.preimages(p);
}

FiberedPoint vertical_rotate(double alpha, const FiberedPoint& p) {
  return {p.base, wrap01(p.theta + alpha)};
}

double jacobian_sum_check(const RotationExtension& F, const FiberedPoint& p) {
  double sum = 0.0;
  for (const FiberedPoint& q : F.preimages(p)) sum += 1.0 / std::abs(F.jacobian_determinant(q));
  return sum;
}

double fibered_distance(const FiberedPoint& a, const FiberedPoint& b) {
  return std::max(torus_distance(a.base, b.base), circle_distance(a.theta, b.theta));
}

Eigen::Vector3d lift_apply(const RotationExtension& F, const Eigen::Vector3d& p) {
  const Eigen::Vector2d x = p.head<2>();
  const Eigen::Vector2d fx = F.base_matrix() * x;
  const TorusPoint2 q = F.torus_base() ? reduce(x.x(), x.y()) : TorusPoint2{wrap01(x.x()), 0.0};
  return {fx.x(), F.torus_base() ? fx.y() : 0.0, p.z() + F.phi(q)};
}

OrbitDriver::OrbitDriver(const RotationExtension& F, const FiberedPoint& start, std::uint64_t seed)
    : F_(&F), p_(F.normalized(start)), rng_(stream_rng(seed, 0x6472697665ULL)) {}

const FiberedPoint& OrbitDriver::step() {
  p_ = F_->apply(p_);
  p_.base.x = wrap01(p_.base.x + (2.0 * uniform01(rng_) - 1.0) * kNoise);
  if (F_->torus_base()) p_.base.y = wrap01(p_.base.y + (2.0 * uniform01(rng_) - 1.0) * kNoise);
  return p_;
}

}  // namespace skewlab
