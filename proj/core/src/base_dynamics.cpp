#include "skewlab/base_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "skewlab/errors.hpp"

namespace skewlab {
namespace {

// a*x + b*y mod 1 with a single final rounding (error-free products and sum).
double affine_mod1(double a, double x, double b, double y, double shift = 0.0) {
  const double p1 = a * x;
  const double e1 = std::fma(a, x, -p1);
  const double p2 = b * y;
  const double e2 = std::fma(b, y, -p2);
  const double s = p1 + p2;
  const double bb = s - p1;
  const double e3 = (p1 - (s - bb)) + (p2 - bb);
  const double f = s - std::floor(s);
  return wrap01(f + ((e1 + e2 + e3) + shift));
}

Eigen::Vector2d eigenvector(double a, double b, double c, double d, double lambda) {
  Eigen::Vector2d v1(b, lambda - a);
  Eigen::Vector2d v2(lambda - d, c);
  Eigen::Vector2d v = v1.norm() >= v2.norm() ? v1 : v2;
  v.normalize();
  if (v.x() < 0.0 || (v.x() == 0.0 && v.y() < 0.0)) v = -v;
  return v;
}

struct ProfileMaxima {
  double value_sqrt_t = 0.0;   // max beta(t) sqrt(t)
  double gradient = 0.0;       // max beta(t) (1 + 2t/(1-t)^2)
  double hessian = 0.0;        // max 4|beta''| t^1.5 + 6|beta'| sqrt(t)
};

const ProfileMaxima& profile_maxima() {
  static const ProfileMaxima m = [] {
    ProfileMaxima out;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / n;
      const double b = BumpFunction::profile(t);
      const double u = 1.0 / (1.0 - t);
      const double d1 = b * u * u;
      const double d2 = std::abs(b * u * u * u * u * (2.0 * t - 1.0));
      out.value_sqrt_t = std::max(out.value_sqrt_t, b * std::sqrt(t));
      out.gradient = std::max(out.gradient, b * (1.0 + 2.0 * t * u * u));
      out.hessian = std::max(out.hessian, 4.0 * d2 * t * std::sqrt(t) + 6.0 * d1 * std::sqrt(t));
    }
    // grid sampling slightly underestimates a smooth maximum
    out.value_sqrt_t *= 1.001;
    out.gradient *= 1.001;
    out.hessian *= 1.001;
    return out;
  }();
  return m;
}

}  // namespace

EigenData eigen_data(const std::array<long, 4>& m) {
  const double a = static_cast<double>(m[0]), b = static_cast<double>(m[1]);
  const double c = static_cast<double>(m[2]), d = static_cast<double>(m[3]);
  const double tr = a + d;
  const double det = a * d - b * c;
  const double disc = tr * tr - 4.0 * det;
  if (disc <= 0.0) throw NotHyperbolic("eigenvalues are complex or repeated");
  const double root = std::sqrt(disc);
  const double big = 0.5 * (tr + std::copysign(root, tr == 0.0 ? 1.0 : tr));
  const double small = det / big;
  double lu = big, ls = small;
  if (std::abs(ls) > std::abs(lu)) std::swap(lu, ls);
  if (std::abs(ls) >= 1.0 - 1e-9 || std::abs(lu) <= 1.0 + 1e-9) {
    throw NotHyperbolic("eigenvalue modulus within 1e-9 of the unit circle or on the wrong side");
  }
  EigenData e;
  e.a_s = ls;
  e.a_u = lu;
  e.v_s = eigenvector(a, b, c, d, ls);
  e.v_u = eigenvector(a, b, c, d, lu);
  return e;
}

LinearToralEndomorphism::LinearToralEndomorphism(const std::array<long, 4>& entries)
    : m_(entries), eig_(eigen_data(entries)) {}

int LinearToralEndomorphism::degree() const { return static_cast<int>(std::labs(det())); }

Eigen::Matrix2d LinearToralEndomorphism::matrix() const {
  Eigen::Matrix2d a;
  a << double(m_[0]), double(m_[1]), double(m_[2]), double(m_[3]);
  return a;
}

Eigen::Matrix2d LinearToralEndomorphism::inverse_matrix() const {
  Eigen::Matrix2d adj;
  adj << double(m_[3]), double(-m_[1]), double(-m_[2]), double(m_[0]);
  return adj / static_cast<double>(det());
}

TorusPoint2 LinearToralEndomorphism::apply(const TorusPoint2& p) const {
  return {affine_mod1(double(m_[0]), p.x, double(m_[1]), p.y),
          affine_mod1(double(m_[2]), p.x, double(m_[3]), p.y)};
}

std::vector<TorusPoint2> LinearToralEndomorphism::preimages(const TorusPoint2& p) const {
  const long dt = det();
  const long n = std::labs(dt);
  const double inv = 1.0 / static_cast<double>(dt);
  // adj(M) (p + k) / det, k over a set of representatives of Z^2 / M Z^2
  std::vector<TorusPoint2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long k0 = 0; k0 < n; ++k0) {
    for (long k1 = 0; k1 < n; ++k1) {
      const long ix = m_[3] * k0 - m_[1] * k1;
      const long iy = -m_[2] * k0 + m_[0] * k1;
      const double hx = double(m_[3]) * p.x - double(m_[1]) * p.y;
      const double hy = -double(m_[2]) * p.x + double(m_[0]) * p.y;
      TorusPoint2 q{wrap01((hx + double(ix)) * inv), wrap01((hy + double(iy)) * inv)};
      bool seen = false;
      for (const auto& r : out) {
        if (torus_distance(r, q) < 1e-9) {
          seen = true;
          break;
        }
      }
      if (!seen) out.push_back(q);
    }
  }
  if (static_cast<long>(out.size()) != n) {
    throw std::logic_error("preimage count " + std::to_string(out.size()) + " != degree " +
                           std::to_string(n));
  }
  std::sort(out.begin(), out.end(), [](const TorusPoint2& a, const TorusPoint2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  return out;
}

ExpandingCircleMap::ExpandingCircleMap(int multiplier) : k_(multiplier) {
  if (multiplier > -2 && multiplier < 2) {
    throw NotHyperbolic("expanding circle map needs |k| >= 2");
  }
}

double ExpandingCircleMap::apply(double x) const { return affine_mod1(double(k_), x, 0.0, 0.0); }

std::vector<double> ExpandingCircleMap::preimages(double x) const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(degree()));
  for (int j = 0; j < degree(); ++j) out.push_back(wrap01((x + j) / k_));
  std::sort(out.begin(), out.end());
  return out;
}

TorusPoint2 apply_base(const LinearToralEndomorphism& f, const TorusPoint2& p) { return f.apply(p); }
double apply_base(const ExpandingCircleMap& f, double x) { return f.apply(x); }
std::vector<TorusPoint2> base_preimages(const LinearToralEndomorphism& f, const TorusPoint2& p) {
  return f.preimages(p);
}
std::vector<double> base_preimages(const ExpandingCircleMap& f, double x) { return f.preimages(x); }
EigenData eigen_data(const LinearToralEndomorphism& f) { return f.eigen(); }

BumpFunction::BumpFunction(TorusPoint2 center, double radius, double amplitude,
                           Eigen::Vector2d direction)
    : center_(reduce(center.x, center.y)), r_(radius), eps_(amplitude), v_(direction) {
  if (!(radius > 0.0) || radius >= 0.5) {
    throw std::invalid_argument("bump radius must lie in (0, 0.5)");
  }
  if (!std::isfinite(amplitude)) throw std::invalid_argument("bump amplitude must be finite");
  const double n = v_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("bump direction must be nonzero");
  v_ /= n;
  if (!(c1_norm() <= (radius + 2.0) * std::abs(amplitude) + 1e-300)) {
    throw std::logic_error("bump C1 norm exceeds its amplitude bound");
  }
}

double BumpFunction::profile(double t) {
  if (t >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t));
}

bool BumpFunction::in_support(const TorusPoint2& p) const {
  const Eigen::Vector2d d = displacement(center_, p);
  return d.squaredNorm() < r_ * r_;
}

double BumpFunction::operator()(const TorusPoint2& p) const {
  const Eigen::Vector2d d = displacement(center_, p);
  const double t = d.squaredNorm() / (r_ * r_);
  if (t >= 1.0) return 0.0;
  return eps_ * profile(t) * d.dot(v_);
}

Eigen::Vector2d BumpFunction::gradient(const TorusPoint2& p) const {
  const Eigen::Vector2d d = displacement(center_, p);
  const double r2 = r_ * r_;
  const double t = d.squaredNorm() / r2;
  if (t >= 1.0) return Eigen::Vector2d::Zero();
  const double b = profile(t);
  const double u = 1.0 / (1.0 - t);
  const double db = -b * u * u;
  return eps_ * (db * (2.0 / r2) * d.dot(v_) * d + b * v_);
}

double BumpFunction::sup_abs() const { return std::abs(eps_) * r_ * profile_maxima().value_sqrt_t; }
double BumpFunction::lipschitz() const { return std::abs(eps_) * profile_maxima().gradient; }
double BumpFunction::hessian_bound() const {
  return std::abs(eps_) / r_ * profile_maxima().hessian;
}

BumpFunction make_bump(const BumpParams& params, const Eigen::Vector2d& default_direction) {
  return BumpFunction(params.center, params.radius, params.amplitude,
                      params.direction.value_or(default_direction));
}

double bump_eval(const BumpFunction& phi, const TorusPoint2& p) { return phi(p); }
Eigen::Vector2d bump_grad(const BumpFunction& phi, const TorusPoint2& p) { return phi.gradient(p); }

}  // namespace skewlab
