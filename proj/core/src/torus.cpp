#include "skewlab/torus.hpp"

#include <algorithm>
#include <cmath>

namespace skewlab {

double wrap01(double v) {
  double f = v - std::floor(v);
  return f >= 1.0 ? 0.0 : f;
}

double wrap_half(double v) {
  double f = v - std::floor(v + 0.5);
  return f >= 0.5 ? f - 1.0 : f;
}

double circle_distance(double a, double b) { return std::abs(wrap_half(b - a)); }

TorusPoint2 reduce(double x, double y) { return {wrap01(x), wrap01(y)}; }

double torus_distance(const TorusPoint2& a, const TorusPoint2& b) {
  return std::max(circle_distance(a.x, b.x), circle_distance(a.y, b.y));
}

Eigen::Vector2d displacement(const TorusPoint2& a, const TorusPoint2& b) {
  return {wrap_half(b.x - a.x), wrap_half(b.y - a.y)};
}

TorusPoint2 translate(const TorusPoint2& p, const Eigen::Vector2d& d) {
  return reduce(p.x + d.x(), p.y + d.y());
}

}  // namespace skewlab
