#pragma once

#include <Eigen/Core>

namespace skewlab {

// Point of T^2 = R^2/Z^2, coordinates kept in [0,1).
struct TorusPoint2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const TorusPoint2&, const TorusPoint2&) = default;
};

// v mod 1 in [0,1). Tiny negative inputs that would round to 1.0 map to 0.
double wrap01(double v);

// Representative of v mod 1 in [-0.5, 0.5).
double wrap_half(double v);

double circle_distance(double a, double b);

TorusPoint2 reduce(double x, double y);
inline TorusPoint2 reduce(const Eigen::Vector2d& v) { return reduce(v.x(), v.y()); }

// Sup of the coordinate circle distances.
double torus_distance(const TorusPoint2& a, const TorusPoint2& b);

// Shortest lift of b - a (each coordinate in [-0.5, 0.5)).
Eigen::Vector2d displacement(const TorusPoint2& a, const TorusPoint2& b);

TorusPoint2 translate(const TorusPoint2& p, const Eigen::Vector2d& d);

inline Eigen::Vector2d as_vector(const TorusPoint2& p) { return {p.x, p.y}; }

}  // namespace skewlab
