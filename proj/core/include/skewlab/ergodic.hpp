#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "skewlab/orbit_space.hpp"
#include "skewlab/rng.hpp"
#include "skewlab/skew_product.hpp"

namespace skewlab {

// Catalog of test functions. Every entry has |value| <= 1; all space
// averages are 0 except for the constant.
enum class Observable { one, cos_theta, sin_theta, cos_x, cos_x_plus_theta };

double evaluate(Observable psi, const FiberedPoint& p);
double space_average(Observable psi);
std::string_view observable_name(Observable psi);
// Throws std::invalid_argument for unknown names.
Observable parse_observable(std::string_view name);

// (1/N) sum_{j<N} psi(F^j start) along a dithered orbit (see OrbitDriver).
double birkhoff_average(const RotationExtension& F, Observable psi, const FiberedPoint& start, long N,
                        std::uint64_t dither_seed = 0);

struct BirkhoffReport {
  Observable observable = Observable::cos_theta;
  long N = 0;
  std::uint64_t seed = 0;
  std::vector<FiberedPoint> starts;
  std::vector<double> averages;
  double mean = 0.0;
  double dispersion = 0.0;  // ensemble standard deviation
};

// Time averages from `starts` uniform starting points (stream (seed, i)).
BirkhoffReport birkhoff_dispersion(const RotationExtension& F, Observable psi, int starts, long N,
                                   std::uint64_t seed);

struct TransitivityReport {
  int G = 0;
  long N = 0;
  double epsilon = 0.0;
  int cloud_size = 0;
  std::vector<std::pair<long, double>> checkpoints;  // (steps, visited fraction)
  double fraction = 0.0;
};

// Iterates a uniform cloud in the sup-ball B_eps(center) and records which of
// the G^dim boxes have been visited.
TransitivityReport box_transitivity(const RotationExtension& F, const FiberedPoint& center, double eps,
                                    int G, long N, int cloud_size, std::uint64_t seed);

struct DeltaU {
  double value = 1.0;
  double log_value = 0.0;
  double log_tail_bound = 0.0;
};

// prod_{k=1}^K J^u(x_{-k}) / J^u(y_{-k}), J^u = |dF e_u| with e_u swept
// forward from the deepest point of each preorbit.
DeltaU srb_delta_u(const RotationExtension& F, const Preorbit& x, const Preorbit& y, int K);

struct SrbLeafDensity {
  std::vector<double> t;
  std::vector<double> delta_u;
  std::vector<double> rho;
  double normalization = 0.0;  // L, trapezoid rule
  double integral = 0.0;       // trapezoid rule of rho
  double deviation = 0.0;      // max rho / min rho - 1
};

SrbLeafDensity srb_density(const RotationExtension& F, const Preorbit& anchor, double half_length,
                           int quad_points);

template <class Map>
concept VolumeCheckable = requires(const Map& m, const FiberedPoint& p, std::mt19937_64& g) {
  { m.preimages(p) } -> std::convertible_to<std::vector<FiberedPoint>>;
  { m.jacobian_determinant(p) } -> std::convertible_to<double>;
  { m.random_point(g) } -> std::convertible_to<FiberedPoint>;
};

struct VolumeCertificate {
  bool pass = false;
  double max_deviation = 0.0;
  int samples = 0;
};

// max |sum_{q in preimages(p)} 1/|det dF(q)| - 1| over random p; pass below 1e-9.
template <VolumeCheckable Map>
VolumeCertificate volume_preservation_certificate(const Map& F, int samples, std::uint64_t seed) {
  VolumeCertificate c;
  c.samples = samples;
  auto g = stream_rng(seed, 0);
  for (int i = 0; i < samples; ++i) {
    const FiberedPoint p = F.random_point(g);
    double sum = 0.0;
    for (const FiberedPoint& q : F.preimages(p)) sum += 1.0 / std::abs(F.jacobian_determinant(q));
    c.max_deviation = std::max(c.max_deviation, std::abs(sum - 1.0));
  }
  c.pass = c.max_deviation < 1e-9;
  return c;
}

void write_birkhoff_csv(std::ostream& out, const BirkhoffReport& r);
void write_transitivity_csv(std::ostream& out, const TransitivityReport& r);
void write_srb_csv(std::ostream& out, const SrbLeafDensity& d);

}  // namespace skewlab
