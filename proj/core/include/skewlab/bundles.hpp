#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "skewlab/orbit_space.hpp"
#include "skewlab/skew_product.hpp"

namespace skewlab {

// Projective line: a unit vector identified with its negative.
class Direction {
 public:
  Direction() = default;
  explicit Direction(const TangentVector& v);
  const TangentVector& vector() const { return v_; }

 private:
  TangentVector v_;
};
using Direction3 = Direction;

// Angle between lines, in [0, pi/2]. Accurate for nearly parallel inputs.
double angle_between(const TangentVector& a, const TangentVector& b);
inline double angle_between(const Direction& a, const Direction& b) {
  return angle_between(a.vector(), b.vector());
}

struct DirectionEstimate {
  Direction direction;
  double residual = 0.0;  // angle change at the last doubling of the orbit length
  int steps = 0;          // orbit length actually used
};

// Inverse-cocycle power iteration along the forward orbit of x, starting from
// length n and doubling until the estimate moves by less than 1e-10 (at most
// 4096 steps). Torus bases only.
DirectionEstimate estimate_stable_direction(const RotationExtension& F, const FiberedPoint& x, int n);

// Forward push of a seed from x_{-n} along the preorbit, doubling n up to the
// preorbit depth.
DirectionEstimate estimate_unstable_direction(const RotationExtension& F, const Preorbit& pre, int n);

// Intersection of the center-stable and center-unstable planes, obtained by
// power iteration on 2-frames (the second column deflated against the first).
// Over a circle base E^c is the dominant line of the inverse cocycle.
DirectionEstimate estimate_center_direction(const RotationExtension& F, const FiberedPoint& x,
                                            const Preorbit& pre, int n);

struct SplittingEstimate {
  FiberedPoint at;
  std::optional<Direction> e_s;
  Direction e_c;
  Direction e_u;
  // invariance defects angle(dF e(p), e(F p))
  std::optional<double> residual_s;
  double residual_c = 0.0;
  double residual_u = 0.0;
};

// Splitting at pre.anchor; invariance is checked against the estimate at
// F(anchor) with the preorbit extended by the anchor.
SplittingEstimate estimate_splitting(const RotationExtension& F, const Preorbit& pre, int n);

struct LyapunovTriple {
  std::optional<double> stable;   // absent over a circle base
  double center = 0.0;
  double unstable = 0.0;
  std::optional<double> stable_error;
  double center_error = 0.0;
  double unstable_error = 0.0;
  long iterations = 0;

  double sum() const { return stable.value_or(0.0) + center + unstable; }
};

// QR cocycle along a dithered orbit of x (200-step burn-in), standard errors
// from 10 batch means. Requires n >= 1000.
LyapunovTriple lyapunov_exponents(const RotationExtension& F, const FiberedPoint& x, long n,
                                  std::uint64_t seed);

// Max pairwise angle of unstable estimates over preorbits sharing an anchor.
double unstable_direction_spread(const RotationExtension& F, const std::vector<Preorbit>& preorbits,
                                 int n);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  int samples = 0;
};

// Batch-means (10 batches when there are at least 10 values) mean and error.
MonteCarloEstimate batch_mean(const std::vector<double>& values);

// Average over uniform starts of the time average of
// log|det dF on E^cs| - log|dF on E^s|.
MonteCarloEstimate mean_center_exponent(const RotationExtension& F, int sample_size,
                                        long orbit_length, std::uint64_t seed);

// Average over uniform starts of the sum of positive exponents.
MonteCarloEstimate pesin_entropy_estimate(const RotationExtension& F, int sample_size,
                                          long orbit_length, std::uint64_t seed = 0x5eedULL);

struct RateEstimates {
  std::optional<double> nu;  // absent over a circle base
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double mu = 0.0;
  double C = 1.0;

  bool certifies_partial_hyperbolicity() const;
};

// Empirical constants from per-step growth of the estimated bundles over
// windows of n steps along `samples` dithered orbits.
RateEstimates estimate_rates(const RotationExtension& F, int samples, int n, std::uint64_t seed);

void write_lyapunov_csv(std::ostream& out,
                        const std::vector<std::pair<FiberedPoint, LyapunovTriple>>& rows);
void write_splitting_csv(std::ostream& out, const std::vector<SplittingEstimate>& rows);

}  // namespace skewlab
