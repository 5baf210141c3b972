#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "skewlab/skew_product.hpp"

namespace skewlab {

// Finite backward branch x0 = anchor, x_{-1}, ..., x_{-N}.
struct Preorbit {
  FiberedPoint anchor;
  std::vector<int> branches;          // branches[k-1] picks x_{-k} among canonical preimages
  std::vector<FiberedPoint> points;   // points[k-1] = x_{-k}

  int depth() const { return static_cast<int>(points.size()); }
  // k = 0 is the anchor, k >= 1 is x_{-k}.
  const FiberedPoint& at(int k) const { return k == 0 ? anchor : points[k - 1]; }
  std::string itinerary() const;
};

struct UniformRandomPolicy {
  std::uint64_t seed = 0;
};

// Branch k is branches[(k-1) mod size].
struct FixedItineraryPolicy {
  std::vector<int> branches{0};
};

// Euclidean disk in the base. The first preimage is canonical branch 0; from
// depth 2 on the first canonical branch outside the disk is taken.
struct StayOutsidePolicy {
  TorusPoint2 center;
  double radius = 0.0;
  bool contains(const TorusPoint2& p) const;
};

using PreorbitPolicy = std::variant<UniformRandomPolicy, FixedItineraryPolicy, StayOutsidePolicy>;

// Stay-outside policy for the bump support (empty region for the product map).
StayOutsidePolicy stay_outside_support(const RotationExtension& F);

Preorbit sample_preorbit(const RotationExtension& F, const FiberedPoint& anchor, int depth,
                         const PreorbitPolicy& policy);

// Preorbit of q following ref: at each depth the preimage nearest to the
// reference point is chosen. The displacement from the reference is carried
// in eigen-coordinates of the linear base, so it stays exact far below the
// resolution of a double; a stable component below 1e-12 is treated as zero.
// Throws ShadowBreakdown when the two nearest candidates are within 1e-9.
Preorbit shadow_preorbit(const RotationExtension& F, const Preorbit& ref, const FiberedPoint& q);

// Largest |apply_F(x_{-k}) - x_{-k+1}| over the preorbit.
double preorbit_residual(const RotationExtension& F, const Preorbit& pre);

// Minimum pairwise distance of preimages over a grid x grid sample of the base.
double branch_separation(const RotationExtension& F, int grid = 200);

// Points x_i for past_min <= i <= forward_max, where past_min = -past.depth.
struct OrbitSegment {
  std::vector<FiberedPoint> forward;  // x_0 .. x_M
  std::optional<Preorbit> past;

  int min_index() const { return past ? -past->depth() : 0; }
  int max_index() const { return static_cast<int>(forward.size()) - 1; }
  const FiberedPoint& at(int i) const { return i >= 0 ? forward[i] : past->at(-i); }
};

OrbitSegment make_segment(const RotationExtension& F, const Preorbit& past, int forward_steps);
OrbitSegment make_segment(const RotationExtension& F, const FiberedPoint& x0, int forward_steps);

struct TruncatedDistance {
  double value = 0.0;
  double tail_bound = 0.0;
};

// sum_{|i| <= N} d(a_i, b_i) / 2^{|i|}; tail bound diam(M x S^1) 2^{1-N}.
TruncatedDistance inverse_limit_distance(const OrbitSegment& a, const OrbitSegment& b, int N);

// Reindex by one step forward (y_n = x_{n+1}) and back.
OrbitSegment shift(const RotationExtension& F, const OrbitSegment& s);
OrbitSegment unshift(const OrbitSegment& s);

// One row per realized point: depth, itinerary, k, x, y, theta.
void write_preorbits_csv(std::ostream& out, const std::vector<Preorbit>& preorbits);

}  // namespace skewlab
