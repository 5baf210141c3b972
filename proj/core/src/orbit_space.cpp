#include "skewlab/orbit_space.hpp"

#include <Eigen/LU>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "skewlab/errors.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {
namespace {

int nearest_index(const std::vector<FiberedPoint>& candidates, const TorusPoint2& target) {
  int best = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const double d = torus_distance(candidates[j].base, target);
    if (d < dmin) {
      dmin = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

}  // namespace

std::string Preorbit::itinerary() const {
  std::string s;
  s.reserve(branches.size());
  for (int b : branches) s += b < 10 ? char('0' + b) : char('a' + (b - 10));
  return s;
}

bool StayOutsidePolicy::contains(const TorusPoint2& p) const {
  return displacement(center, p).norm() < radius;
}

StayOutsidePolicy stay_outside_support(const RotationExtension& F) {
  if (!F.bump()) return {};
  return {F.bump()->center(), F.bump()->radius()};
}

Preorbit sample_preorbit(const RotationExtension& F, const FiberedPoint& anchor, int depth,
                         const PreorbitPolicy& policy) {
  if (depth < 1) throw std::invalid_argument("preorbit depth must be >= 1");
  Preorbit pre;
  pre.anchor = F.normalized(anchor);
  pre.branches.reserve(depth);
  pre.points.reserve(depth);
  std::mt19937_64 rng;
  if (const auto* u = std::get_if<UniformRandomPolicy>(&policy)) rng = stream_rng(u->seed, 0);

  FiberedPoint cur = pre.anchor;
  for (int k = 1; k <= depth; ++k) {
    const std::vector<FiberedPoint> cands = F.preimages(cur);
    const int n = static_cast<int>(cands.size());
    int b = 0;
    if (std::holds_alternative<UniformRandomPolicy>(policy)) {
      b = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    } else if (const auto* fx = std::get_if<FixedItineraryPolicy>(&policy)) {
      if (fx->branches.empty()) throw std::invalid_argument("empty fixed itinerary");
      b = fx->branches[(k - 1) % fx->branches.size()];
      if (b < 0 || b >= n) throw std::invalid_argument("itinerary branch out of range");
    } else {
      const auto& so = std::get<StayOutsidePolicy>(policy);
      if (k >= 2) {
        b = -1;
        for (int j = 0; j < n; ++j) {
          if (!so.contains(cands[j].base)) {
            b = j;
            break;
          }
        }
        if (b < 0) throw PolicyInfeasible("every preimage lies in the excluded region", k);
      }
    }
    cur = cands[b];
    pre.branches.push_back(b);
    pre.points.push_back(cur);
  }
  return pre;
}

Preorbit shadow_preorbit(const RotationExtension& F, const Preorbit& ref, const FiberedPoint& q) {
  Preorbit out;
  out.anchor = F.normalized(q);
  const int depth = ref.depth();
  out.branches.reserve(depth);
  out.points.reserve(depth);

  const bool torus = F.torus_base();
  // columns (v_s, v_u); decomposition D = alpha v_s + beta v_u
  Eigen::Matrix2d basis;
  basis.col(0) = torus ? F.v_s() : Eigen::Vector2d(0.0, 1.0);
  basis.col(1) = F.v_u();
  const Eigen::Matrix2d to_eigen = basis.inverse();
  const double a_s = F.a_s().value_or(1.0);
  const double a_u = F.a_u();

  auto decompose = [&](const Eigen::Vector2d& d, double& alpha, double& beta) {
    const Eigen::Vector2d c = to_eigen * (torus ? d : Eigen::Vector2d(d.x(), 0.0));
    alpha = torus && std::abs(c.x()) >= 1e-12 ? c.x() : 0.0;
    beta = c.y();
  };
  double alpha = 0.0, beta = 0.0;
  decompose(displacement(ref.anchor.base, out.anchor.base), alpha, beta);

  FiberedPoint cur = out.anchor;
  for (int k = 1; k <= depth; ++k) {
    const FiberedPoint& r = ref.at(k);
    const std::vector<FiberedPoint> cands = F.preimages(cur);
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    int best = 0;
    for (std::size_t j = 0; j < cands.size(); ++j) {
      const double d = torus_distance(cands[j].base, r.base);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = static_cast<int>(j);
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (cands.size() > 1 && d2 - d1 < 1e-9) {
      throw ShadowBreakdown("two preimages are equidistant from the reference", k);
    }
    alpha /= a_s;
    beta /= a_u;
    Eigen::Vector2d predicted = alpha * basis.col(0) + beta * basis.col(1);
    const Eigen::Vector2d actual = displacement(r.base, cands[best].base);
    if ((actual - predicted).lpNorm<Eigen::Infinity>() > 1e-6) {
      // branch switch relative to the analytic continuation
      decompose(actual, alpha, beta);
      predicted = alpha * basis.col(0) + beta * basis.col(1);
    }
    FiberedPoint y;
    y.base = torus ? translate(r.base, predicted) : TorusPoint2{wrap01(r.base.x + predicted.x()), 0.0};
    y.theta = wrap01(cur.theta - F.phi(y.base));
    out.branches.push_back(best);
    out.points.push_back(y);
    cur = y;
  }
  return out;
}

double preorbit_residual(const RotationExtension& F, const Preorbit& pre) {
  double worst = 0.0;
  for (int k = 1; k <= pre.depth(); ++k) {
    worst = std::max(worst, fibered_distance(F.apply(pre.at(k)), pre.at(k - 1)));
  }
  return worst;
}

double branch_separation(const RotationExtension& F, int grid) {
  double sep = std::numeric_limits<double>::infinity();
  const int ny = F.torus_base() ? grid : 1;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < ny; ++j) {
      const TorusPoint2 p{(i + 0.5) / grid, F.torus_base() ? (j + 0.5) / grid : 0.0};
      const auto pre = F.base_preimages(p);
      for (std::size_t a = 0; a < pre.size(); ++a) {
        for (std::size_t b = a + 1; b < pre.size(); ++b) {
          sep = std::min(sep, torus_distance(pre[a], pre[b]));
        }
      }
    }
  }
  return sep;
}

OrbitSegment make_segment(const RotationExtension& F, const Preorbit& past, int forward_steps) {
  OrbitSegment s = make_segment(F, past.anchor, forward_steps);
  s.past = past;
  return s;
}

OrbitSegment make_segment(const RotationExtension& F, const FiberedPoint& x0, int forward_steps) {
  OrbitSegment s;
  s.forward.reserve(static_cast<std::size_t>(forward_steps) + 1);
  s.forward.push_back(F.normalized(x0));
  for (int i = 0; i < forward_steps; ++i) s.forward.push_back(F.apply(s.forward.back()));
  return s;
}

TruncatedDistance inverse_limit_distance(const OrbitSegment& a, const OrbitSegment& b, int N) {
  if (N < 0) throw std::invalid_argument("N must be >= 0");
  if (a.min_index() > -N || b.min_index() > -N || a.max_index() < N || b.max_index() < N) {
    throw std::invalid_argument("segments must cover indices -N..N");
  }
  // sum outward from i = 0 so that a/b symmetry is exact
  double sum = fibered_distance(a.at(0), b.at(0));
  double w = 1.0;
  for (int i = 1; i <= N; ++i) {
    w *= 0.5;
    sum += w * (fibered_distance(a.at(i), b.at(i)) + fibered_distance(a.at(-i), b.at(-i)));
  }
  return {sum, 0.5 * std::ldexp(1.0, 1 - N)};
}

OrbitSegment shift(const RotationExtension& F, const OrbitSegment& s) {
  if (s.forward.size() < 2) throw std::invalid_argument("shift needs at least 2 forward points");
  OrbitSegment out;
  out.forward.assign(s.forward.begin() + 1, s.forward.end());
  Preorbit past;
  past.anchor = s.forward[1];
  const auto cands = F.preimages(s.forward[1]);
  past.branches.push_back(nearest_index(cands, s.forward[0].base));
  past.points.push_back(s.forward[0]);
  if (s.past) {
    past.branches.insert(past.branches.end(), s.past->branches.begin(), s.past->branches.end());
    past.points.insert(past.points.end(), s.past->points.begin(), s.past->points.end());
  }
  out.past = std::move(past);
  return out;
}

OrbitSegment unshift(const OrbitSegment& s) {
  if (!s.past || s.past->depth() < 1) throw std::invalid_argument("unshift needs a past point");
  OrbitSegment out;
  out.forward.reserve(s.forward.size() + 1);
  out.forward.push_back(s.past->points.front());
  out.forward.insert(out.forward.end(), s.forward.begin(), s.forward.end());
  if (s.past->depth() > 1) {
    Preorbit past;
    past.anchor = s.past->points.front();
    past.branches.assign(s.past->branches.begin() + 1, s.past->branches.end());
    past.points.assign(s.past->points.begin() + 1, s.past->points.end());
    out.past = std::move(past);
  }
  return out;
}

void write_preorbits_csv(std::ostream& out, const std::vector<Preorbit>& preorbits) {
  out << "depth,itinerary,k,x,y,theta\n";
  out << std::setprecision(17);
  for (const Preorbit& p : preorbits) {
    const std::string it = p.itinerary();
    for (int k = 0; k <= p.depth(); ++k) {
      const FiberedPoint& q = p.at(k);
      out << p.depth() << ',' << it << ',' << k << ',' << q.base.x << ',' << q.base.y << ','
          << q.theta << '\n';
    }
  }
}

}  // namespace skewlab
