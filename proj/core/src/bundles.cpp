#include "skewlab/bundles.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "skewlab/errors.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {
namespace {

using Frame = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

constexpr int kMaxForward = 4096;
constexpr double kConverged = 1e-10;

TangentVector embed(const RotationExtension& F, const Eigen::Vector2d& base, double fiber) {
  TangentVector v(F.dim());
  if (F.torus_base()) {
    v << base.x(), base.y(), fiber;
  } else {
    v << base.x(), fiber;
  }
  return v;
}

TangentVector fiber_axis(const RotationExtension& F) {
  return embed(F, Eigen::Vector2d::Zero(), 1.0);
}

// Modified Gram-Schmidt in place; returns log of the diagonal of R.
std::array<double, 3> orthonormalize(Frame& m) {
  std::array<double, 3> logs{};
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < j; ++i) m.col(j) -= m.col(i).dot(m.col(j)) * m.col(i);
    const double r = m.col(j).norm();
    logs[j] = std::log(r);
    m.col(j) /= r;
  }
  return logs;
}

Eigen::Vector3d as3(const TangentVector& v) { return {v(0), v(1), v(2)}; }

std::vector<FiberedPoint> forward_orbit(const RotationExtension& F, const FiberedPoint& x, int m) {
  std::vector<FiberedPoint> orbit;
  orbit.reserve(static_cast<std::size_t>(m) + 1);
  orbit.push_back(F.normalized(x));
  for (int k = 0; k < m; ++k) orbit.push_back(F.apply(orbit.back()));
  return orbit;
}

template <class Run>
DirectionEstimate doubling(int n, int cap, Run run) {
  int m = std::max(1, std::min(n, cap));
  TangentVector prev = run(m);
  double change = std::numeric_limits<double>::infinity();
  while (2 * m <= cap) {
    const TangentVector cur = run(2 * m);
    change = angle_between(prev, cur);
    prev = cur;
    m *= 2;
    if (change < kConverged) break;
  }
  if (!std::isfinite(change) && m > 1) change = angle_between(prev, run(m / 2));
  return {Direction(prev), std::isfinite(change) ? change : 0.0, m};
}

std::vector<TangentVector> seeds_near(const RotationExtension& F, const Eigen::Vector2d& main,
                                      const Eigen::Vector2d& other) {
  return {embed(F, main, 0.0), embed(F, (main + other).normalized(), 0.0),
          embed(F, main, 1.0).normalized(), embed(F, main + 0.5 * other, -0.7).normalized()};
}

Preorbit extended_by_anchor(const RotationExtension& F, const Preorbit& pre) {
  Preorbit next;
  next.anchor = F.apply(pre.anchor);
  const auto cands = F.preimages(next.anchor);
  int idx = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cands.size(); ++j) {
    const double d = torus_distance(cands[j].base, pre.anchor.base);
    if (d < best) {
      best = d;
      idx = static_cast<int>(j);
    }
  }
  next.branches.push_back(idx);
  next.points.push_back(pre.anchor);
  next.branches.insert(next.branches.end(), pre.branches.begin(), pre.branches.end());
  next.points.insert(next.points.end(), pre.points.begin(), pre.points.end());
  return next;
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (v.size() - 1));
}

}  // namespace

Direction::Direction(const TangentVector& v) : v_(v) {
  const double n = v_.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw DegenerateSeed("direction of a zero or non-finite vector");
  v_ /= n;
}

double angle_between(const TangentVector& a, const TangentVector& b) {
  const TangentVector u = a.normalized();
  TangentVector w = b.normalized();
  if (u.dot(w) < 0.0) w = -w;
  return 2.0 * std::atan2((u - w).norm(), (u + w).norm());
}

DirectionEstimate estimate_stable_direction(const RotationExtension& F, const FiberedPoint& x, int n) {
  if (!F.torus_base()) throw std::invalid_argument("no stable direction over an expanding circle base");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const std::vector<FiberedPoint> orbit = forward_orbit(F, x, kMaxForward);
  const auto seeds = seeds_near(F, F.v_s(), F.v_u());
  const double expected = -std::log(std::abs(*F.a_s()));
  auto run = [&](int m) -> TangentVector {
    for (const TangentVector& seed : seeds) {
      TangentVector w = seed;
      double logsum = 0.0;
      for (int k = m - 1; k >= 0; --k) {
        w = F.inverse_derivative(orbit[k]) * w;
        const double r = w.norm();
        logsum += std::log(r);
        w /= r;
      }
      if (logsum / m >= 0.5 * expected) return w;
    }
    throw DegenerateSeed("stable seeds failed to grow under the inverse cocycle");
  };
  return doubling(n, kMaxForward, run);
}

DirectionEstimate estimate_unstable_direction(const RotationExtension& F, const Preorbit& pre, int n) {
  if (n < 1 || n > pre.depth()) throw std::invalid_argument("need 1 <= n <= preorbit depth");
  const auto seeds = seeds_near(F, F.v_u(), F.torus_base() ? F.v_s() : Eigen::Vector2d(0.0, 0.0));
  const double expected = std::log(std::abs(F.a_u()));
  auto run = [&](int m) -> TangentVector {
    for (const TangentVector& seed : seeds) {
      TangentVector w = seed;
      double logsum = 0.0;
      for (int k = m; k >= 1; --k) {
        w = F.derivative(pre.at(k)) * w;
        const double r = w.norm();
        logsum += std::log(r);
        w /= r;
      }
      if (logsum / m >= 0.5 * expected) return w;
    }
    throw DegenerateSeed("unstable seeds failed to grow along the preorbit");
  };
  return doubling(n, pre.depth(), run);
}

DirectionEstimate estimate_center_direction(const RotationExtension& F, const FiberedPoint& x,
                                            const Preorbit& pre, int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const std::vector<FiberedPoint> orbit = forward_orbit(F, x, kMaxForward);
  if (!F.torus_base()) {
    auto run = [&](int m) -> TangentVector {
      TangentVector w = embed(F, Eigen::Vector2d(0.3, 0.0), 1.0).normalized();
      for (int k = m - 1; k >= 0; --k) w = (F.inverse_derivative(orbit[k]) * w).normalized();
      return w;
    };
    return doubling(n, kMaxForward, run);
  }
  if (fibered_distance(pre.anchor, F.normalized(x)) > 1e-12) {
    throw std::invalid_argument("preorbit must be anchored at x");
  }
  const int cap = std::min(pre.depth(), kMaxForward);
  auto run = [&](int m) -> TangentVector {
    Frame cu(3, 2), cs(3, 2);
    cu.col(0) = embed(F, F.v_u(), 0.0);
    cu.col(1) = fiber_axis(F);
    cs.col(0) = embed(F, F.v_s(), 0.0);
    cs.col(1) = fiber_axis(F);
    for (int k = m; k >= 1; --k) {
      cu = F.derivative(pre.at(k)) * cu;
      orthonormalize(cu);
    }
    for (int k = m - 1; k >= 0; --k) {
      cs = F.inverse_derivative(orbit[k]) * cs;
      orthonormalize(cs);
    }
    const Eigen::Vector3d ncu = as3(cu.col(0)).cross(as3(cu.col(1)));
    const Eigen::Vector3d ncs = as3(cs.col(0)).cross(as3(cs.col(1)));
    const Eigen::Vector3d c = ncu.cross(ncs);
    if (c.norm() < 1e-12) throw DegenerateSeed("center-stable and center-unstable planes coincide");
    TangentVector out(3);
    out << c.x(), c.y(), c.z();
    return out;
  };
  return doubling(n, cap, run);
}

SplittingEstimate estimate_splitting(const RotationExtension& F, const Preorbit& pre, int n) {
  const Preorbit next = extended_by_anchor(F, pre);
  const FiberedPoint& p = pre.anchor;
  const DerivativeMatrix D = F.derivative(p);
  SplittingEstimate out;
  out.at = p;
  const int nu = std::min(n, pre.depth());
  out.e_u = estimate_unstable_direction(F, pre, nu).direction;
  out.residual_u = angle_between(D * out.e_u.vector(),
                                 estimate_unstable_direction(F, next, nu).direction.vector());
  out.e_c = estimate_center_direction(F, p, pre, nu).direction;
  out.residual_c = angle_between(D * out.e_c.vector(),
                                 estimate_center_direction(F, next.anchor, next, nu).direction.vector());
  if (F.torus_base()) {
    out.e_s = estimate_stable_direction(F, p, n).direction;
    out.residual_s = angle_between(D * out.e_s->vector(),
                                   estimate_stable_direction(F, next.anchor, n).direction.vector());
  }
  return out;
}

LyapunovTriple lyapunov_exponents(const RotationExtension& F, const FiberedPoint& x, long n,
                                  std::uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("lyapunov_exponents needs n >= 1000");
  const int d = F.dim();
  // Exponents do not depend on the norm. Shrinking the fiber-base coupling by
  // a constant conjugation diag(1, .., S) makes the bounded boundary term of
  // the finite-time QR estimate negligible for large bumps.
  const double S = F.bump() ? std::max(1.0, 100.0 * F.bump()->lipschitz()) : 1.0;
  OrbitDriver drive(F, x, seed);
  Frame Q = Frame::Identity(d, d);
  auto step = [&]() {
    DerivativeMatrix D = F.derivative(drive.point());
    D.row(d - 1).head(d - 1) /= S;
    Q = D * Q;
    const auto logs = orthonormalize(Q);
    drive.step();
    return logs;
  };
  for (int i = 0; i < 200; ++i) step();

  constexpr int kBatches = 10;
  std::array<std::array<double, 3>, kBatches> sums{};
  std::array<double, 3> totals{};
  for (int b = 0; b < kBatches; ++b) {
    const long lo = n * b / kBatches, hi = n * (b + 1) / kBatches;
    for (long i = lo; i < hi; ++i) {
      const auto logs = step();
      for (int j = 0; j < d; ++j) sums[b][j] += logs[j];
    }
    for (int j = 0; j < d; ++j) totals[j] += sums[b][j];
  }
  std::array<double, 3> lambda{}, se{};
  for (int j = 0; j < d; ++j) {
    lambda[j] = totals[j] / static_cast<double>(n);
    std::vector<double> means;
    for (int b = 0; b < kBatches; ++b) {
      const long len = n * (b + 1) / kBatches - n * b / kBatches;
      means.push_back(sums[b][j] / static_cast<double>(len));
    }
    se[j] = sample_std(means) / std::sqrt(double(kBatches));
  }
  std::array<int, 3> idx{0, 1, 2};
  std::sort(idx.begin(), idx.begin() + d, [&](int a, int b) { return lambda[a] < lambda[b]; });

  LyapunovTriple t;
  t.iterations = n;
  if (d == 3) {
    t.stable = lambda[idx[0]];
    t.stable_error = se[idx[0]];
  }
  t.center = lambda[idx[d - 2]];
  t.center_error = se[idx[d - 2]];
  t.unstable = lambda[idx[d - 1]];
  t.unstable_error = se[idx[d - 1]];
  return t;
}

double unstable_direction_spread(const RotationExtension& F, const std::vector<Preorbit>& preorbits,
                                 int n) {
  if (preorbits.size() < 2) throw std::invalid_argument("spread needs at least two preorbits");
  std::vector<Direction> dirs;
  for (const Preorbit& p : preorbits) {
    if (fibered_distance(p.anchor, preorbits.front().anchor) > 1e-12) {
      throw std::invalid_argument("preorbits must share their anchor");
    }
    dirs.push_back(estimate_unstable_direction(F, p, std::min(n, p.depth())).direction);
  }
  double spread = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = i + 1; j < dirs.size(); ++j) spread = std::max(spread, angle_between(dirs[i], dirs[j]));
  }
  return spread;
}

MonteCarloEstimate batch_mean(const std::vector<double>& values) {
  MonteCarloEstimate est;
  est.samples = static_cast<int>(values.size());
  if (values.empty()) return est;
  est.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  const std::size_t n = values.size();
  if (n >= 10) {
    std::vector<double> means;
    for (std::size_t b = 0; b < 10; ++b) {
      const std::size_t lo = n * b / 10, hi = n * (b + 1) / 10;
      means.push_back(std::accumulate(values.begin() + lo, values.begin() + hi, 0.0) / (hi - lo));
    }
    est.standard_error = sample_std(means) / std::sqrt(10.0);
  } else {
    est.standard_error = sample_std(values) / std::sqrt(double(n));
  }
  return est;
}

MonteCarloEstimate mean_center_exponent(const RotationExtension& F, int sample_size,
                                        long orbit_length, std::uint64_t seed) {
  if (sample_size < 1 || orbit_length < 1) throw std::invalid_argument("empty Monte-Carlo sample");
  constexpr int kTail = 60;
  std::vector<double> values(static_cast<std::size_t>(sample_size));
  parallel_for(values.size(), [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    const FiberedPoint x = F.random_point(rng);
    OrbitDriver drive(F, x, rng());
    std::vector<FiberedPoint> orbit;
    orbit.reserve(static_cast<std::size_t>(orbit_length + kTail) + 1);
    orbit.push_back(drive.point());
    for (long k = 0; k < orbit_length + kTail; ++k) orbit.push_back(drive.step());

    const int cols = F.torus_base() ? 2 : 1;
    Frame W(F.dim(), cols);
    if (F.torus_base()) {
      W.col(0) = embed(F, F.v_s(), 0.0);
      W.col(1) = fiber_axis(F);
    } else {
      W.col(0) = fiber_axis(F);
    }
    double acc = 0.0;
    for (long k = orbit_length + kTail - 1; k >= 0; --k) {
      W = F.inverse_derivative(orbit[k]) * W;
      orthonormalize(W);
      if (k < orbit_length) {
        Frame image = F.derivative(orbit[k]) * W;
        const auto logs = orthonormalize(image);
        const double log_cs = cols == 2 ? logs[0] + logs[1] : logs[0];
        const double log_s = cols == 2 ? std::log((F.derivative(orbit[k]) * W.col(0)).norm()) : 0.0;
        acc += log_cs - log_s;
      }
    }
    values[i] = acc / static_cast<double>(orbit_length);
  });
  return batch_mean(values);
}

MonteCarloEstimate pesin_entropy_estimate(const RotationExtension& F, int sample_size,
                                          long orbit_length, std::uint64_t seed) {
  if (sample_size < 1) throw std::invalid_argument("empty Monte-Carlo sample");
  std::vector<double> values(static_cast<std::size_t>(sample_size));
  parallel_for(values.size(), [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    const FiberedPoint x = F.random_point(rng);
    const LyapunovTriple t = lyapunov_exponents(F, x, orbit_length, rng());
    double h = 0.0;
    for (double l : {t.stable.value_or(0.0), t.center, t.unstable}) h += std::max(0.0, l);
    values[i] = h;
  });
  return batch_mean(values);
}

bool RateEstimates::certifies_partial_hyperbolicity() const {
  const bool center_gap = gamma1 <= gamma2 && gamma2 < mu && 1.0 < mu;
  if (!nu) return gamma1 > 0.0 && center_gap;
  return 0.0 < *nu && *nu < gamma1 && *nu < 1.0 && center_gap;
}

RateEstimates estimate_rates(const RotationExtension& F, int samples, int n, std::uint64_t seed) {
  if (samples < 1 || n < 1) throw std::invalid_argument("estimate_rates needs samples, n >= 1");
  constexpr int kWarm = 60;
  struct Logs {
    std::vector<double> s, c, u;  // cumulative log growth, index m = steps
  };
  std::vector<Logs> logs(static_cast<std::size_t>(samples));
  const bool torus = F.torus_base();
  parallel_for(logs.size(), [&](std::size_t i) {
    auto rng = stream_rng(seed, i);
    OrbitDriver drive(F, F.random_point(rng), rng());
    const int total = 2 * kWarm + n;
    std::vector<FiberedPoint> orbit{drive.point()};
    for (int k = 0; k < total; ++k) orbit.push_back(drive.step());

    // backward sweep: e_s (first column) and E^cs; forward sweep: e_u and E^cu
    std::vector<TangentVector> es(total + 1), ncs(total + 1), ec(total + 1), eu(total + 1);
    Frame W(F.dim(), torus ? 2 : 1);
    if (torus) {
      W.col(0) = embed(F, F.v_s(), 0.0);
      W.col(1) = fiber_axis(F);
    } else {
      W.col(0) = fiber_axis(F);
    }
    for (int k = total; k >= 0; --k) {
      if (k < total) {
        W = F.inverse_derivative(orbit[k]) * W;
        orthonormalize(W);
      }
      if (torus) {
        es[k] = W.col(0);
        const Eigen::Vector3d nrm = as3(W.col(0)).cross(as3(W.col(1)));
        ncs[k] = TangentVector(3);
        ncs[k] << nrm.x(), nrm.y(), nrm.z();
      } else {
        ec[k] = W.col(0);
      }
    }
    Frame U(F.dim(), torus ? 2 : 1);
    U.col(0) = embed(F, F.v_u(), 0.0);
    if (torus) U.col(1) = fiber_axis(F);
    for (int k = 0; k <= total; ++k) {
      if (k > 0) {
        U = F.derivative(orbit[k - 1]) * U;
        orthonormalize(U);
      }
      eu[k] = U.col(0);
      if (torus) {
        const Eigen::Vector3d ncu = as3(U.col(0)).cross(as3(U.col(1)));
        const Eigen::Vector3d c = ncu.cross(as3(ncs[k])).normalized();
        ec[k] = TangentVector(3);
        ec[k] << c.x(), c.y(), c.z();
      }
    }
    Logs& L = logs[i];
    L.s.assign(n + 1, 0.0);
    L.c.assign(n + 1, 0.0);
    L.u.assign(n + 1, 0.0);
    for (int m = 0; m < n; ++m) {
      const int k = kWarm + m;
      const DerivativeMatrix D = F.derivative(orbit[k]);
      if (torus) L.s[m + 1] = L.s[m] + std::log((D * es[k]).norm());
      L.c[m + 1] = L.c[m] + std::log((D * ec[k]).norm());
      L.u[m + 1] = L.u[m] + std::log((D * eu[k]).norm());
    }
  });

  double log_nu = -std::numeric_limits<double>::infinity();
  double log_mu = std::numeric_limits<double>::infinity();
  double log_g1 = std::numeric_limits<double>::infinity();
  double log_g2 = -std::numeric_limits<double>::infinity();
  for (const Logs& L : logs) {
    if (torus) log_nu = std::max(log_nu, L.s[n] / n);
    log_mu = std::min(log_mu, L.u[n] / n);
    log_g1 = std::min(log_g1, L.c[n] / n);
    log_g2 = std::max(log_g2, L.c[n] / n);
  }
  double log_C = 0.0;
  for (const Logs& L : logs) {
    for (int m = 1; m <= n; ++m) {
      if (torus) log_C = std::max(log_C, L.s[m] - m * log_nu);
      log_C = std::max({log_C, m * log_mu - L.u[m], L.c[m] - m * log_g2, m * log_g1 - L.c[m]});
    }
  }
  RateEstimates r;
  if (torus) r.nu = std::exp(log_nu);
  r.mu = std::exp(log_mu);
  r.gamma1 = std::exp(log_g1);
  r.gamma2 = std::exp(log_g2);
  r.C = std::exp(log_C);
  return r;
}

void write_lyapunov_csv(std::ostream& out,
                        const std::vector<std::pair<FiberedPoint, LyapunovTriple>>& rows) {
  out << "start_x,start_y,start_theta,N,lambda_s,lambda_c,lambda_u,se_s,se_c,se_u,sum\n";
  out << std::setprecision(17);
  for (const auto& [x, t] : rows) {
    out << x.base.x << ',' << x.base.y << ',' << x.theta << ',' << t.iterations << ',';
    if (t.stable) out << *t.stable;
    out << ',' << t.center << ',' << t.unstable << ',';
    if (t.stable_error) out << *t.stable_error;
    out << ',' << t.center_error << ',' << t.unstable_error << ',' << t.sum() << '\n';
  }
}

void write_splitting_csv(std::ostream& out, const std::vector<SplittingEstimate>& rows) {
  out << "x,y,theta,es_0,es_1,es_2,ec_0,ec_1,ec_2,eu_0,eu_1,eu_2,residual_s,residual_c,residual_u\n";
  out << std::setprecision(17);
  auto put = [&](const std::optional<Direction>& d) {
    for (int j = 0; j < 3; ++j) {
      if (d && j < d->vector().size()) out << d->vector()(j);
      out << ',';
    }
  };
  for (const SplittingEstimate& s : rows) {
    out << s.at.base.x << ',' << s.at.base.y << ',' << s.at.theta << ',';
    put(s.e_s);
    put(s.e_c);
    put(s.e_u);
    if (s.residual_s) out << *s.residual_s;
    out << ',' << s.residual_c << ',' << s.residual_u << '\n';
  }
}

}  // namespace skewlab
