#include "skewlab/ergodic.hpp"

#include <algorithm>
#include <climits>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "skewlab/bundles.hpp"
#include "skewlab/errors.hpp"
#include "skewlab/foliations.hpp"
#include "skewlab/parallel.hpp"

namespace skewlab {

double evaluate(Observable psi, const FiberedPoint& p) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  switch (psi) {
    case Observable::one:
      return 1.0;
    case Observable::cos_theta:
      return std::cos(two_pi * p.theta);
    case Observable::sin_theta:
      return std::sin(two_pi * p.theta);
    case Observable::cos_x:
      return std::cos(two_pi * p.base.x);
    case Observable::cos_x_plus_theta:
      return std::cos(two_pi * (p.base.x + p.theta));
  }
  return 0.0;
}

double space_average(Observable psi) { return psi == Observable::one ? 1.0 : 0.0; }

std::string_view observable_name(Observable psi) {
  switch (psi) {
    case Observable::one:
      return "one";
    case Observable::cos_theta:
      return "cos_theta";
    case Observable::sin_theta:
      return "sin_theta";
    case Observable::cos_x:
      return "cos_x";
    case Observable::cos_x_plus_theta:
      return "cos_x_plus_theta";
  }
  return "?";
}

Observable parse_observable(std::string_view name) {
  for (Observable o : {Observable::one, Observable::cos_theta, Observable::sin_theta, Observable::cos_x,
                       Observable::cos_x_plus_theta}) {
    if (observable_name(o) == name) return o;
  }
  throw std::invalid_argument("unknown observable '" + std::string(name) + "'");
}

double birkhoff_average(const RotationExtension& F, Observable psi, const FiberedPoint& start, long N,
                        std::uint64_t dither_seed) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  OrbitDriver drive(F, start, dither_seed);
  double sum = 0.0;
  for (long j = 0; j < N; ++j) {
    sum += evaluate(psi, drive.point());
    if (j + 1 < N) drive.step();
  }
  return sum / static_cast<double>(N);
}

BirkhoffReport birkhoff_dispersion(const RotationExtension& F, Observable psi, int starts, long N,
                                   std::uint64_t seed) {
  if (starts < 2) throw std::invalid_argument("need at least two starts");
  BirkhoffReport r;
  r.observable = psi;
  r.N = N;
  r.seed = seed;
  r.starts.resize(starts);
  r.averages.resize(starts);
  parallel_for(static_cast<std::size_t>(starts), [&](std::size_t i) {
    auto g = stream_rng(seed, i);
    r.starts[i] = F.random_point(g);
    r.averages[i] = birkhoff_average(F, psi, r.starts[i], N, g());
  });
  r.mean = std::accumulate(r.averages.begin(), r.averages.end(), 0.0) / starts;
  double ss = 0.0;
  for (double a : r.averages) ss += (a - r.mean) * (a - r.mean);
  r.dispersion = std::sqrt(ss / (starts - 1));
  return r;
}

TransitivityReport box_transitivity(const RotationExtension& F, const FiberedPoint& center, double eps,
                                    int G, long N, int cloud_size, std::uint64_t seed) {
  if (G < 2 || !(eps > 0.0) || N < 0 || cloud_size < 1) {
    throw std::invalid_argument("need G >= 2, eps > 0, N >= 0, cloud_size >= 1");
  }
  const bool torus = F.torus_base();
  const std::size_t boxes = static_cast<std::size_t>(G) * G * (torus ? G : 1);
  auto box_of = [&](const FiberedPoint& p) {
    auto idx = [G](double v) { return std::min(G - 1, static_cast<int>(v * G)); };
    std::size_t b = idx(p.base.x);
    if (torus) b = b * G + idx(p.base.y);
    return b * G + idx(p.theta);
  };

  // first visit step per box, merged by min so the result does not depend on
  // the partition into chunks
  constexpr std::size_t kChunks = 16;
  const std::size_t chunks = std::min<std::size_t>(kChunks, cloud_size);
  std::vector<std::vector<long>> first(chunks, std::vector<long>(boxes, LONG_MAX));
  parallel_for(chunks, [&](std::size_t c) {
    auto& mine = first[c];
    const std::size_t lo = cloud_size * c / chunks, hi = cloud_size * (c + 1) / chunks;
    for (std::size_t i = lo; i < hi; ++i) {
      auto g = stream_rng(seed, i);
      FiberedPoint p = center;
      p.base.x += eps * (2.0 * uniform01(g) - 1.0);
      if (torus) p.base.y += eps * (2.0 * uniform01(g) - 1.0);
      p.theta += eps * (2.0 * uniform01(g) - 1.0);
      OrbitDriver drive(F, p, g());
      for (long n = 0; n <= N; ++n) {
        long& slot = mine[box_of(drive.point())];
        slot = std::min(slot, n);
        if (n < N) drive.step();
      }
    }
  });
  std::vector<long> merged(boxes, LONG_MAX);
  for (const auto& v : first) {
    for (std::size_t b = 0; b < boxes; ++b) merged[b] = std::min(merged[b], v[b]);
  }
  std::vector<long> times;
  for (long t : merged) {
    if (t != LONG_MAX) times.push_back(t);
  }
  std::sort(times.begin(), times.end());

  TransitivityReport r;
  r.G = G;
  r.N = N;
  r.epsilon = eps;
  r.cloud_size = cloud_size;
  std::vector<long> marks{0};
  for (long m = 1; m < N; m *= 10) {
    for (long k : {1L, 2L, 5L}) {
      if (k * m < N) marks.push_back(k * m);
    }
  }
  if (N > 0) marks.push_back(N);
  for (long m : marks) {
    const auto visited = std::upper_bound(times.begin(), times.end(), m) - times.begin();
    r.checkpoints.emplace_back(m, static_cast<double>(visited) / boxes);
  }
  r.fraction = r.checkpoints.back().second;
  return r;
}

namespace {

// log J^u at x_{-1}, ..., x_{-K}
std::vector<double> log_unstable_jacobians(const RotationExtension& F, const Preorbit& pre, int K) {
  TangentVector w(F.dim());
  if (F.torus_base()) {
    w << F.v_u().x(), F.v_u().y(), 0.0;
  } else {
    w << 1.0, 0.0;
  }
  std::vector<double> out(K + 1, 0.0);
  for (int k = pre.depth(); k >= 1; --k) {
    const TangentVector image = F.derivative(pre.at(k)) * w;
    const double r = image.norm();
    if (k <= K) out[k] = std::log(r);
    w = image / r;
  }
  return out;
}

}  // namespace

DeltaU srb_delta_u(const RotationExtension& F, const Preorbit& x, const Preorbit& y, int K) {
  if (K < 1 || K > x.depth() || K > y.depth()) throw std::invalid_argument("need 1 <= K <= depth");
  DeltaU d;
  if (!F.bump()) return d;  // constant unstable Jacobian
  const auto lx = log_unstable_jacobians(F, x, K);
  const auto ly = log_unstable_jacobians(F, y, K);
  for (int k = 1; k <= K; ++k) d.log_value += lx[k] - ly[k];
  d.value = std::exp(d.log_value);
  const double dist = torus_distance(x.anchor.base, y.anchor.base);
  const double au = std::abs(F.a_u());
  const double lip = F.bump()->hessian_bound() + F.bump()->lipschitz() * F.bump()->lipschitz();
  d.log_tail_bound = lip * dist * std::pow(au, -K) / (au - 1.0);
  return d;
}

SrbLeafDensity srb_density(const RotationExtension& F, const Preorbit& anchor, double half_length,
                           int quad_points) {
  if (quad_points < 2) throw std::invalid_argument("need at least two quadrature points");
  if (!(half_length > 0.0) || !(half_length < 0.5)) throw LegTooLong("half_length must lie in (0, 0.5)");
  const UnstableLeafChart chart(F, anchor, anchor.depth());
  const int n = quad_points;
  SrbLeafDensity d;
  d.t.resize(n);
  d.delta_u.resize(n);
  d.rho.resize(n);
  const double h = 2.0 * half_length / (n - 1);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    d.t[i] = -half_length + h * static_cast<double>(i);
    const FiberedPoint y = {chart.base_at(d.t[i]), anchor.anchor.theta};
    const Preorbit shadow = shadow_preorbit(F, anchor, y);
    d.delta_u[i] = srb_delta_u(F, anchor, shadow, anchor.depth()).value;
  });
  auto trapezoid = [&](const std::vector<double>& f) {
    double s = 0.5 * (f.front() + f.back());
    for (int i = 1; i + 1 < n; ++i) s += f[i];
    return s * h;
  };
  d.normalization = trapezoid(d.delta_u);
  for (int i = 0; i < n; ++i) d.rho[i] = d.delta_u[i] / d.normalization;
  d.integral = trapezoid(d.rho);
  const auto [lo, hi] = std::minmax_element(d.rho.begin(), d.rho.end());
  d.deviation = *hi / *lo - 1.0;
  return d;
}

void write_birkhoff_csv(std::ostream& out, const BirkhoffReport& r) {
  out << "start_x,start_y,start_theta,N,average\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.starts.size(); ++i) {
    const FiberedPoint& p = r.starts[i];
    out << p.base.x << ',' << p.base.y << ',' << p.theta << ',' << r.N << ',' << r.averages[i] << '\n';
  }
}

void write_transitivity_csv(std::ostream& out, const TransitivityReport& r) {
  out << "N,fraction\n" << std::setprecision(17);
  for (const auto& [n, f] : r.checkpoints) out << n << ',' << f << '\n';
}

void write_srb_csv(std::ostream& out, const SrbLeafDensity& d) {
  out << "t,delta_u,rho\n" << std::setprecision(17);
  for (std::size_t i = 0; i < d.t.size(); ++i) out << d.t[i] << ',' << d.delta_u[i] << ',' << d.rho[i] << '\n';
}

}  // namespace skewlab
