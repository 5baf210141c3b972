#include "skewlab/foliations.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "skewlab/errors.hpp"
#include "skewlab/parallel.hpp"

namespace skewlab {
namespace {

void require_torus(const RotationExtension& F) {
  if (!F.torus_base()) throw std::invalid_argument("leaf charts need a torus base");
}

void check_chart(double t) {
  if (!(std::abs(t) < 0.5)) throw LegTooLong("leaf parameter outside the chart (|t| >= 0.5)");
}

double lipschitz(const RotationExtension& F) { return F.bump() ? F.bump()->lipschitz() : 0.0; }

// Coordinates (along v_s, along v_u) of the shortest displacement a -> b.
Eigen::Vector2d eigen_coordinates(const RotationExtension& F, const TorusPoint2& a, const TorusPoint2& b) {
  Eigen::Matrix2d basis;
  basis.col(0) = F.v_s();
  basis.col(1) = F.v_u();
  return basis.inverse() * displacement(a, b);
}

// Forward base orbit computed exactly on the 2^-64 grid. Double iteration
// loses the orbit after ~30 steps and the stable offset is only Holder along
// v_u, so rounding there would shift the offset by ~1e-8.
std::vector<TorusPoint2> exact_forward_orbit(const RotationExtension& F, const TorusPoint2& p, int n) {
  const auto& m = std::get<LinearToralEndomorphism>(F.base_map()).entries();
  const long double scale = 18446744073709551616.0L;  // 2^64
  auto to_fixed = [&](double v) {
    const long double s = std::nearbyint(static_cast<long double>(v) * scale);
    return s >= scale ? std::uint64_t{0} : static_cast<std::uint64_t>(s);
  };
  auto to_double = [&](std::uint64_t k) { return wrap01(static_cast<double>(static_cast<long double>(k) / scale)); };
  std::array<std::uint64_t, 4> a{};
  for (int i = 0; i < 4; ++i) a[i] = static_cast<std::uint64_t>(m[i]);
  std::uint64_t x = to_fixed(p.x), y = to_fixed(p.y);
  std::vector<TorusPoint2> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    out.push_back(k == 0 ? p : TorusPoint2{to_double(x), to_double(y)});
    const std::uint64_t nx = a[0] * x + a[1] * y, ny = a[2] * x + a[3] * y;
    x = nx;
    y = ny;
  }
  return out;
}

int nearest_branch(const RotationExtension& F, const FiberedPoint& image, const TorusPoint2& q) {
  const auto cands = F.base_preimages(image.base);
  int best = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < cands.size(); ++j) {
    const double d = torus_distance(cands[j], q);
    if (d < dmin) {
      dmin = d;
      best = static_cast<int>(j);
    }
  }
  return best;
}

}  // namespace

StableLeafChart::StableLeafChart(const RotationExtension& F, const FiberedPoint& anchor, int depth)
    : F_(&F), anchor_(F.normalized(anchor)), depth_(depth) {
  require_torus(F);
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  orbit_ = exact_forward_orbit(F, anchor_.base, depth);
  scale_.reserve(depth);
  double a = 1.0;
  for (int k = 0; k < depth; ++k) {
    scale_.push_back(a);
    a *= *F.a_s();
  }
}

TorusPoint2 StableLeafChart::base_at(double t) const {
  check_chart(t);
  return translate(anchor_.base, t * F_->v_s());
}

double StableLeafChart::offset(double t0, double t1) const {
  check_chart(t0);
  check_chart(t1);
  if (!F_->bump() || t0 == t1) return 0.0;
  const Eigen::Vector2d& v = F_->v_s();
  double sum = 0.0;
  for (int k = 0; k < depth_; ++k) {
    sum += F_->phi(translate(orbit_[k], t0 * scale_[k] * v)) -
           F_->phi(translate(orbit_[k], t1 * scale_[k] * v));
  }
  return sum;
}

FiberedPoint StableLeafChart::at(double t) const {
  return {base_at(t), wrap01(anchor_.theta + offset(0.0, t))};
}

double StableLeafChart::tail_bound(double t0, double t1) const {
  const double as = std::abs(*F_->a_s());
  return lipschitz(*F_) * std::abs(t1 - t0) * std::pow(as, depth_) / (1.0 - as);
}

UnstableLeafChart::UnstableLeafChart(const RotationExtension& F, Preorbit anchor, int depth)
    : F_(&F), pre_(std::move(anchor)), depth_(depth) {
  require_torus(F);
  if (depth < 1 || depth > pre_.depth()) throw std::invalid_argument("need 1 <= depth <= preorbit depth");
  scale_.assign(depth + 1, 1.0);
  for (int k = 1; k <= depth; ++k) scale_[k] = scale_[k - 1] / F.a_u();
}

TorusPoint2 UnstableLeafChart::base_at(double t) const {
  check_chart(t);
  return translate(pre_.anchor.base, t * F_->v_u());
}

double UnstableLeafChart::offset(double t0, double t1) const {
  check_chart(t0);
  check_chart(t1);
  if (!F_->bump() || t0 == t1) return 0.0;
  const Eigen::Vector2d& v = F_->v_u();
  double sum = 0.0;
  for (int k = 1; k <= depth_; ++k) {
    const TorusPoint2& x = pre_.at(k).base;
    sum += F_->phi(translate(x, t1 * scale_[k] * v)) - F_->phi(translate(x, t0 * scale_[k] * v));
  }
  return sum;
}

FiberedPoint UnstableLeafChart::at(double t) const {
  return {base_at(t), wrap01(pre_.anchor.theta + offset(0.0, t))};
}

Preorbit UnstableLeafChart::preorbit_at(double t) const {
  Preorbit out;
  out.anchor = at(t);
  FiberedPoint cur = out.anchor;
  for (int k = 1; k <= depth_; ++k) {
    FiberedPoint y;
    y.base = translate(pre_.at(k).base, t * scale_[k] * F_->v_u());
    y.theta = wrap01(cur.theta - F_->phi(y.base));
    out.branches.push_back(nearest_branch(*F_, cur, y.base));
    out.points.push_back(y);
    cur = y;
  }
  return out;
}

double UnstableLeafChart::tail_bound(double t0, double t1) const {
  const double au = std::abs(F_->a_u());
  return lipschitz(*F_) * std::abs(t1 - t0) * std::pow(au, -depth_) / (au - 1.0);
}

OffsetResult stable_fiber_offset(const RotationExtension& F, const FiberedPoint& x,
                                 const TorusPoint2& x_base_prime, int depth) {
  require_torus(F);
  const Eigen::Vector2d c = eigen_coordinates(F, x.base, x_base_prime);
  if (std::abs(c.y()) > 1e-9) throw std::invalid_argument("point is not on the stable line");
  check_chart(c.x());
  StableLeafChart chart(F, x, depth);
  return {chart.offset(0.0, c.x()), chart.tail_bound(0.0, c.x())};
}

OffsetResult unstable_fiber_offset(const RotationExtension& F, const Preorbit& pre,
                                   const TorusPoint2& x_base_prime, int depth) {
  require_torus(F);
  if (depth < 1 || depth > pre.depth()) throw std::invalid_argument("need 1 <= depth <= preorbit depth");
  const Eigen::Vector2d c = eigen_coordinates(F, pre.anchor.base, x_base_prime);
  if (std::abs(c.x()) > 1e-9) throw std::invalid_argument("point is not on the unstable line");
  check_chart(c.y());
  OffsetResult r;
  if (F.bump() && c.y() != 0.0) {
    const Preorbit shadow = shadow_preorbit(F, pre, {x_base_prime, pre.anchor.theta});
    for (int k = 1; k <= depth; ++k) r.value += F.phi(shadow.at(k).base) - F.phi(pre.at(k).base);
  }
  const double au = std::abs(F.a_u());
  r.tail_bound = lipschitz(F) * std::abs(c.y()) * std::pow(au, -depth) / (au - 1.0);
  return r;
}

HolonomyChart::HolonomyChart(const RotationExtension& F, const FiberedPoint& corner,
                             PreorbitPolicy u_policy, int depth)
    : F_(&F), corner_(F.normalized(corner)), policy_(std::move(u_policy)), depth_(depth) {
  require_torus(F);
}

TorusPoint2 HolonomyChart::point(double tau, double sigma) const {
  return translate(corner_.base, tau * F_->v_u() + sigma * F_->v_s());
}

const UnstableLeafChart& HolonomyChart::u_line(double sigma) const {
  auto it = u_lines_.find(sigma);
  if (it == u_lines_.end()) {
    check_chart(sigma);
    const FiberedPoint anchor{translate(corner_.base, sigma * F_->v_s()), corner_.theta};
    it = u_lines_.emplace(sigma, UnstableLeafChart(*F_, sample_preorbit(*F_, anchor, depth_, policy_), depth_))
             .first;
  }
  return it->second;
}

const StableLeafChart& HolonomyChart::s_line(double tau) const {
  auto it = s_lines_.find(tau);
  if (it == s_lines_.end()) {
    check_chart(tau);
    const FiberedPoint anchor{translate(corner_.base, tau * F_->v_u()), corner_.theta};
    it = s_lines_.emplace(tau, StableLeafChart(*F_, anchor, depth_)).first;
  }
  return it->second;
}

double HolonomyChart::u_leg(double sigma, double tau_from, double tau_to) const {
  return u_line(sigma).offset(tau_from, tau_to);
}

double HolonomyChart::s_leg(double tau, double sigma_from, double sigma_to) const {
  return s_line(tau).offset(sigma_from, sigma_to);
}

double HolonomyChart::holonomy(double tau0, double sigma0, double t, double s) const {
  const double tau1 = tau0 + t, sigma1 = sigma0 + s;
  return u_leg(sigma0, tau0, tau1) + s_leg(tau1, sigma0, sigma1) + u_leg(sigma1, tau1, tau0) +
         s_leg(tau0, sigma1, sigma0);
}

PreorbitPolicy default_u_policy(const RotationExtension& F, const FiberedPoint& anchor,
                                std::uint64_t seed) {
  const StayOutsidePolicy so = stay_outside_support(F);
  try {
    sample_preorbit(F, anchor, kLeafDepth, so);
    return so;
  } catch (const PolicyInfeasible&) {
    return UniformRandomPolicy{seed};
  }
}

double quadrilateral_holonomy(const RotationExtension& F, const QuadrilateralSpec& q) {
  require_torus(F);
  check_chart(q.t);
  check_chart(q.s);
  const PreorbitPolicy policy = q.u_policy ? *q.u_policy : default_u_policy(F, q.corner);
  HolonomyChart chart(F, q.corner, policy, q.depth);
  const double h = chart.holonomy(0.0, 0.0, q.t, q.s);
  return q.reversed ? -h : h;
}

double integrability_defect(const RotationExtension& F, const FiberedPoint& x,
                            const std::vector<std::pair<double, double>>& scales,
                            std::optional<PreorbitPolicy> u_policy) {
  const PreorbitPolicy policy = u_policy ? *u_policy : default_u_policy(F, x);
  std::vector<double> h(scales.size());
  parallel_for(scales.size(), [&](std::size_t i) {
    QuadrilateralSpec q;
    q.corner = x;
    q.t = scales[i].first;
    q.s = scales[i].second;
    q.u_policy = policy;
    h[i] = std::abs(quadrilateral_holonomy(F, q));
  });
  double worst = 0.0;
  for (double v : h) worst = std::max(worst, v);
  return worst;
}

namespace {

// Appends one leg along a chart line of `chart` and returns its end point.
class PathBuilder {
 public:
  PathBuilder(const RotationExtension& F, SuPath& path, const SuPathOptions& opt)
      : F_(F), path_(path), opt_(opt) {}

  FiberedPoint current() const { return path_.endpoint(); }

  void u_piece(double len) {
    const FiberedPoint cur = current();
    Preorbit pre = sample_preorbit(F_, cur, opt_.depth, default_u_policy(F_, cur, opt_.seed));
    UnstableLeafChart chart(F_, pre, opt_.depth);
    push(LegKind::unstable, cur, cur, 0.0, len, chart.base_at(len), chart.offset(0.0, len), std::move(pre));
  }

  void s_piece(double len) {
    const FiberedPoint cur = current();
    StableLeafChart chart(F_, cur, opt_.depth);
    push(LegKind::stable, cur, cur, 0.0, len, chart.base_at(len), chart.offset(0.0, len), std::nullopt);
  }

  void loop(const PreorbitPolicy& policy, double t, double s, bool reversed) {
    const HolonomyChart chart(F_, current(), policy, opt_.depth);
    auto u = [&](double sigma, double from, double to) {
      const UnstableLeafChart& line = chart.u_line(sigma);
      const FiberedPoint cur = current();
      const double delta = wrap_half(cur.theta - line.offset(0.0, from) - line.anchor().theta);
      Preorbit pre = line.preorbit();
      pre.anchor = vertical_rotate(delta, pre.anchor);
      for (auto& p : pre.points) p = vertical_rotate(delta, p);
      const FiberedPoint anchor = pre.anchor;
      push(LegKind::unstable, cur, anchor, from, to, line.base_at(to), line.offset(from, to), std::move(pre));
    };
    auto st = [&](double tau, double from, double to) {
      const StableLeafChart& line = chart.s_line(tau);
      const FiberedPoint cur = current();
      const FiberedPoint anchor =
          vertical_rotate(wrap_half(cur.theta - line.offset(0.0, from) - line.anchor().theta), line.anchor());
      push(LegKind::stable, cur, anchor, from, to, line.base_at(to), line.offset(from, to), std::nullopt);
    };
    if (!reversed) {
      u(0.0, 0.0, t);
      st(t, 0.0, s);
      u(s, t, 0.0);
      st(0.0, s, 0.0);
    } else {
      st(0.0, 0.0, s);
      u(s, 0.0, t);
      st(t, s, 0.0);
      u(0.0, t, 0.0);
    }
  }

 private:
  void push(LegKind kind, const FiberedPoint& start, const FiberedPoint& anchor, double t0, double t1,
            const TorusPoint2& end_base, double dtheta, std::optional<Preorbit> pre) {
    SuLeg leg;
    leg.kind = kind;
    leg.start = start;
    leg.anchor = anchor;
    leg.t_start = t0;
    leg.t_end = t1;
    leg.end = {end_base, wrap01(start.theta + dtheta)};
    leg.preorbit = std::move(pre);
    path_.legs.push_back(std::move(leg));
  }

  const RotationExtension& F_;
  SuPath& path_;
  const SuPathOptions& opt_;
};

}  // namespace

SuPath build_su_path(const RotationExtension& F, const FiberedPoint& from, const FiberedPoint& to,
                     double tol, const SuPathOptions& opt) {
  require_torus(F);
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  SuPath path;
  path.from = F.normalized(from);
  path.to = F.normalized(to);
  if (path.from == path.to) return path;

  Eigen::Matrix2d basis;
  basis.col(0) = F.v_u();
  basis.col(1) = F.v_s();
  const Eigen::Matrix2d inv = basis.inverse();
  const Eigen::Vector2d D = displacement(path.from.base, path.to.base);
  Eigen::Vector2d best(0.0, 0.0);
  double best_len = std::numeric_limits<double>::infinity();
  for (int mx = -1; mx <= 1; ++mx) {
    for (int my = -1; my <= 1; ++my) {
      const Eigen::Vector2d c = inv * (D + Eigen::Vector2d(mx, my));
      const double len = std::abs(c.x()) + std::abs(c.y());
      if (len < best_len) {
        best_len = len;
        best = c;
      }
    }
  }

  PathBuilder builder(F, path, opt);
  auto split = [&](double total, auto piece) {
    if (total == 0.0) return;
    const int n = static_cast<int>(std::ceil(std::abs(total) / opt.max_leg));
    for (int i = 0; i < n; ++i) piece(total / n);
  };
  split(best.x(), [&](double len) { builder.u_piece(len); });
  split(best.y(), [&](double len) { builder.s_piece(len); });

  auto error = [&]() { return wrap_half(path.to.theta - builder.current().theta); };
  double e = error();
  int it = 0;
  while (std::abs(e) >= tol) {
    if (it >= opt.max_iterations) {
      throw NotAccessibleNumerically("holonomy shooting did not converge", std::abs(e));
    }
    ++it;
    const FiberedPoint corner = builder.current();
    const PreorbitPolicy policy = default_u_policy(F, corner, opt.seed);
    auto h_at = [&](double lam) {
      HolonomyChart chart(F, corner, policy, opt.depth);
      return chart.holonomy(0.0, 0.0, lam * opt.loop_t, lam * opt.loop_s);
    };
    const int m = opt.bracket_scales;
    std::vector<double> lam(m + 1, 0.0), h(m + 1, 0.0);
    for (int j = 1; j <= m; ++j) {
      lam[j] = static_cast<double>(j) / m;
      h[j] = h_at(lam[j]);
    }

    bool done = false;
    for (int sgn : {1, -1}) {
      for (int j = 1; j <= m && !done; ++j) {
        const double g0 = sgn * h[j - 1] - e, g1 = sgn * h[j] - e;
        if (g0 * g1 > 0.0) continue;
        double lo = lam[j - 1], hi = lam[j], glo = g0;
        for (int b = 0; b < 60; ++b) {
          const double mid = 0.5 * (lo + hi);
          const double g = sgn * h_at(mid) - e;
          if ((g <= 0.0) == (glo <= 0.0)) {
            lo = mid;
            glo = g;
          } else {
            hi = mid;
          }
        }
        const double root = 0.5 * (lo + hi);
        builder.loop(policy, root * opt.loop_t, root * opt.loop_s, sgn < 0);
        done = true;
      }
      if (done) break;
    }
    if (!done) {
      int jbest = 0, sbest = 1;
      double hbest = 0.0;
      for (int j = 1; j <= m; ++j) {
        for (int sgn : {1, -1}) {
          const double v = sgn * h[j];
          if (v * e > 0.0 && std::abs(v) > hbest) {
            hbest = std::abs(v);
            jbest = j;
            sbest = sgn;
          }
        }
      }
      if (hbest < 1e-15) {
        throw NotAccessibleNumerically("holonomy vanishes on every probed loop", std::abs(e));
      }
      const long copies = std::max(1L, static_cast<long>(std::floor(std::abs(e) / hbest)));
      for (long c = 0; c < copies; ++c) {
        builder.loop(policy, lam[jbest] * opt.loop_t, lam[jbest] * opt.loop_s, sbest < 0);
      }
    }
    e = error();
  }
  path.fiber_error = std::abs(e);
  path.shooting_iterations = it;
  return path;
}

double verify_su_path(const RotationExtension& F, const SuPath& path) {
  double worst = 0.0;
  FiberedPoint prev = path.from;
  for (const SuLeg& leg : path.legs) {
    worst = std::max(worst, fibered_distance(prev, leg.start));
    for (const auto& [t, p] : {std::pair{leg.t_start, leg.start}, std::pair{leg.t_end, leg.end}}) {
      FiberedPoint q;
      if (leg.kind == LegKind::stable) {
        q.base = translate(leg.anchor.base, t * F.v_s());
        q.theta = wrap01(leg.anchor.theta + stable_fiber_offset(F, leg.anchor, q.base).value);
      } else {
        q.base = translate(leg.anchor.base, t * F.v_u());
        q.theta = wrap01(leg.anchor.theta + unstable_fiber_offset(F, *leg.preorbit, q.base).value);
        worst = std::max(worst, fibered_distance(leg.preorbit->anchor, leg.anchor));
        worst = std::max(worst, preorbit_residual(F, *leg.preorbit));
      }
      worst = std::max(worst, fibered_distance(p, q));
    }
    prev = leg.end;
  }
  return worst;
}

double leaf_density_radius(const RotationExtension& F, const FiberedPoint& x, double L, int G) {
  require_torus(F);
  if (!(L > 0.0) || G < 1) throw std::invalid_argument("need L > 0 and G >= 1");
  constexpr double kStep = 0.01;
  constexpr int kPerChart = 40;  // re-anchor every 0.4
  const double half = 0.5 * L;

  std::vector<std::array<double, 3>> samples;
  samples.reserve(static_cast<std::size_t>(L / kStep) + 2);
  auto add = [&](const FiberedPoint& p) { samples.push_back({p.base.x, p.base.y, p.theta}); };
  add(F.normalized(x));
  for (double dir : {1.0, -1.0}) {
    FiberedPoint anchor = F.normalized(x);
    for (long j = 0;; ++j) {
      const StableLeafChart chart(F, anchor, kLeafDepth);
      bool stop = false;
      for (int i = 1; i <= kPerChart; ++i) {
        const double global = (j * kPerChart + i) * kStep;
        if (global > half) {
          stop = true;
          break;
        }
        const FiberedPoint p = chart.at(dir * i * kStep);
        add(p);
        if (i == kPerChart) anchor = p;
      }
      if (stop) break;
    }
  }

  // bins of width 1/B per axis, B = 2G
  const int B = 2 * G;
  auto bin_of = [B](double v) { return std::min(B - 1, static_cast<int>(v * B)); };
  auto flat = [B](int i, int j, int k) { return (static_cast<std::size_t>(i) * B + j) * B + k; };
  std::vector<std::size_t> start(static_cast<std::size_t>(B) * B * B + 1, 0);
  for (const auto& s : samples) ++start[flat(bin_of(s[0]), bin_of(s[1]), bin_of(s[2])) + 1];
  for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  std::vector<std::array<double, 3>> sorted(samples.size());
  for (const auto& s : samples) sorted[fill[flat(bin_of(s[0]), bin_of(s[1]), bin_of(s[2]))]++] = s;

  auto wrap_bin = [B](int i) { return ((i % B) + B) % B; };
  // per-bin bounding boxes of the stored samples
  const std::size_t bins = start.size() - 1;
  std::vector<std::array<double, 3>> lo(bins), hi(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    if (start[b] == start[b + 1]) continue;
    lo[b] = hi[b] = sorted[start[b]];
    for (std::size_t s = start[b] + 1; s < start[b + 1]; ++s) {
      for (int a = 0; a < 3; ++a) {
        lo[b][a] = std::min(lo[b][a], sorted[s][a]);
        hi[b][a] = std::max(hi[b][a], sorted[s][a]);
      }
    }
  }
  auto box_gap = [&](const std::array<double, 3>& c, std::size_t b) {
    double gap = 0.0;
    for (int a = 0; a < 3; ++a) {
      if (c[a] < lo[b][a] || c[a] > hi[b][a]) {
        gap = std::max(gap, std::min(circle_distance(c[a], lo[b][a]), circle_distance(c[a], hi[b][a])));
      }
    }
    return gap;
  };
  std::vector<double> radius(static_cast<std::size_t>(G) * G * G);
  parallel_for(radius.size(), [&](std::size_t cell) {
    const int ci = static_cast<int>(cell / (G * G)), cj = static_cast<int>((cell / G) % G),
              ck = static_cast<int>(cell % G);
    const std::array<double, 3> c{(ci + 0.5) / G, (cj + 0.5) / G, (ck + 0.5) / G};
    const int bi = bin_of(c[0]), bj = bin_of(c[1]), bk = bin_of(c[2]);
    double best = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= B / 2; ++ring) {
      for (int di = -ring; di <= ring; ++di) {
        for (int dj = -ring; dj <= ring; ++dj) {
          for (int dk = -ring; dk <= ring; ++dk) {
            if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != ring) continue;
            const std::size_t b = flat(wrap_bin(bi + di), wrap_bin(bj + dj), wrap_bin(bk + dk));
            if (start[b] == start[b + 1] || box_gap(c, b) >= best) continue;
            for (std::size_t s = start[b]; s < start[b + 1]; ++s) {
              const auto& p = sorted[s];
              const double d = std::max({circle_distance(c[0], p[0]), circle_distance(c[1], p[1]),
                                         circle_distance(c[2], p[2])});
              best = std::min(best, d);
            }
          }
        }
      }
      if (best <= static_cast<double>(ring) / B) break;
    }
    radius[cell] = best;
  });
  return *std::max_element(radius.begin(), radius.end());
}

void write_holonomy_csv(std::ostream& out, const std::vector<HolonomySample>& rows) {
  out << "t,s,dtheta\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.t << ',' << r.s << ',' << r.dtheta << '\n';
}

void write_su_path_csv(std::ostream& out, const SuPath& path) {
  out << "leg,kind,start_x,start_y,start_theta,end_x,end_y,end_theta,itinerary\n" << std::setprecision(17);
  for (std::size_t i = 0; i < path.legs.size(); ++i) {
    const SuLeg& l = path.legs[i];
    out << i << ',' << (l.kind == LegKind::stable ? 's' : 'u') << ',' << l.start.base.x << ','
        << l.start.base.y << ',' << l.start.theta << ',' << l.end.base.x << ',' << l.end.base.y << ','
        << l.end.theta << ',' << (l.preorbit ? l.preorbit->itinerary() : std::string()) << '\n';
  }
}

}  // namespace skewlab
