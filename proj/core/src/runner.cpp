#include "skewlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numbers>
#include <optional>
#include <sstream>

#include "skewlab/bundles.hpp"
#include "skewlab/ergodic.hpp"
#include "skewlab/errors.hpp"
#include "skewlab/foliations.hpp"
#include "skewlab/orbit_space.hpp"
#include "skewlab/parallel.hpp"
#include "skewlab/rng.hpp"

namespace skewlab {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

class Experiment {
 public:
  Experiment(const ExperimentConfig& cfg, fs::path dir, ExperimentResult& r)
      : cfg_(cfg), dir_(std::move(dir)), r_(r) {}

  const ExperimentConfig& cfg() const { return cfg_; }

  // measured <= config[key]
  void at_most(const std::string& label, double measured, const std::string& key) {
    record(label, measured, "<=", key, measured <= cfg_.number(key));
  }
  void at_least(const std::string& label, double measured, const std::string& key) {
    record(label, measured, ">=", key, measured >= cfg_.number(key));
  }
  void holds(const std::string& label, bool ok) {
    r_.checks.push_back(label + ": " + (ok ? "ok" : "FAIL"));
    if (!ok) r_.verdict = Verdict::fail;
  }

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name);
    if (!out) throw Error("cannot write " + (dir_ / name).string());
    r_.files.push_back(name);
    return out;
  }

  void note(const std::string& text) {
    if (!r_.note.empty()) r_.note += "; ";
    r_.note += text;
  }

 private:
  void record(const std::string& label, double measured, const char* op, const std::string& key,
              bool ok) {
    r_.checks.push_back(label + " = " + fmt(measured) + " " + op + " " + cfg_.text(key) + " (" + key +
                        "): " + (ok ? "ok" : "FAIL"));
    if (!ok) r_.verdict = Verdict::fail;
  }

  const ExperimentConfig& cfg_;
  fs::path dir_;
  ExperimentResult& r_;
};

std::uint64_t experiment_seed(const ExperimentConfig& cfg, std::uint64_t salt) {
  return cfg.seed() ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
}

// Three entries are (x, y, theta). Two entries are (x, y) over a torus and
// (x, theta) over a circle.
FiberedPoint config_point(const RotationExtension& F, const ExperimentConfig& cfg, const std::string& key) {
  const std::vector<double> v = cfg.numbers(key);
  FiberedPoint p;
  if (v.size() == 3) {
    p = {{v[0], F.torus_base() ? v[1] : 0.0}, v[2]};
  } else if (F.torus_base()) {
    p = {{v[0], v[1]}, 0.0};
  } else {
    p = {{v[0], 0.0}, v[1]};
  }
  return F.normalized(p);
}

bool require_torus(const RotationExtension& F, ExperimentResult& r) {
  if (F.torus_base()) return true;
  r.verdict = Verdict::not_applicable;
  r.note = "needs a stable direction; the configured base is an expanding circle map";
  return false;
}

void run_exponents(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const int starts = static_cast<int>(cfg.integer("exponents.starts"));
  const long n = cfg.integer("exponents.iterations");
  const std::uint64_t seed = experiment_seed(cfg, 1);
  std::vector<std::pair<FiberedPoint, LyapunovTriple>> rows(static_cast<std::size_t>(starts));
  for (int i = 0; i < starts; ++i) {
    auto g = stream_rng(seed, static_cast<std::uint64_t>(i));
    rows[i].first = F.random_point(g);
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    rows[i].second = lyapunov_exponents(F, rows[i].first, n, seed + 1000 + i);
  });
  const double target_u = std::log(std::abs(F.a_u()));
  const double target_sum = F.log_abs_det();
  double err_u = 0.0, err_s = 0.0, err_c = 0.0, err_sum = 0.0;
  for (const auto& [p, l] : rows) {
    err_u = std::max(err_u, std::abs(l.unstable - target_u));
    if (l.stable) err_s = std::max(err_s, std::abs(*l.stable - std::log(std::abs(*F.a_s()))));
    err_c = std::max(err_c, std::abs(l.center));
    err_sum = std::max(err_sum, std::abs(l.sum() - target_sum));
  }
  e.at_most("|lambda_u - ln|a_u||", err_u, "exponents.unstable_tolerance");
  if (F.a_s()) e.at_most("|lambda_s - ln|a_s||", err_s, "exponents.stable_tolerance");
  e.at_most("|lambda_c|", err_c, "exponents.center_tolerance");
  e.at_most("|sum - ln|det||", err_sum, "exponents.sum_tolerance");
  auto out = e.open("lyapunov.csv");
  write_lyapunov_csv(out, rows);
}

void run_bundles(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const int points = static_cast<int>(cfg.integer("bundles.points"));
  const int n = static_cast<int>(cfg.integer("bundles.n"));
  const std::uint64_t seed = experiment_seed(cfg, 2);
  std::vector<SplittingEstimate> rows(static_cast<std::size_t>(points));
  parallel_for(rows.size(), [&](std::size_t i) {
    auto g = stream_rng(seed, i);
    const FiberedPoint x = F.random_point(g);
    const Preorbit pre = sample_preorbit(F, x, n, UniformRandomPolicy{seed + i});
    rows[i] = estimate_splitting(F, pre, n);
  });
  double worst = 0.0;
  for (const SplittingEstimate& s : rows) {
    worst = std::max({worst, s.residual_c, s.residual_u, s.residual_s.value_or(0.0)});
  }
  e.at_most("max invariance defect", worst, "bundles.invariance_max");
  const RateEstimates rates = estimate_rates(F, static_cast<int>(cfg.integer("bundles.rate_samples")),
                                             static_cast<int>(cfg.integer("bundles.rate_window")), seed);
  std::ostringstream r;
  r << "rates nu=" << (rates.nu ? fmt(*rates.nu) : std::string("n/a")) << " gamma1=" << fmt(rates.gamma1)
    << " gamma2=" << fmt(rates.gamma2) << " mu=" << fmt(rates.mu) << " C=" << fmt(rates.C);
  e.holds(r.str() + " certify partial hyperbolicity", rates.certifies_partial_hyperbolicity());
  auto out = e.open("bundles.csv");
  write_splitting_csv(out, rows);
}

// Fiber slope of E^u at the anchor: sum_{j>=1} dphi(x_{-j}) v_u / a^j.
double unstable_slope_series(const RotationExtension& F, const Preorbit& pre) {
  const Eigen::Vector2d v = F.v_u();
  const double a = (F.base_matrix() * v).dot(v);
  double slope = 0.0;
  for (int j = pre.depth(); j >= 1; --j) slope = (slope + F.grad_phi(pre.at(j).base).dot(v)) / a;
  return slope;
}

TangentVector slope_vector(const RotationExtension& F, double slope) {
  TangentVector w(F.dim());
  if (F.torus_base()) {
    w << F.v_u().x(), F.v_u().y(), slope;
  } else {
    w << 1.0, slope;
  }
  return w;
}

double estimated_slope(const RotationExtension& F, const TangentVector& w) {
  const double along = F.torus_base() ? w.head<2>().dot(F.v_u()) : w(0);
  return w(F.dim() - 1) / along;
}

void run_spread(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const FiberedPoint p = config_point(F, cfg, "spread.point");
  const int depth = static_cast<int>(cfg.integer("spread.depth"));
  const auto pre_images = F.base_preimages(p.base);
  int fixed_branch = -1;
  for (std::size_t j = 0; j < pre_images.size(); ++j) {
    if (torus_distance(pre_images[j], p.base) < 1e-12) fixed_branch = static_cast<int>(j);
  }
  if (fixed_branch < 0) throw ValidationError("spread.point", "must be a fixed point of the base map");
  const std::vector<Preorbit> preorbits = {
      sample_preorbit(F, p, depth, FixedItineraryPolicy{{fixed_branch}}),
      sample_preorbit(F, p, depth, stay_outside_support(F)),
  };
  const double spread = unstable_direction_spread(F, preorbits, depth);
  const double s0 = unstable_slope_series(F, preorbits[0]);
  const double s1 = unstable_slope_series(F, preorbits[1]);
  const double analytic = angle_between(slope_vector(F, s0), slope_vector(F, s1));
  e.note("spread " + fmt(spread) + ", series angle " + fmt(analytic));
  e.at_most("|spread - series angle|", std::abs(spread - analytic), "spread.tolerance");

  auto out = e.open("spread.csv");
  out << "preorbit,itinerary,slope_estimate,slope_series\n" << std::setprecision(17);
  const char* labels[] = {"constant", "stay_outside"};
  for (int i = 0; i < 2; ++i) {
    const DirectionEstimate d = estimate_unstable_direction(F, preorbits[i], depth);
    out << labels[i] << ',' << preorbits[i].itinerary().substr(0, 16) << ','
        << estimated_slope(F, d.direction.vector()) << ',' << (i == 0 ? s0 : s1) << '\n';
  }
  auto pre_out = e.open("preorbits.csv");
  write_preorbits_csv(pre_out, preorbits);
}

void run_holonomy(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const FiberedPoint corner = config_point(F, cfg, "holonomy.corner");
  const int grid = static_cast<int>(cfg.integer("holonomy.grid"));
  const double max_scale = cfg.number("holonomy.max_scale");
  const PreorbitPolicy policy = default_u_policy(F, corner, experiment_seed(cfg, 4));
  std::vector<HolonomySample> samples;
  std::vector<std::pair<double, double>> scales;
  for (int i = 1; i <= grid; ++i) {
    for (int j = 1; j <= grid; ++j) {
      scales.emplace_back(max_scale * i / grid, max_scale * j / grid);
    }
  }
  samples.resize(scales.size());
  parallel_for(scales.size(), [&](std::size_t k) {
    QuadrilateralSpec q;
    q.corner = corner;
    q.t = scales[k].first;
    q.s = scales[k].second;
    q.u_policy = policy;
    samples[k] = {q.t, q.s, quadrilateral_holonomy(F, q)};
  });
  const double defect = integrability_defect(F, corner, scales, policy);
  e.at_least("integrability defect", defect, "holonomy.defect_min");
  e.at_most("integrability defect", defect, "holonomy.defect_max");

  const HolonomyChart chart(F, corner, policy);
  double additivity = 0.0;
  for (int i = 1; i <= grid; ++i) {
    const double t = max_scale * i / grid;
    const double s = max_scale * (grid + 1 - i) / grid;
    const double whole = chart.holonomy(0.0, 0.0, t, s);
    const double split_t = chart.holonomy(0.0, 0.0, t / 2, s) + chart.holonomy(t / 2, 0.0, t / 2, s);
    const double split_s = chart.holonomy(0.0, 0.0, t, s / 2) + chart.holonomy(0.0, s / 2, t, s / 2);
    additivity = std::max({additivity, std::abs(whole - split_t), std::abs(whole - split_s)});
  }
  e.at_most("bisection additivity error", additivity, "holonomy.additivity_max");
  auto out = e.open("holonomy.csv");
  write_holonomy_csv(out, samples);
}

void run_supath(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const FiberedPoint from = config_point(F, cfg, "supath.from");
  const int targets = static_cast<int>(cfg.integer("supath.targets"));
  const double tol = cfg.number("supath.tol");
  const std::uint64_t seed = experiment_seed(cfg, 5);
  struct Row {
    FiberedPoint target;
    bool reached = false;
    double fiber_error = 0.0;
    int legs = 0;
    int iterations = 0;
    double verify = 0.0;
    SuPath path;
  };
  std::vector<Row> rows(static_cast<std::size_t>(targets));
  parallel_for(rows.size(), [&](std::size_t i) {
    auto g = stream_rng(seed, i);
    Row& r = rows[i];
    r.target = F.random_point(g);
    SuPathOptions opt;
    opt.seed = seed + i;
    try {
      r.path = build_su_path(F, from, r.target, tol, opt);
      r.reached = true;
      r.fiber_error = r.path.fiber_error;
      r.legs = static_cast<int>(r.path.legs.size());
      r.iterations = r.path.shooting_iterations;
      r.verify = verify_su_path(F, r.path);
    } catch (const NotAccessibleNumerically& ex) {
      r.fiber_error = ex.achieved_error();
    }
  });
  int reached = 0;
  double verify = 0.0;
  for (const Row& r : rows) {
    reached += r.reached ? 1 : 0;
    verify = std::max(verify, r.verify);
  }
  const bool expect = cfg.flag("supath.expect_accessible");
  e.holds("targets reached " + std::to_string(reached) + "/" + std::to_string(targets) +
              (expect ? ", expected all" : ", expected none") + " (supath.expect_accessible)",
          expect ? reached == targets : reached == 0);
  if (reached > 0) e.at_most("max path re-evaluation mismatch", verify, "supath.verify_max");

  auto out = e.open("supath.csv");
  out << "target_x,target_y,target_theta,reached,fiber_error,legs,iterations,verify\n"
      << std::setprecision(17);
  for (const Row& r : rows) {
    out << r.target.base.x << ',' << r.target.base.y << ',' << r.target.theta << ',' << (r.reached ? 1 : 0)
        << ',' << r.fiber_error << ',' << r.legs << ',' << r.iterations << ',' << r.verify << '\n';
  }
  for (const Row& r : rows) {
    if (!r.reached) continue;
    auto path_out = e.open("supath_first_path.csv");
    write_su_path_csv(path_out, r.path);
    break;
  }
}

void run_minimality(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const FiberedPoint x = config_point(F, cfg, "minimality.point");
  const double L = cfg.number("minimality.length");
  const int G = static_cast<int>(cfg.integer("minimality.grid"));
  const double radius = leaf_density_radius(F, x, L, G);
  e.at_most("stable leaf covering radius", radius, "minimality.radius_max");
  e.at_least("stable leaf covering radius", radius, "minimality.radius_min");
  auto out = e.open("minimality.csv");
  out << "L,G,radius\n" << std::setprecision(17) << L << ',' << G << ',' << radius << '\n';
}

void run_birkhoff(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const Observable psi = parse_observable(cfg.text("birkhoff.observable"));
  const BirkhoffReport r = birkhoff_dispersion(F, psi, static_cast<int>(cfg.integer("birkhoff.starts")),
                                               cfg.integer("birkhoff.iterations"), experiment_seed(cfg, 7));
  e.note("ensemble mean " + fmt(r.mean));
  e.at_most("dispersion", r.dispersion, "birkhoff.dispersion_max");
  e.at_least("dispersion", r.dispersion, "birkhoff.dispersion_min");
  auto out = e.open("birkhoff.csv");
  write_birkhoff_csv(out, r);
}

void run_transitivity(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const TransitivityReport r = box_transitivity(
      F, config_point(F, cfg, "transitivity.center"), cfg.number("transitivity.epsilon"),
      static_cast<int>(cfg.integer("transitivity.grid")), cfg.integer("transitivity.iterations"),
      static_cast<int>(cfg.integer("transitivity.cloud")), experiment_seed(cfg, 8));
  e.at_least("visited box fraction", r.fraction, "transitivity.fraction_min");
  e.at_most("visited box fraction", r.fraction, "transitivity.fraction_max");
  auto out = e.open("transitivity.csv");
  write_transitivity_csv(out, r);
}

void run_srb(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const FiberedPoint x = config_point(F, cfg, "srb.anchor");
  const int depth = static_cast<int>(cfg.integer("srb.depth"));
  const double half = cfg.number("srb.half_length");
  const Preorbit pre = sample_preorbit(F, x, depth, default_u_policy(F, x, experiment_seed(cfg, 9)));
  const SrbLeafDensity d = srb_density(F, pre, half, static_cast<int>(cfg.integer("srb.quad_points")));

  e.holds("Delta_u(x, x) == 1", srb_delta_u(F, pre, pre, depth).value == 1.0);
  const UnstableLeafChart chart(F, pre, depth);
  double cocycle = 0.0;
  for (int i = 1; i <= 8; ++i) {
    const double t1 = -half + 2.0 * half * i / 9.0;
    const double t2 = half - 2.0 * half * i / 9.0 / 3.0;
    const Preorbit y = shadow_preorbit(F, pre, {chart.base_at(t1), x.theta});
    const Preorbit z = shadow_preorbit(F, pre, {chart.base_at(t2), x.theta});
    const double xy = srb_delta_u(F, pre, y, depth).log_value;
    const double yz = srb_delta_u(F, y, z, depth).log_value;
    const double xz = srb_delta_u(F, pre, z, depth).log_value;
    cocycle = std::max(cocycle, std::abs(xy + yz - xz));
  }
  e.at_most("cocycle identity error", cocycle, "srb.cocycle_tolerance");
  e.at_most("|integral rho - 1|", std::abs(d.integral - 1.0), "srb.normalization_tolerance");
  e.at_least("density deviation max/min - 1", d.deviation, "srb.deviation_min");
  e.at_most("density deviation max/min - 1", d.deviation, "srb.deviation_max");
  auto out = e.open("srb.csv");
  write_srb_csv(out, d);
}

void run_volume(const RotationExtension& F, Experiment& e) {
  const auto& cfg = e.cfg();
  const VolumeCertificate c = volume_preservation_certificate(
      F, static_cast<int>(cfg.integer("volume.samples")), experiment_seed(cfg, 10));
  e.holds("volume certificate", c.pass);
  e.at_most("max |sum 1/|det dF| - 1|", c.max_deviation, "volume.deviation_max");
  auto out = e.open("volume.csv");
  out << "samples,max_deviation,pass\n"
      << std::setprecision(17) << c.samples << ',' << c.max_deviation << ',' << (c.pass ? 1 : 0) << '\n';
}

struct Entry {
  const char* name;
  bool torus_only;
  void (*fn)(const RotationExtension&, Experiment&);
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = {
      {"exponents", false, run_exponents},       {"bundles", false, run_bundles},
      {"spread", false, run_spread},             {"holonomy", true, run_holonomy},
      {"supath", true, run_supath},              {"minimality", true, run_minimality},
      {"birkhoff", false, run_birkhoff},         {"transitivity", false, run_transitivity},
      {"srb", true, run_srb},                    {"volume-check", false, run_volume},
  };
  return list;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    case Verdict::not_applicable:
      return "N/A";
  }
  return "?";
}

void write_manifest(const RunManifest& m, const fs::path& dir) {
  std::ofstream out(dir / "manifest.txt");
  out << format_manifest(m);
}

}  // namespace

bool RunManifest::all_pass() const {
  if (failed()) return false;
  for (const ExperimentResult& r : experiments) {
    if (r.verdict == Verdict::fail) return false;
  }
  return true;
}

int RunManifest::exit_code() const {
  if (failed()) return 2;
  return all_pass() ? 0 : 1;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const Entry& e : entries()) v.emplace_back(e.name);
    v.emplace_back("all");
    return v;
  }();
  return names;
}

RunManifest run(const std::string& subcommand, const ExperimentConfig& config, const fs::path& out_dir) {
  RunManifest m;
  m.subcommand = subcommand;
  m.config_echo = config.echo();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<const Entry*> selected;
  for (const Entry& e : entries()) {
    if (subcommand == "all" || subcommand == e.name) selected.push_back(&e);
  }
  if (selected.empty()) {
    m.error = "unknown subcommand '" + subcommand + "'";
    return m;
  }
  fs::create_directories(out_dir);

  std::optional<RotationExtension> F;
  try {
    F.emplace(build_map(config.map()));
  } catch (const std::exception& ex) {
    m.error = std::string("map construction: ") + ex.what();
    write_manifest(m, out_dir);
    return m;
  }

  for (const Entry* entry : selected) {
    ExperimentResult r;
    r.name = entry->name;
    if (entry->torus_only && !require_torus(*F, r)) {
      m.experiments.push_back(std::move(r));
      continue;
    }
    Experiment e(config, out_dir, r);
    try {
      entry->fn(*F, e);
    } catch (const std::exception& ex) {
      r.verdict = Verdict::fail;
      r.note = std::string("error: ") + ex.what();
      if (m.error.empty()) m.error = r.name + ": " + ex.what();
    }
    m.experiments.push_back(std::move(r));
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(m, out_dir);
  }
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(m, out_dir);
  return m;
}

std::string format_manifest(const RunManifest& m) {
  std::ostringstream out;
  out << "skewlab " << m.version << "\n";
  out << "subcommand: " << m.subcommand << "\n";
  if (m.failed()) {
    out << "status: FAILED (" << m.error << ")\n";
  } else {
    out << "status: " << (m.all_pass() ? "PASS" : "FAIL") << "\n";
  }
  out << "exit_code: " << m.exit_code() << "\n";
  out << "wall_seconds: " << std::fixed << std::setprecision(3) << m.wall_seconds << "\n";
  out.unsetf(std::ios::floatfield);
  out << "\n[config]\n" << m.config_echo;
  for (const ExperimentResult& r : m.experiments) {
    out << "\n[" << r.name << "] " << verdict_name(r.verdict) << "\n";
    for (const std::string& c : r.checks) out << "  check: " << c << "\n";
    for (const std::string& f : r.files) out << "  file: " << f << "\n";
    if (!r.note.empty()) out << "  note: " << r.note << "\n";
  }
  return out.str();
}

}  // namespace skewlab
