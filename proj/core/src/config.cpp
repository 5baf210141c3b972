#include "skewlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "skewlab/ergodic.hpp"
#include "skewlab/errors.hpp"

namespace skewlab {
namespace {

enum class Kind { number, integer, flag, text, vector };

struct KeySpec {
  const char* key;
  const char* fallback;
  Kind kind;
};

// Shipped defaults; thresholds match the acceptance targets for the
// reference rotation extension.
const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = {
      {"run.name", "experiment", Kind::text},
      {"run.seed", "20240601", Kind::integer},
      {"map.base", "torus", Kind::text},
      {"map.matrix", "3 1 1 1", Kind::vector},
      {"map.multiplier", "2", Kind::integer},
      {"bump.kind", "zero", Kind::text},
      {"bump.center", "0 0", Kind::vector},
      {"bump.radius", "0.15", Kind::number},
      {"bump.amplitude", "0.05", Kind::number},
      {"bump.direction", "unstable", Kind::text},
      {"exponents.iterations", "1000000", Kind::integer},
      {"exponents.starts", "1", Kind::integer},
      {"exponents.unstable_tolerance", "1e-3", Kind::number},
      {"exponents.stable_tolerance", "1e-3", Kind::number},
      {"exponents.center_tolerance", "1e-8", Kind::number},
      {"exponents.sum_tolerance", "1e-6", Kind::number},
      {"bundles.points", "100", Kind::integer},
      {"bundles.n", "60", Kind::integer},
      {"bundles.invariance_max", "1e-8", Kind::number},
      {"bundles.rate_samples", "10", Kind::integer},
      {"bundles.rate_window", "200", Kind::integer},
      {"spread.point", "0 0", Kind::vector},
      {"spread.depth", "60", Kind::integer},
      {"spread.tolerance", "1e-6", Kind::number},
      {"holonomy.corner", "0 0 0", Kind::vector},
      {"holonomy.grid", "10", Kind::integer},
      {"holonomy.max_scale", "0.4", Kind::number},
      {"holonomy.defect_min", "1e-6", Kind::number},
      {"holonomy.defect_max", "inf", Kind::number},
      {"holonomy.additivity_max", "1e-10", Kind::number},
      {"supath.from", "0 0 0", Kind::vector},
      {"supath.targets", "20", Kind::integer},
      {"supath.tol", "1e-4", Kind::number},
      {"supath.expect_accessible", "true", Kind::flag},
      {"supath.verify_max", "1e-9", Kind::number},
      {"minimality.point", "0.1 0.2 0.3", Kind::vector},
      {"minimality.length", "10000", Kind::number},
      {"minimality.grid", "20", Kind::integer},
      {"minimality.radius_max", "0.05", Kind::number},
      {"minimality.radius_min", "0", Kind::number},
      {"birkhoff.observable", "cos_theta", Kind::text},
      {"birkhoff.starts", "100", Kind::integer},
      {"birkhoff.iterations", "1000000", Kind::integer},
      {"birkhoff.dispersion_max", "0.05", Kind::number},
      {"birkhoff.dispersion_min", "0", Kind::number},
      {"transitivity.center", "0.5 0.5 0.5", Kind::vector},
      {"transitivity.epsilon", "0.05", Kind::number},
      {"transitivity.grid", "20", Kind::integer},
      {"transitivity.iterations", "10000", Kind::integer},
      {"transitivity.cloud", "1000", Kind::integer},
      {"transitivity.fraction_min", "0.99", Kind::number},
      {"transitivity.fraction_max", "1", Kind::number},
      {"srb.anchor", "0 0 0", Kind::vector},
      {"srb.half_length", "0.3", Kind::number},
      {"srb.quad_points", "201", Kind::integer},
      {"srb.depth", "60", Kind::integer},
      {"srb.normalization_tolerance", "1e-8", Kind::number},
      {"srb.cocycle_tolerance", "1e-8", Kind::number},
      {"srb.deviation_min", "0", Kind::number},
      {"srb.deviation_max", "inf", Kind::number},
      {"volume.samples", "10000", Kind::integer},
      {"volume.deviation_max", "1e-9", Kind::number},
  };
  return table;
}

const KeySpec* find_key(const std::string& key) {
  for (const KeySpec& k : key_table()) {
    if (key == k.key) return &k;
  }
  return nullptr;
}

double parse_number(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size() && !std::isnan(v)) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(key, "expected a number, got '" + s + "'");
}

long parse_integer(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return static_cast<long>(v);
  } catch (const std::exception&) {
  }
  throw ValidationError(key, "expected an integer, got '" + s + "'");
}

bool parse_flag(const std::string& key, const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ValidationError(key, "expected true or false, got '" + s + "'");
}

std::vector<double> parse_vector(const std::string& key, const std::string& s) {
  std::string spaced = s;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(spaced);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(parse_number(key, tok));
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ValidationError(key, what);
}

}  // namespace

double ExperimentConfig::number(const std::string& key) const { return parse_number(key, text(key)); }
long ExperimentConfig::integer(const std::string& key) const { return parse_integer(key, text(key)); }
bool ExperimentConfig::flag(const std::string& key) const { return parse_flag(key, text(key)); }
std::vector<double> ExperimentConfig::numbers(const std::string& key) const {
  return parse_vector(key, text(key));
}

const std::string& ExperimentConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ValidationError(key, "unknown key");
  return it->second;
}

std::string ExperimentConfig::echo() const {
  std::ostringstream out;
  for (const KeySpec& k : key_table()) {
    out << k.key << " = " << values_.at(k.key);
    if (defaulted_.at(k.key)) out << "  (default)";
    out << '\n';
  }
  return out.str();
}

ExperimentConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), static_cast<int>(e.line()));
  }

  ExperimentConfig cfg;
  bool bump_keys = false;
  bool bump_kind_set = false;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ValidationError(section, "key outside of any section");
    for (const auto& [name, value] : body) {
      const std::string key = section + "." + name;
      const KeySpec* spec = find_key(key);
      if (!spec) throw ValidationError(key, "unknown key");
      cfg.values_[key] = trim(value.data());
      cfg.defaulted_[key] = false;
      if (section == "bump") {
        if (name == "kind") {
          bump_kind_set = true;
        } else {
          bump_keys = true;
        }
      }
    }
  }
  if (!bump_kind_set && bump_keys) {
    cfg.values_["bump.kind"] = "bump";
    cfg.defaulted_["bump.kind"] = true;
  }
  for (const KeySpec& k : key_table()) {
    if (!cfg.values_.count(k.key)) {
      cfg.values_[k.key] = k.fallback;
      cfg.defaulted_[k.key] = true;
    }
    const std::string& v = cfg.values_[k.key];
    switch (k.kind) {
      case Kind::number:
        parse_number(k.key, v);
        break;
      case Kind::integer:
        require(parse_integer(k.key, v) >= 0 || std::string(k.key) == "map.multiplier", k.key,
                "must be non-negative");
        break;
      case Kind::flag:
        parse_flag(k.key, v);
        break;
      case Kind::vector:
        parse_vector(k.key, v);
        break;
      case Kind::text:
        break;
    }
  }

  cfg.name_ = cfg.text("run.name");
  try {
    cfg.seed_ = std::stoull(cfg.text("run.seed"));
  } catch (const std::exception&) {
    throw ValidationError("run.seed", "expected an unsigned integer");
  }

  MapSpec& m = cfg.map_;
  const std::string base = cfg.text("map.base");
  require(base == "torus" || base == "circle", "map.base", "must be torus or circle");
  m.torus = base == "torus";
  const std::vector<double> entries = cfg.numbers("map.matrix");
  require(entries.size() == 4, "map.matrix", "needs four integer entries");
  for (int i = 0; i < 4; ++i) {
    require(entries[i] == std::floor(entries[i]), "map.matrix", "entries must be integers");
    m.matrix[i] = static_cast<long>(entries[i]);
  }
  m.multiplier = static_cast<int>(parse_integer("map.multiplier", cfg.text("map.multiplier")));
  const std::string kind = cfg.text("bump.kind");
  require(kind == "bump" || kind == "zero", "bump.kind", "must be bump or zero");
  m.has_bump = kind == "bump";
  const std::vector<double> c = cfg.numbers("bump.center");
  require(c.size() == 2, "bump.center", "needs two coordinates");
  m.bump.center = {c[0], c[1]};
  m.bump.radius = cfg.number("bump.radius");
  require(m.bump.radius > 0.0 && m.bump.radius < 0.5, "bump.radius", "must lie in (0, 0.5)");
  m.bump.amplitude = cfg.number("bump.amplitude");
  require(std::isfinite(m.bump.amplitude), "bump.amplitude", "must be finite");
  const std::string dir = cfg.text("bump.direction");
  if (dir != "unstable") {
    const std::vector<double> d = parse_vector("bump.direction", dir);
    require(d.size() == 2 && (d[0] != 0.0 || d[1] != 0.0), "bump.direction",
            "must be 'unstable' or two numbers, not both zero");
    m.bump.direction = Eigen::Vector2d(d[0], d[1]);
  }

  if (m.torus) {
    try {
      LinearToralEndomorphism probe(m.matrix);
      require(probe.degree() >= 1, "map.matrix", "determinant must be nonzero");
    } catch (const NotHyperbolic& e) {
      throw ValidationError("map.matrix", std::string("NotHyperbolic: ") + e.what());
    }
  } else {
    require(m.multiplier <= -2 || m.multiplier >= 2, "map.multiplier", "|k| must be >= 2");
    if (m.has_bump) {
      require(m.bump.center.y == 0.0, "bump.center", "second coordinate must be 0 over a circle base");
      require(!m.bump.direction || m.bump.direction->y() == 0.0, "bump.direction",
              "must be horizontal over a circle base");
    }
  }

  require(cfg.integer("exponents.iterations") >= 1000, "exponents.iterations", "must be >= 1000");
  require(cfg.integer("exponents.starts") >= 1, "exponents.starts", "must be >= 1");
  require(cfg.integer("bundles.n") >= 1, "bundles.n", "must be >= 1");
  require(cfg.integer("spread.depth") >= 1, "spread.depth", "must be >= 1");
  require(cfg.integer("holonomy.grid") >= 1, "holonomy.grid", "must be >= 1");
  const double ms = cfg.number("holonomy.max_scale");
  require(ms > 0.0 && ms < 0.5, "holonomy.max_scale", "must lie in (0, 0.5)");
  require(cfg.number("supath.tol") > 0.0, "supath.tol", "must be positive");
  require(cfg.number("minimality.length") > 0.0, "minimality.length", "must be positive");
  require(cfg.integer("minimality.grid") >= 1, "minimality.grid", "must be >= 1");
  require(cfg.integer("birkhoff.starts") >= 2, "birkhoff.starts", "must be >= 2");
  require(cfg.integer("birkhoff.iterations") >= 1, "birkhoff.iterations", "must be >= 1");
  try {
    parse_observable(cfg.text("birkhoff.observable"));
  } catch (const std::invalid_argument& e) {
    throw ValidationError("birkhoff.observable", e.what());
  }
  require(cfg.integer("transitivity.grid") >= 2, "transitivity.grid", "must be >= 2");
  require(cfg.number("transitivity.epsilon") > 0.0, "transitivity.epsilon", "must be positive");
  require(cfg.integer("transitivity.cloud") >= 1, "transitivity.cloud", "must be >= 1");
  const double hl = cfg.number("srb.half_length");
  require(hl > 0.0 && hl < 0.5, "srb.half_length", "must lie in (0, 0.5)");
  require(cfg.integer("srb.quad_points") >= 2, "srb.quad_points", "must be >= 2");
  require(cfg.integer("srb.depth") >= 1, "srb.depth", "must be >= 1");
  for (const char* key : {"spread.point", "holonomy.corner", "supath.from", "minimality.point",
                          "transitivity.center", "srb.anchor"}) {
    const auto v = cfg.numbers(key);
    require(v.size() == 2 || v.size() == 3, key, "needs two or three coordinates");
  }

  try {
    build_map(m);
  } catch (const std::exception& e) {
    throw ValidationError("bump", e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

RotationExtension build_map(const MapSpec& spec) {
  BaseMap base = spec.torus ? BaseMap(LinearToralEndomorphism(spec.matrix))
                            : BaseMap(ExpandingCircleMap(spec.multiplier));
  if (!spec.has_bump) return RotationExtension(base, std::nullopt);
  const Eigen::Vector2d v_u = spec.torus ? std::get<LinearToralEndomorphism>(base).eigen().v_u
                                         : Eigen::Vector2d(1.0, 0.0);
  return RotationExtension(base, make_bump(spec.bump, v_u));
}

}  // namespace skewlab
