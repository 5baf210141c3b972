#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "skewlab/skew_product.hpp"

namespace skewlab {

struct MapSpec {
  bool torus = true;
  std::array<long, 4> matrix{3, 1, 1, 1};
  int multiplier = 2;
  bool has_bump = false;
  BumpParams bump;
};

// Validated INI configuration. Every known key has a value after parsing;
// keys the file did not set carry their shipped default.
class ExperimentConfig {
 public:
  const std::string& name() const { return name_; }
  std::uint64_t seed() const { return seed_; }
  const MapSpec& map() const { return map_; }

  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;

  // "section.key = value" lines in a fixed order; defaults are marked.
  std::string echo() const;

 private:
  friend ExperimentConfig parse_config(std::string_view text);

  std::string name_;
  std::uint64_t seed_ = 0;
  MapSpec map_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> defaulted_;
};

// Throws ParseError (with line number) for malformed text and
// ValidationError (naming the key) for unknown keys or bad values.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

RotationExtension build_map(const MapSpec& spec);

}  // namespace skewlab
