#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skewlab/config.hpp"

namespace skewlab {

inline constexpr const char* kVersion = "1.0.0";

enum class Verdict { pass, fail, not_applicable };

struct ExperimentResult {
  std::string name;
  Verdict verdict = Verdict::pass;
  std::vector<std::string> checks;  // "measured <op> threshold (key)" lines
  std::vector<std::string> files;
  std::string note;
};

struct RunManifest {
  std::string version = kVersion;
  std::string subcommand;
  std::string config_echo;
  double wall_seconds = 0.0;
  std::vector<ExperimentResult> experiments;
  std::string error;  // non-empty when the run aborted

  bool failed() const { return !error.empty(); }
  bool all_pass() const;
  int exit_code() const;  // 0 pass, 1 threshold failure, 2 error
};

const std::vector<std::string>& subcommands();

// Runs one subcommand (or "all") and writes CSVs plus manifest.txt into
// out_dir. Errors raised by an experiment are recorded in the manifest.
RunManifest run(const std::string& subcommand, const ExperimentConfig& config,
                const std::filesystem::path& out_dir);

std::string format_manifest(const RunManifest& m);

}  // namespace skewlab
