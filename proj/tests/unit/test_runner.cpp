#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "skewlab/config.hpp"
#include "skewlab/runner.hpp"

using namespace skewlab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig shipped(const char* name) {
  return load_config(std::string(SKEWLAB_CONFIG_DIR) + "/" + name);
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("skewlab_runner_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Runner, VolumeCheckWritesListedFiles) {
  const fs::path dir = scratch("volume");
  const RunManifest m = run("volume-check", shipped("paper_example.cfg"), dir);
  EXPECT_EQ(m.exit_code(), 0);
  ASSERT_EQ(m.experiments.size(), 1u);
  for (const std::string& f : m.experiments[0].files) EXPECT_TRUE(fs::exists(dir / f));
  const std::string manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("skewlab 1.0.0"), std::string::npos);
  EXPECT_NE(manifest.find("(volume.deviation_max): ok"), std::string::npos);
  EXPECT_NE(manifest.find("file: volume.csv"), std::string::npos);
}

TEST(Runner, ThresholdFailureExitsOne) {
  ExperimentConfig c = parse_config("[transitivity]\nfraction_min = 0.99\n");
  const RunManifest m = run("transitivity", c, scratch("transitivity"));
  EXPECT_EQ(m.exit_code(), 1);
  EXPECT_EQ(m.experiments[0].verdict, Verdict::fail);
}

TEST(Runner, HolonomyOfProductPasses) {
  const RunManifest m = run("holonomy", shipped("product.cfg"), scratch("holonomy"));
  EXPECT_EQ(m.exit_code(), 0);
}

TEST(Runner, ErrorsExitTwoWithMarker) {
  const fs::path dir = scratch("error");
  // (0.3, 0.3) is not fixed by the base map
  const RunManifest m = run("spread", parse_config("[spread]\npoint = 0.3 0.3\n"), dir);
  EXPECT_EQ(m.exit_code(), 2);
  EXPECT_NE(slurp(dir / "manifest.txt").find("status: FAILED"), std::string::npos);
  EXPECT_EQ(run("nonsense", parse_config(""), scratch("nonsense")).exit_code(), 2);
}

TEST(Runner, CircleBaseMarksTorusOnlyExperiments) {
  ExperimentConfig c = parse_config("[map]\nbase = circle\n");
  const RunManifest m = run("minimality", c, scratch("circle"));
  ASSERT_EQ(m.experiments.size(), 1u);
  EXPECT_EQ(m.experiments[0].verdict, Verdict::not_applicable);
  EXPECT_EQ(m.exit_code(), 0);
}

TEST(Runner, SameSeedSameBytes) {
  const ExperimentConfig c = shipped("paper_example.cfg");
  const fs::path a = scratch("bytes_a"), b = scratch("bytes_b");
  run("spread", c, a);
  run("spread", c, b);
  for (const char* f : {"spread.csv", "preorbits.csv"}) {
    EXPECT_FALSE(slurp(a / f).empty());
    EXPECT_EQ(slurp(a / f), slurp(b / f));
  }
}

TEST(Runner, SubcommandList) {
  const auto& s = subcommands();
  EXPECT_EQ(s.size(), 11u);
  EXPECT_EQ(s.back(), "all");
  EXPECT_NE(std::find(s.begin(), s.end(), "volume-check"), s.end());
}
