#include <iostream>

#include "CLI11.hpp"
#include "skewlab/config.hpp"
#include "skewlab/errors.hpp"
#include "skewlab/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Rotation extension diagnostics"};
  app.set_version_flag("--version", skewlab::kVersion);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string out_dir = "out";
  for (const std::string& name : skewlab::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " diagnostic");
    sub->add_option("-c,--config", config_path, "experiment configuration file")->required();
    sub->add_option("-o,--out", out_dir, "output directory");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string subcommand = app.get_subcommands().front()->get_name();

  skewlab::ExperimentConfig config;
  try {
    config = skewlab::load_config(config_path);
  } catch (const skewlab::ParseError& e) {
    std::cerr << config_path << ":" << e.line() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << config_path << ": " << e.what() << "\n";
    return 2;
  }

  const skewlab::RunManifest m = skewlab::run(subcommand, config, out_dir);
  std::cout << skewlab::format_manifest(m);
  return m.exit_code();
}
