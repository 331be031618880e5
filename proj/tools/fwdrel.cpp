#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "fwdrel/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Forward relative performance: simulation and verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> dt;
  std::optional<unsigned> threads;

  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--paths", paths, "number of Monte Carlo paths");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--out", out_dir, "output directory");
  };
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "simulate both managers under the configured strategies"},
      {"best-response", "optimal response of one manager to a fixed opponent"},
      {"nash", "closed-form equilibrium, fixed-point and martingale checks"},
      {"verify", "run the acceptance criteria"},
  };
  for (const auto& [name, help] : commands) add_flags(app.add_subcommand(name, help));
  std::string run_dir;
  auto* report = app.add_subcommand("report", "summarize a run directory");
  report->add_option("run_dir", run_dir, "directory holding manifest.json");
  report->add_option("--out", out_dir, "run directory (alternative to the positional)");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  fwdrel::RunConfig config;
  try {
    if (!config_path.empty()) config = fwdrel::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fwdrel::kInvalidInput;
  }
  if (seed) config.seed = *seed;
  if (paths) (command == "verify" ? config.verify_paths : config.n_paths) = *paths;
  if (dt) config.dt = *dt;
  if (threads) config.threads = *threads;
  if (!out_dir.empty()) config.output = out_dir;
  if (command == "report" && run_dir.empty()) run_dir = config.output;

  return fwdrel::run_command(command, config, std::cout, std::cerr, run_dir);
}
