#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "winsim/config.hpp"
#include "winsim/errors.hpp"
#include "winsim/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct RunOptions {
  std::string config;
  std::string preset;
  std::string out = "winsim_out";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

int run(const RunOptions& opt) {
  winsim::ExperimentConfig cfg;
  try {
    if (!opt.preset.empty() && !opt.config.empty()) throw winsim::ConfigError("give either a config file or --preset, not both");
    if (opt.preset.empty() && opt.config.empty()) throw winsim::ConfigError("no config file given (or use --preset)");
    cfg = opt.preset.empty() ? winsim::parse_config(opt.config) : winsim::load_preset(opt.preset);
    if (opt.seed) cfg.sweep.seed = *opt.seed;
    if (opt.trials) {
      // A fixed trial count per point: early stopping off.
      cfg.sweep.min_trials = *opt.trials;
      cfg.sweep.max_trials = *opt.trials;
    }
    cfg.validate();
  } catch (const winsim::ConfigError& e) {
    std::cerr << "winsim: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "winsim: invalid configuration: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const auto start = std::chrono::steady_clock::now();
    const auto result = winsim::run_sweep(cfg);
    const auto files = winsim::write_outputs(result, cfg, opt.out);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s: %zu points, sigma_x^2 = %.6g, config %s, %.1f s\n", cfg.name.c_str(), result.points.size(),
                result.signal_variance, winsim::config_fingerprint(cfg).c_str(), secs);
    for (const auto& f : files) std::printf("  wrote %s\n", f.string().c_str());
  } catch (const winsim::ConfigError& e) {
    std::cerr << "winsim: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "winsim: error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"WINDOW vs multicoset sampling simulator"};
  app.set_version_flag("--version", std::string(WINSIM_VERSION));
  app.require_subcommand(1);

  RunOptions opt;
  auto* run_cmd = app.add_subcommand("run", "run an experiment sweep and write results");
  run_cmd->add_option("config", opt.config, "experiment config file (YAML)");
  run_cmd->add_option("--preset", opt.preset, "built-in experiment")
      ->check(CLI::IsMember(winsim::preset_names()));
  run_cmd->add_option("--out", opt.out, "output directory")->capture_default_str();
  run_cmd->add_option("--seed", opt.seed, "override the master seed");
  run_cmd->add_option("--trials", opt.trials, "fixed number of trials per point")->check(CLI::Range(2, 1000000));

  std::string show;
  auto* presets_cmd = app.add_subcommand("presets", "list built-in presets or print one");
  presets_cmd->add_option("name", show, "preset to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (*presets_cmd) {
    try {
      if (show.empty()) {
        for (const auto& n : winsim::preset_names()) std::cout << n << '\n';
      } else {
        std::cout << winsim::preset_text(show);
      }
    } catch (const winsim::ConfigError& e) {
      std::cerr << "winsim: " << e.what() << '\n';
      return kConfigError;
    }
    return kOk;
  }
  return run(opt);
}
