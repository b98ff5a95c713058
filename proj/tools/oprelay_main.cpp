// Scenario runner: reads an experiment config, runs it, writes a CSV table.
#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "oprelay/errors.hpp"
#include "oprelay/experiment.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericError = 2 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic relaying experiments"};
  app.set_version_flag("--version", std::string(oprelay::tool_version()));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_path;
  unsigned threads = 0;
  bool validate_only = false;

  app.add_option("--config", config_path, "Experiment config (JSON)")->required();
  app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--out", out_path, "CSV output path (default: config output, else stdout)");
  app.add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
  app.add_flag("--validate-only", validate_only, "Check the config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  oprelay::ExperimentConfig config;
  try {
    config = oprelay::load_config(config_path, seed);
  } catch (const oprelay::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }

  if (validate_only) {
    std::cout << config_path << ": ok (" << oprelay::to_string(config.kind) << ")\n";
    return kOk;
  }

  oprelay::ResultTable table;
  try {
    table = oprelay::run_experiment(config, threads);
  } catch (const oprelay::InsufficientTrialsError& e) {
    std::cerr << "numeric error: " << e.what()
              << "\nhint: an outage estimate came out as zero; raise trials_per_point, switch to "
                 "\"estimator\": \"importance\", or narrow the fit window\n";
    return kNumericError;
  } catch (const oprelay::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << " (partial estimate "
              << e.partial_estimate() << ", error estimate " << e.error_estimate() << ")\n";
    return kNumericError;
  } catch (const oprelay::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  }

  const std::string target = !out_path.empty() ? out_path : config.output.value_or("");
  try {
    if (target.empty() || target == "-") {
      oprelay::write_csv(table, std::cout);
    } else {
      oprelay::emit_csv(table, target);
      std::cerr << "wrote " << table.rows.size() << " rows to " << target << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return kNumericError;
  }

  const std::string warning = table.meta("warning");
  if (!warning.empty()) std::cerr << "warning: " << warning << '\n';
  return kOk;
}
