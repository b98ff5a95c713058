#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "oprelay/dmt.hpp"
#include "oprelay/fading.hpp"
#include "oprelay/protosim.hpp"
#include "oprelay/relay_select.hpp"
#include "oprelay/result_table.hpp"

namespace oprelay {

enum class ExperimentKind { CollisionCurve, TopologyStudy, ProtoTrace, OutageCurve, OracleAudit };

std::string_view to_string(ExperimentKind k) noexcept;

/// Collision probability against lambda/c, analytic next to Monte Carlo.
struct CollisionCurveParams {
  int relays = 6;
  std::vector<Policy> policies{Policy::Min, Policy::Harmonic};
  FadingModel fading = FadingModel::rayleigh();
  double beta1 = 1.0;
  double beta2 = 1.0;
  std::vector<double> lambda_over_c{50, 100, 200, 500};
  std::uint64_t trials = 1'000'000;
};

/// Named relay placements (midway, third, tenth, line) at fixed c/lambda.
struct TopologyStudyParams {
  std::vector<double> exponents{3, 4};
  double c_over_lambda = 1.0 / 200.0;
  int relays = 6;
  std::vector<Policy> policies{Policy::Min, Policy::Harmonic};
  std::uint64_t trials = 1'000'000;
};

/// Packet-level rounds with per-relay event traces.
struct ProtoTraceParams {
  std::variant<NodeGeometry, PropagationDelays> placement;
  TimingParams timing;
  Policy policy = Policy::Min;
  double lambda_us = 1000.0;
  double beta1 = 1.0;
  double beta2 = 1.0;
  std::uint64_t rounds = 1000;
  std::uint64_t trace_rounds = 1000;  ///< rounds that get per-relay rows

  PropagationDelays delays() const;
};

struct OutageCurveParams {
  std::vector<Scheme> schemes{Scheme::Direct, Scheme::OppDF, Scheme::OppAF};
  int relays = 2;
  std::vector<double> snr_db;
  RateRule rate;
  std::uint64_t trials_per_point = 10'000'000;
  OutageEstimator estimator = OutageEstimator::Plain;
  std::optional<std::pair<double, double>> fit_window_db;
};

/// Analytic-versus-oracle residuals over a (relays, policy, lambda/c) grid.
struct OracleAuditParams {
  std::vector<int> relays{2, 3, 6};
  std::vector<Policy> policies{Policy::Min, Policy::Harmonic};
  std::vector<double> lambda_over_c{50, 100, 200, 500};
  double beta1 = 1.0;
  double beta2 = 1.0;
  std::uint64_t trials = 1'000'000;
};

using ExperimentParams = std::variant<CollisionCurveParams, TopologyStudyParams,
                                      ProtoTraceParams, OutageCurveParams, OracleAuditParams>;

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::CollisionCurve;
  std::uint64_t seed = 0;
  std::optional<std::string> output;
  ExperimentParams params;
  /// FNV-1a of the canonical (key-sorted, compact) JSON of the source file.
  std::uint64_t config_hash = 0;
};

/// Parses and validates a JSON experiment description. Every constraint is
/// checked here, before any computation; violations throw ConfigError with
/// the offending field path. `seed_override` satisfies the mandatory seed.
ExperimentConfig parse_config(std::string_view json_text,
                              std::optional<std::uint64_t> seed_override = std::nullopt);

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override = std::nullopt);

/// Runs the experiment. Monte Carlo sub-streams are keyed by trial chunk, so
/// the rows are identical for every `threads` value.
ResultTable run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Seed of the `index`-th independent cell of an experiment.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index) noexcept;

std::string_view tool_version() noexcept;

}  // namespace oprelay
