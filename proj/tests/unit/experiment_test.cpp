#include <doctest.h>

#include <string>

#include "oprelay/errors.hpp"
#include "oprelay/experiment.hpp"

using namespace oprelay;

namespace {

std::string error_field(const std::string& json) {
  try {
    parse_config(json);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

const char* kCurve = R"({"experiment": "CollisionCurve", "seed": 42, "relays": 6,
  "policies": ["Min", "Harmonic"], "lambda_over_c": [50, 200], "trials": 100000})";

const char* kProto = R"({"experiment": "ProtoTrace", "seed": 1,
  "geometry": {"uniform_delays": {"relays": 4, "relay_dest_us": 0.5, "relay_relay_us": 0.3}},
  "timing": {"switch_us": 1.0}, "lambda_us": 100, "rounds": 70000, "trace_rounds": 5})";

const char* kOutage = R"({"experiment": "OutageCurve", "seed": 3, "schemes": ["Direct", "OppAF"],
  "relays": 1, "snr_db": [0, 10, 20], "rate": {"fixed_bits": 1}, "trials_per_point": 70000,
  "estimator": "importance", "fit_window_db": [0, 20]})";

const char* kTopology = R"({"experiment": "TopologyStudy", "seed": 9, "exponents": [3],
  "relays": 6, "policies": ["Min"], "trials": 70000})";

const char* kAudit = R"({"experiment": "OracleAudit", "seed": 4, "relays": [2, 6],
  "policies": ["Harmonic"], "lambda_over_c": [100], "trials": 70000})";

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("valid configs parse with defaults filled in") {
    const auto c = parse_config(kCurve);
    CHECK(c.kind == ExperimentKind::CollisionCurve);
    CHECK(c.seed == 42);
    const auto& p = std::get<CollisionCurveParams>(c.params);
    CHECK(p.relays == 6);
    CHECK(p.trials == 100000);
    CHECK(p.fading.kind() == FadingKind::Rayleigh);
    CHECK(p.lambda_over_c == std::vector<double>{50, 200});

    const auto o = parse_config(kOutage);
    const auto& q = std::get<OutageCurveParams>(o.params);
    CHECK(q.estimator == OutageEstimator::Importance);
    CHECK(q.fit_window_db->second == 20.0);

    const auto pr = parse_config(kProto);
    const auto& pp = std::get<ProtoTraceParams>(pr.params);
    CHECK(pp.timing.r_max_us == doctest::Approx(0.3));
    CHECK(pp.timing.n_max_us == doctest::Approx(0.5));
    CHECK(pp.timing.flag_duration_us == 1.0);
    CHECK(pp.delays().relays() == 4);
  }

  TEST_CASE("every violation is reported with its field path") {
    CHECK(error_field("{not json") == "");
    CHECK(error_field(R"({"seed": 1})") == "/experiment");
    CHECK(error_field(R"({"experiment": "Nope", "seed": 1})") == "/experiment");
    CHECK(error_field(R"({"experiment": "CollisionCurve"})") == "/seed");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": -1})") == "/seed");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "relays": 1})") == "/relays");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "relays": 2.5})") == "/relays");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "trials": 10})") == "/trials");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "policies": ["Best"]})") ==
          "/policies/0");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "lambda_over_c": [5, -1]})") ==
          "/lambda_over_c/1");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "fading": {"kind": "Rayleigh", "k_factor": 2}})") ==
          "/fading/k_factor");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "fading": {"kind": "Ricean", "k_factor": -2}})") ==
          "/fading/k_factor");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "beta1": 0})") == "/beta1");
    CHECK(error_field(R"({"experiment": "CollisionCurve", "seed": 1, "typo": 0})") == "/typo");
    CHECK(error_field(R"({"experiment": "OutageCurve", "seed": 1, "snr_db": [1, 2], "rate": {"multiplexing_gain": 0.5}})") ==
          "/rate/multiplexing_gain");
    CHECK(error_field(R"({"experiment": "OutageCurve", "seed": 1, "snr_db": [1, 2], "relays": 0, "rate": {"fixed_bits": 1}})") ==
          "/relays");
    CHECK(error_field(R"({"experiment": "OutageCurve", "seed": 1, "snr_db": [1, 2], "rate": {"fixed_bits": 1}, "fit_window_db": [0, 5]})") ==
          "/fit_window_db");
    CHECK(error_field(R"({"experiment": "OutageCurve", "seed": 1, "snr_db": [1], "rate": {"fixed_bits": 1}, "schemes": ["Relay"]})") ==
          "/schemes/0");
    CHECK(error_field(R"({"experiment": "OracleAudit", "seed": 1, "relays": [2, 1]})") == "/relays/1");
    CHECK(error_field(R"({"experiment": "ProtoTrace", "seed": 1,
      "geometry": {"uniform_delays": {"relays": 2, "relay_dest_us": 1, "relay_relay_us": 1}},
      "timing": {"switch_us": 1, "r_max_us": 0.5}})") == "/timing/r_max_us");
    CHECK(error_field(R"({"experiment": "ProtoTrace", "seed": 1,
      "geometry": {"uniform_delays": {"relays": 2, "relay_dest_us": 1, "relay_relay_us": 1}},
      "timing": {}})") == "/timing/switch_us");
    CHECK(error_field(R"({"experiment": "ProtoTrace", "seed": 1,
      "geometry": {"source": [0, 0], "destination": [1], "relays": [[0, 1]]},
      "timing": {"switch_us": 1}})") == "/geometry/destination");
    CHECK(error_field(R"({"experiment": "ProtoTrace", "seed": 1, "rounds": 5, "trace_rounds": 9,
      "geometry": {"uniform_delays": {"relays": 2, "relay_dest_us": 1, "relay_relay_us": 1}},
      "timing": {"switch_us": 1}})") == "/trace_rounds");
  }

  TEST_CASE("seed override satisfies the mandatory seed") {
    const auto c = parse_config(R"({"experiment": "TopologyStudy"})", 17);
    CHECK(c.seed == 17);
    CHECK(parse_config(kCurve, 5).seed == 5);
  }

  TEST_CASE("config hash is insensitive to whitespace and key order") {
    const auto a = parse_config(R"({"experiment": "TopologyStudy", "seed": 1, "relays": 6})");
    const auto b = parse_config("{\"relays\":6,\n \"seed\":1,\"experiment\":\"TopologyStudy\"}");
    CHECK(a.config_hash == b.config_hash);
    CHECK(a.config_hash != parse_config(R"({"experiment": "TopologyStudy", "seed": 2})").config_hash);
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  }

  TEST_CASE("rows are identical across reruns and thread counts") {
    for (const char* text : {kCurve, kProto, kOutage, kTopology, kAudit}) {
      const auto cfg = parse_config(text);
      const std::string once = rows_as_csv(run_experiment(cfg, 1));
      CHECK(rows_as_csv(run_experiment(cfg, 1)) == once);
      CHECK(rows_as_csv(run_experiment(cfg, 3)) == once);
      CHECK_FALSE(once.empty());
    }
    // A different seed gives different Monte Carlo rows.
    CHECK(rows_as_csv(run_experiment(parse_config(kCurve, 43))) !=
          rows_as_csv(run_experiment(parse_config(kCurve))));
  }

  TEST_CASE("metadata block") {
    const auto cfg = parse_config(kOutage);
    const auto t = run_experiment(cfg);
    CHECK(t.meta("experiment") == "OutageCurve");
    CHECK(t.meta("seed") == "3");
    CHECK(t.meta("tool_version") == std::string(tool_version()));
    CHECK(t.meta("config_hash").size() == 16);
    CHECK_FALSE(t.meta("wall_clock_s").empty());
    CHECK_FALSE(t.meta("slope_OppAF").empty());
    CHECK(t.columns.front() == "scheme");
    CHECK(t.rows.size() == 6);
  }

  TEST_CASE("low event counts raise a warning") {
    const auto cfg = parse_config(R"({"experiment": "CollisionCurve", "seed": 1, "relays": 2,
      "policies": ["Min"], "lambda_over_c": [1e7], "trials": 10000})");
    CHECK(run_experiment(cfg).meta("warning").find("raise trials") != std::string::npos);
  }

  TEST_CASE("zero outage estimates surface as insufficient trials") {
    const auto cfg = parse_config(R"({"experiment": "OutageCurve", "seed": 1, "schemes": ["OppDF"],
      "relays": 3, "snr_db": [30, 40, 50], "rate": {"fixed_bits": 1}, "trials_per_point": 10000,
      "fit_window_db": [30, 50]})");
    CHECK_THROWS_AS(run_experiment(cfg), InsufficientTrialsError);
  }

  TEST_CASE("proto trace metadata and rows") {
    const auto t = run_experiment(parse_config(kProto));
    CHECK(t.rows.size() == 5 * 4);
    CHECK(t.meta("dominance_violations") == "0");
    CHECK(t.meta("protosim_collision_rate") == t.meta("abstract_collision_rate"));
    CHECK(t.meta("rounds") == "70000");
  }

  TEST_CASE("topology study rows") {
    const auto t = run_experiment(parse_config(kTopology));
    // Four cases, MC each, plus analytic for the three clustered cases.
    CHECK(t.rows.size() == 7);
  }
}
