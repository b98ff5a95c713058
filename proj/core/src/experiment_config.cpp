#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "oprelay/errors.hpp"
#include "oprelay/experiment.hpp"

namespace oprelay {
namespace {

using json = nlohmann::json;

// Walks one JSON object, remembering the path for error messages and which
// keys were consumed so that unknown keys can be rejected.
class Fields {
 public:
  Fields(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "/" + key; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(key.empty() ? (path_.empty() ? "/" : path_) : at(key), msg);
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  /// Optional key that was absent; keeps reject_unknown() quiet about it.
  void mark(const std::string& key) { seen_.insert(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!node_.contains(key)) fail(key, "required field is missing");
    return node_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : (seen_.insert(key), fallback);
  }

  std::int64_t integer(const std::string& key) {
    const json& v = raw(key);
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e18)
        return static_cast<std::int64_t>(d);
    }
    fail(key, "expected an integer");
  }
  std::int64_t integer(const std::string& key, std::int64_t fallback) {
    return has(key) ? integer(key) : (seen_.insert(key), fallback);
  }

  std::uint64_t count(const std::string& key, std::uint64_t fallback, std::uint64_t minimum) {
    if (!has(key)) {
      seen_.insert(key);
      return fallback;
    }
    const json& v = raw(key);
    std::uint64_t n = 0;
    if (v.is_number_unsigned()) {
      n = v.get<std::uint64_t>();
    } else {
      const std::int64_t i = integer(key);
      if (i < 0) fail(key, "must be non-negative");
      n = static_cast<std::uint64_t>(i);
    }
    if (n < minimum) fail(key, "must be >= " + std::to_string(minimum));
    return n;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) {
      seen_.insert(key);
      return fallback;
    }
    const json& v = raw(key);
    if (!v.is_boolean()) fail(key, "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key + "/" + std::to_string(i), "expected a number");
      const double d = v[i].get<double>();
      if (!std::isfinite(d)) fail(key + "/" + std::to_string(i), "must be finite");
      out.push_back(d);
    }
    return out;
  }

  std::vector<std::string> texts(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a non-empty array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) fail(key + "/" + std::to_string(i), "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  Fields object(const std::string& key) { return Fields(raw(key), at(key)); }

  void reject_unknown() const {
    for (auto it = node_.begin(); it != node_.end(); ++it)
      if (!seen_.count(it.key())) fail(it.key(), "unknown field");
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

Policy parse_policy(const std::string& s, Fields& f, const std::string& key) {
  if (s == "Min" || s == "min") return Policy::Min;
  if (s == "Harmonic" || s == "harmonic") return Policy::Harmonic;
  f.fail(key, "unknown policy '" + s + "' (expected Min or Harmonic)");
}

std::vector<Policy> parse_policies(Fields& f, const std::string& key) {
  std::vector<Policy> out;
  const auto names = f.texts(key);
  for (std::size_t i = 0; i < names.size(); ++i)
    out.push_back(parse_policy(names[i], f, key + "/" + std::to_string(i)));
  return out;
}

std::vector<Policy> policies_or_default(Fields& f, const std::string& key,
                                        std::vector<Policy> fallback) {
  if (!f.has(key)) return fallback;
  return parse_policies(f, key);
}

void require(bool ok, Fields& f, const std::string& key, const std::string& msg) {
  if (!ok) f.fail(key, msg);
}

FadingModel parse_fading(Fields& parent) {
  if (!parent.has("fading")) {
    parent.mark("fading");
    return FadingModel::rayleigh();
  }
  Fields f = parent.object("fading");
  const std::string kind = f.text("kind");
  FadingModel model = FadingModel::rayleigh();
  if (kind == "Rayleigh") {
    const double k = f.number("k_factor", 0.0);
    require(k == 0.0, f, "k_factor", "Rayleigh fading requires k_factor = 0");
  } else if (kind == "Ricean") {
    const double k = f.number("k_factor", 1.0);
    require(k >= 0.0, f, "k_factor", "must be >= 0");
    model = FadingModel::ricean(k);
  } else {
    f.fail("kind", "unknown fading kind '" + kind + "' (expected Rayleigh or Ricean)");
  }
  f.reject_unknown();
  return model;
}

void positive(Fields& f, const std::string& key, double v) {
  require(v > 0.0, f, key, "must be > 0");
}

std::vector<double> positive_list(Fields& f, const std::string& key) {
  auto v = f.numbers(key);
  for (std::size_t i = 0; i < v.size(); ++i)
    require(v[i] > 0.0, f, key + "/" + std::to_string(i), "must be > 0");
  return v;
}

int relay_count(Fields& f, const std::string& key, int fallback, int minimum,
                const std::string& why) {
  const std::int64_t m = f.integer(key, fallback);
  require(m >= minimum && m <= 4096, f, key,
          "must be between " + std::to_string(minimum) + " and 4096" + why);
  return static_cast<int>(m);
}

CollisionCurveParams parse_collision_curve(Fields& f) {
  CollisionCurveParams p;
  p.relays = relay_count(f, "relays", 6, 2, " (collision analysis needs M >= 2)");
  p.policies = policies_or_default(f, "policies", p.policies);
  p.fading = parse_fading(f);
  p.beta1 = f.number("beta1", 1.0);
  positive(f, "beta1", p.beta1);
  p.beta2 = f.number("beta2", 1.0);
  positive(f, "beta2", p.beta2);
  p.lambda_over_c = f.has("lambda_over_c") ? positive_list(f, "lambda_over_c") : p.lambda_over_c;
  p.trials = f.count("trials", p.trials, 10000);
  return p;
}

TopologyStudyParams parse_topology(Fields& f) {
  TopologyStudyParams p;
  if (f.has("exponents")) p.exponents = positive_list(f, "exponents");
  else f.mark("exponents");
  p.c_over_lambda = f.number("c_over_lambda", p.c_over_lambda);
  positive(f, "c_over_lambda", p.c_over_lambda);
  p.relays = relay_count(f, "relays", 6, 2, " (collision analysis needs M >= 2)");
  p.policies = policies_or_default(f, "policies", p.policies);
  p.trials = f.count("trials", p.trials, 10000);
  return p;
}

Point parse_point(const json& v, Fields& f, const std::string& key) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    f.fail(key, "expected [x, y] in metres");
  return {v[0].get<double>(), v[1].get<double>()};
}

ProtoTraceParams parse_proto(Fields& f) {
  ProtoTraceParams p;
  Fields g = f.object("geometry");
  if (g.has("uniform_delays")) {
    Fields u = g.object("uniform_delays");
    const int m = relay_count(u, "relays", 0, 1, "");
    const double n = u.number("relay_dest_us");
    const double r = u.number("relay_relay_us");
    require(n >= 0.0, u, "relay_dest_us", "must be >= 0");
    require(r >= 0.0, u, "relay_relay_us", "must be >= 0");
    u.reject_unknown();
    p.placement = uniform_delays(static_cast<std::size_t>(m), n, r);
  } else {
    NodeGeometry geo;
    geo.source = parse_point(g.raw("source"), g, "source");
    geo.destination = parse_point(g.raw("destination"), g, "destination");
    const json& relays = g.raw("relays");
    if (!relays.is_array() || relays.empty())
      g.fail("relays", "expected a non-empty array of [x, y] points");
    for (std::size_t i = 0; i < relays.size(); ++i)
      geo.relays.push_back(parse_point(relays[i], g, "relays/" + std::to_string(i)));
    geo.signal_speed_m_per_us = g.number("signal_speed_m_per_us", geo.signal_speed_m_per_us);
    positive(g, "signal_speed_m_per_us", geo.signal_speed_m_per_us);
    p.placement = geo;
  }
  g.reject_unknown();

  const PropagationDelays delays = p.delays();
  Fields t = f.object("timing");
  p.timing.hidden = t.boolean("hidden", false);
  p.timing.switch_us = t.number("switch_us");
  p.timing.flag_duration_us = t.number("flag_duration_us", 1.0);
  p.timing.r_max_us = t.number("r_max_us", p.timing.hidden ? 0.0 : delays.max_relay_relay());
  p.timing.n_max_us = t.number("n_max_us", delays.max_relay_dest());
  p.timing.cts_skew_max_us = t.number("cts_skew_max_us", delays.max_cts_skew());
  require(p.timing.switch_us >= 0.0, t, "switch_us", "must be >= 0");
  require(p.timing.flag_duration_us >= 0.0, t, "flag_duration_us", "must be >= 0");
  require(p.timing.r_max_us >= 0.0, t, "r_max_us", "must be >= 0");
  require(p.timing.n_max_us >= 0.0, t, "n_max_us", "must be >= 0");
  require(p.timing.cts_skew_max_us >= 0.0, t, "cts_skew_max_us", "must be >= 0");
  const double slack = 1e-9;
  require(delays.max_relay_dest() <= p.timing.n_max_us + slack, t, "n_max_us",
          "smaller than the largest relay-destination delay of the geometry");
  require(delays.max_cts_skew() <= p.timing.cts_skew_max_us + slack, t, "cts_skew_max_us",
          "smaller than the CTS arrival skew of the geometry");
  if (!p.timing.hidden)
    require(delays.max_relay_relay() <= p.timing.r_max_us + slack, t, "r_max_us",
            "smaller than the largest relay-relay delay of the geometry");
  t.reject_unknown();

  p.policy = f.has("policy") ? parse_policy(f.text("policy"), f, "policy") : Policy::Min;
  p.lambda_us = f.number("lambda_us", p.lambda_us);
  positive(f, "lambda_us", p.lambda_us);
  p.beta1 = f.number("beta1", 1.0);
  positive(f, "beta1", p.beta1);
  p.beta2 = f.number("beta2", 1.0);
  positive(f, "beta2", p.beta2);
  p.rounds = f.count("rounds", p.rounds, 1);
  p.trace_rounds = f.count("trace_rounds", std::min<std::uint64_t>(p.rounds, 1000), 0);
  require(p.trace_rounds <= p.rounds, f, "trace_rounds", "must not exceed rounds");
  return p;
}

OutageCurveParams parse_outage(Fields& f) {
  OutageCurveParams p;
  if (f.has("schemes")) {
    p.schemes.clear();
    const auto names = f.texts("schemes");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const auto& s = names[i];
      if (s == "Direct") p.schemes.push_back(Scheme::Direct);
      else if (s == "OppDF") p.schemes.push_back(Scheme::OppDF);
      else if (s == "OppAF") p.schemes.push_back(Scheme::OppAF);
      else f.fail("schemes/" + std::to_string(i), "unknown scheme '" + s + "' (Direct, OppDF, OppAF)");
    }
  }
  p.relays = relay_count(f, "relays", 2, 1, " (relaying needs M >= 1)");
  p.snr_db = f.numbers("snr_db");

  Fields r = f.object("rate");
  const bool fixed = r.has("fixed_bits");
  const bool mux = r.has("multiplexing_gain");
  if (fixed == mux) r.fail("", "specify exactly one of fixed_bits or multiplexing_gain");
  if (fixed) {
    p.rate = RateRule::fixed(r.number("fixed_bits"));
    require(p.rate.value > 0.0, r, "fixed_bits", "must be > 0");
  } else {
    p.rate = RateRule::multiplex(r.number("multiplexing_gain"));
    require(p.rate.value > 0.0 && p.rate.value < 0.5, r, "multiplexing_gain",
            "must lie in (0, 0.5)");
    for (std::size_t i = 0; i < p.snr_db.size(); ++i)
      require(p.snr_db[i] > 0.0, f, "snr_db/" + std::to_string(i),
              "must be > 0 dB when the rate grows with log SNR");
  }
  r.reject_unknown();

  p.trials_per_point = f.count("trials_per_point", p.trials_per_point, 10000);
  if (f.has("estimator")) {
    const std::string e = f.text("estimator");
    if (e == "plain") p.estimator = OutageEstimator::Plain;
    else if (e == "importance") p.estimator = OutageEstimator::Importance;
    else f.fail("estimator", "expected 'plain' or 'importance'");
  }
  if (f.has("fit_window_db")) {
    const auto w = f.numbers("fit_window_db");
    require(w.size() == 2 && w[0] < w[1], f, "fit_window_db", "expected [low_db, high_db] with low < high");
    std::size_t inside = 0;
    for (double s : p.snr_db) inside += (s >= w[0] && s <= w[1]) ? 1 : 0;
    require(inside >= 3, f, "fit_window_db", "needs at least 3 SNR points inside the window");
    p.fit_window_db = std::make_pair(w[0], w[1]);
  }
  return p;
}

OracleAuditParams parse_audit(Fields& f) {
  OracleAuditParams p;
  if (f.has("relays")) {
    const auto m = f.numbers("relays");
    p.relays.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      require(m[i] == std::floor(m[i]) && m[i] >= 2 && m[i] <= 4096, f,
              "relays/" + std::to_string(i), "must be an integer >= 2 (analytic path needs M >= 2)");
      p.relays.push_back(static_cast<int>(m[i]));
    }
  }
  p.policies = policies_or_default(f, "policies", p.policies);
  p.lambda_over_c = f.has("lambda_over_c") ? positive_list(f, "lambda_over_c") : p.lambda_over_c;
  p.beta1 = f.number("beta1", 1.0);
  positive(f, "beta1", p.beta1);
  p.beta2 = f.number("beta2", 1.0);
  positive(f, "beta2", p.beta2);
  p.trials = f.count("trials", p.trials, 10000);
  return p;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig parse_config(std::string_view text, std::optional<std::uint64_t> seed_override) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }

  Fields f(root, "");
  ExperimentConfig cfg;
  const std::string kind = f.text("experiment");
  if (kind == "CollisionCurve") cfg.kind = ExperimentKind::CollisionCurve;
  else if (kind == "TopologyStudy") cfg.kind = ExperimentKind::TopologyStudy;
  else if (kind == "ProtoTrace") cfg.kind = ExperimentKind::ProtoTrace;
  else if (kind == "OutageCurve") cfg.kind = ExperimentKind::OutageCurve;
  else if (kind == "OracleAudit") cfg.kind = ExperimentKind::OracleAudit;
  else f.fail("experiment", "unknown experiment kind '" + kind + "'");

  if (f.has("seed")) {
    const json& s = f.raw("seed");
    if (s.is_number_unsigned()) cfg.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<std::int64_t>() >= 0) cfg.seed = s.get<std::uint64_t>();
    else f.fail("seed", "expected a non-negative integer");
  } else if (!seed_override) {
    f.fail("seed", "required field is missing (or pass --seed)");
  } else {
    f.mark("seed");
  }
  if (seed_override) cfg.seed = *seed_override;

  if (f.has("output")) cfg.output = f.text("output");
  else f.mark("output");

  switch (cfg.kind) {
    case ExperimentKind::CollisionCurve: cfg.params = parse_collision_curve(f); break;
    case ExperimentKind::TopologyStudy: cfg.params = parse_topology(f); break;
    case ExperimentKind::ProtoTrace: cfg.params = parse_proto(f); break;
    case ExperimentKind::OutageCurve: cfg.params = parse_outage(f); break;
    case ExperimentKind::OracleAudit: cfg.params = parse_audit(f); break;
  }
  f.reject_unknown();

  cfg.config_hash = fnv1a64(root.dump());
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), seed_override);
}

}  // namespace oprelay
