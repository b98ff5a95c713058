#include "oprelay/experiment.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <limits>

#include "oprelay/errors.hpp"
#include "oprelay/ordered_stats.hpp"
#include "oprelay/parallel.hpp"

#ifndef OPRELAY_VERSION_STRING
#define OPRELAY_VERSION_STRING "0.0.0"
#endif

namespace oprelay {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kMinEventsForPrecision = 10;
constexpr std::uint64_t kProtoStreamTag = 0x70726f746f000000ULL;

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string fading_name(const FadingModel& m) {
  return m.kind() == FadingKind::Rayleigh ? "Rayleigh" : "Ricean";
}

double z_score(double analytic, const McEstimate& mc) {
  if (mc.std_error > 0.0) return (mc.probability - analytic) / mc.std_error;
  return mc.probability == analytic ? 0.0 : std::numeric_limits<double>::infinity();
}

class Warnings {
 public:
  void low_events(const std::string& where, const McEstimate& e) {
    if (e.events < kMinEventsForPrecision) add(where + ": only " + std::to_string(e.events) +
                                               " events; raise trials");
  }
  void add(const std::string& w) {
    if (!text_.empty()) text_ += "; ";
    text_ += w;
  }
  void store(ResultTable& t) const {
    if (!text_.empty()) t.set_meta("warning", text_);
  }

 private:
  std::string text_;
};

ResultTable run_collision_curve(const CollisionCurveParams& p, std::uint64_t seed,
                                unsigned threads, Warnings& warn) {
  ResultTable t;
  t.columns = {"policy", "fading", "k_factor", "relays", "lambda_over_c", "analytic",
               "analytic_abs_error", "mc", "mc_std_error", "z_score", "trials"};
  std::vector<double> windows;
  for (double lc : p.lambda_over_c) windows.push_back(1.0 / lc);

  for (std::size_t pi = 0; pi < p.policies.size(); ++pi) {
    const Policy policy = p.policies[pi];
    CollisionSimulation sim;
    sim.policy = policy;
    sim.fading = p.fading;
    sim.relays.assign(static_cast<std::size_t>(p.relays), RelayProfile(p.beta1, p.beta2));
    const auto mc = mc_collision_rates(sim, windows, p.trials, cell_seed(seed, pi), threads);

    for (std::size_t k = 0; k < windows.size(); ++k) {
      double analytic = kNaN, abs_err = kNaN, z = kNaN;
      if (p.fading.kind() == FadingKind::Rayleigh) {
        const CollisionQuery q{p.relays, windows[k],
                               TimerDistribution(policy, p.beta1, p.beta2, 1.0)};
        const auto r = collision_prob_analytic(q);
        analytic = r.value;
        abs_err = r.abs_error;
        z = z_score(analytic, mc[k]);
      }
      warn.low_events(std::string(to_string(policy)) + "@" + format_double(p.lambda_over_c[k]), mc[k]);
      t.add_row({std::string(to_string(policy)), fading_name(p.fading), p.fading.k_factor(),
                 std::int64_t{p.relays}, p.lambda_over_c[k], analytic, abs_err,
                 mc[k].probability, mc[k].std_error, z,
                 static_cast<std::int64_t>(p.trials)});
    }
  }
  return t;
}

ResultTable run_topology(const TopologyStudyParams& p, std::uint64_t seed, unsigned threads,
                         Warnings& warn) {
  ResultTable t;
  t.columns = {"exponent", "case", "case_index", "policy", "method", "probability", "error"};
  constexpr TopologyCase kCases[] = {TopologyCase::Midway, TopologyCase::Third,
                                     TopologyCase::Tenth, TopologyCase::Line};
  const double window = p.c_over_lambda;
  std::uint64_t cell = 0;
  for (double v : p.exponents) {
    for (int ci = 0; ci < 4; ++ci) {
      const Topology topo = make_topology(kCases[ci], v, static_cast<std::size_t>(p.relays));
      for (Policy policy : p.policies) {
        const std::string case_name(to_string(kCases[ci]));
        const std::string policy_name(to_string(policy));
        if (topo.identical()) {
          const auto& prof = topo.profiles.front();
          const CollisionQuery q{p.relays, window,
                                 TimerDistribution(policy, prof.beta1(), prof.beta2(), 1.0)};
          const auto r = collision_prob_analytic(q);
          t.add_row({v, case_name, std::int64_t{ci + 1}, policy_name, std::string("analytic"),
                     r.value, r.abs_error});
        }
        CollisionSimulation sim;
        sim.policy = policy;
        sim.relays = topo.profiles;
        const auto mc = mc_collision_rates(sim, std::span<const double>(&window, 1), p.trials,
                                           cell_seed(seed, cell++), threads)
                            .front();
        warn.low_events(case_name + "/" + policy_name, mc);
        t.add_row({v, case_name, std::int64_t{ci + 1}, policy_name, std::string("mc"),
                   mc.probability, mc.std_error});
      }
    }
  }
  return t;
}

struct ProtoPartial {
  std::uint64_t rounds = 0;
  std::uint64_t proto_collisions = 0;
  std::uint64_t abstract_collisions = 0;
  std::uint64_t dominance_violations = 0;
  std::vector<std::vector<Cell>> rows;

  ProtoPartial& operator+=(const ProtoPartial& o) {
    rounds += o.rounds;
    proto_collisions += o.proto_collisions;
    abstract_collisions += o.abstract_collisions;
    dominance_violations += o.dominance_violations;
    rows.insert(rows.end(), o.rows.begin(), o.rows.end());
    return *this;
  }
};

double optional_or_nan(const std::optional<double>& v) { return v ? *v : kNaN; }

ResultTable run_proto(const ProtoTraceParams& p, std::uint64_t seed, unsigned threads) {
  ResultTable t;
  t.columns = {"round", "relay", "h", "timer_us", "cts_arrival_us", "scheduled_fire_us",
               "fired_us", "heard_us", "fired", "abstract_winner", "collided",
               "abstract_collided"};
  const PropagationDelays delays = p.delays();
  const std::size_t m = delays.relays();
  const FadingModel hop_sr = FadingModel::rayleigh(1.0 / p.beta1);
  const FadingModel hop_rd = FadingModel::rayleigh(1.0 / p.beta2);

  auto body = [&](std::uint64_t chunk, std::uint64_t first, std::uint64_t count) {
    Rng rng = Rng::stream(seed, kProtoStreamTag, chunk);
    ProtoPartial part;
    std::vector<LinkGains> gains(m);
    for (std::uint64_t i = 0; i < count; ++i) {
      for (auto& g : gains) {
        g.source_relay = hop_sr.sample(rng);
        g.relay_dest = hop_rd.sample(rng);
      }
      const RoundTrace tr = simulate_round(delays, p.timing, p.policy, p.lambda_us, gains);
      // trace.outcome.collided is the event-model flag; recompute the abstract one.
      const bool abstract =
          run_selection_round(p.policy, p.lambda_us, tr.outcome.window_us, gains).collided;
      ++part.rounds;
      part.proto_collisions += tr.outcome.collided ? 1 : 0;
      part.abstract_collisions += abstract ? 1 : 0;
      part.dominance_violations += (tr.outcome.collided && !abstract) ? 1 : 0;
      const std::uint64_t round = first + i;
      if (round >= p.trace_rounds) continue;
      for (std::size_t j = 0; j < m; ++j) {
        const auto& r = tr.relays[j];
        part.rows.push_back({static_cast<std::int64_t>(round), static_cast<std::int64_t>(j),
                             tr.outcome.h_values[j], r.timer_us, r.cts_arrival_us,
                             r.scheduled_fire_us, optional_or_nan(r.fired_us),
                             optional_or_nan(r.heard_us), std::int64_t{r.fired_us ? 1 : 0},
                             std::int64_t{tr.outcome.winner == j ? 1 : 0},
                             std::int64_t{tr.outcome.collided ? 1 : 0},
                             std::int64_t{abstract ? 1 : 0}});
      }
    }
    return part;
  };

  ProtoPartial total = run_chunked<ProtoPartial>(p.rounds, threads, body);
  t.rows = std::move(total.rows);
  const McEstimate proto = binomial_estimate(total.proto_collisions, total.rounds);
  const McEstimate abstract = binomial_estimate(total.abstract_collisions, total.rounds);
  t.set_meta("rounds", std::to_string(total.rounds));
  t.set_meta("window_us", format_double(collision_window(p.timing)));
  t.set_meta("protosim_collision_rate", format_double(proto.probability));
  t.set_meta("protosim_collision_std_error", format_double(proto.std_error));
  t.set_meta("abstract_collision_rate", format_double(abstract.probability));
  t.set_meta("abstract_collision_std_error", format_double(abstract.std_error));
  t.set_meta("dominance_violations", std::to_string(total.dominance_violations));
  return t;
}

ResultTable run_outage(const OutageCurveParams& p, std::uint64_t seed, unsigned threads,
                       Warnings& warn) {
  ResultTable t;
  t.columns = {"scheme", "relays", "snr_db", "rate_bits", "pe", "std_error", "events", "trials",
               "closed_form"};
  for (std::size_t si = 0; si < p.schemes.size(); ++si) {
    DmtScenario scn;
    scn.relays = p.relays;
    scn.snr_db = p.snr_db;
    scn.rate = p.rate;
    scn.scheme = p.schemes[si];
    scn.trials_per_point = p.trials_per_point;
    scn.estimator = p.estimator;
    const auto curve = outage_curve(scn, cell_seed(seed, si), threads);
    const std::string name(to_string(scn.scheme));
    for (const auto& pt : curve) {
      const double rho = std::pow(10.0, pt.snr_db / 10.0);
      const double closed =
          scn.scheme == Scheme::Direct ? direct_outage_closed_form(rho, pt.rate) : kNaN;
      if (pt.events < kMinEventsForPrecision)
        warn.add(name + "@" + format_double(pt.snr_db) + "dB: only " +
                 std::to_string(pt.events) + " outage events; raise trials_per_point");
      t.add_row({name, std::int64_t{p.relays}, pt.snr_db, pt.rate, pt.probability, pt.std_error,
                 static_cast<std::int64_t>(pt.events), static_cast<std::int64_t>(pt.trials),
                 closed});
    }
    if (p.fit_window_db) {
      const double slope = diversity_slope(curve, p.fit_window_db->first, p.fit_window_db->second);
      t.set_meta("slope_" + name, format_double(slope));
    }
  }
  t.set_meta("estimator", p.estimator == OutageEstimator::Plain ? "plain" : "importance");
  return t;
}

ResultTable run_audit(const OracleAuditParams& p, std::uint64_t seed, unsigned threads) {
  ResultTable t;
  t.columns = {"relays", "policy", "lambda_over_c", "analytic", "analytic_abs_error", "mc",
               "mc_std_error", "z_score", "within_3sigma"};
  std::vector<double> windows;
  for (double lc : p.lambda_over_c) windows.push_back(1.0 / lc);
  std::uint64_t cell = 0;
  double worst = 0.0;
  std::int64_t failed = 0;
  for (int m : p.relays) {
    for (Policy policy : p.policies) {
      CollisionSimulation sim;
      sim.policy = policy;
      sim.relays.assign(static_cast<std::size_t>(m), RelayProfile(p.beta1, p.beta2));
      const auto mc = mc_collision_rates(sim, windows, p.trials, cell_seed(seed, cell++), threads);
      for (std::size_t k = 0; k < windows.size(); ++k) {
        const CollisionQuery q{m, windows[k], TimerDistribution(policy, p.beta1, p.beta2, 1.0)};
        const auto a = collision_prob_analytic(q);
        // Quadrature error is folded into the tolerance.
        const double z = z_score(a.value, mc[k]);
        const bool ok = std::fabs(mc[k].probability - a.value) <= 3.0 * mc[k].std_error + a.abs_error;
        worst = std::max(worst, std::fabs(z));
        failed += ok ? 0 : 1;
        t.add_row({std::int64_t{m}, std::string(to_string(policy)), p.lambda_over_c[k], a.value,
                   a.abs_error, mc[k].probability, mc[k].std_error, z, std::int64_t{ok ? 1 : 0}});
      }
    }
  }
  t.set_meta("max_abs_z", format_double(worst));
  t.set_meta("cells_outside_3sigma", std::to_string(failed));
  return t;
}

}  // namespace

std::string_view to_string(ExperimentKind k) noexcept {
  switch (k) {
    case ExperimentKind::CollisionCurve: return "CollisionCurve";
    case ExperimentKind::TopologyStudy: return "TopologyStudy";
    case ExperimentKind::ProtoTrace: return "ProtoTrace";
    case ExperimentKind::OutageCurve: return "OutageCurve";
    case ExperimentKind::OracleAudit: return "OracleAudit";
  }
  return "CollisionCurve";
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed ^ mix64(index + 0x5bd1e995ULL));
}

std::string_view tool_version() noexcept { return OPRELAY_VERSION_STRING; }

PropagationDelays ProtoTraceParams::delays() const {
  if (const auto* geo = std::get_if<NodeGeometry>(&placement)) return propagation_delays(*geo);
  return std::get<PropagationDelays>(placement);
}

ResultTable run_experiment(const ExperimentConfig& cfg, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  Warnings warn;
  ResultTable table;
  switch (cfg.kind) {
    case ExperimentKind::CollisionCurve:
      table = run_collision_curve(std::get<CollisionCurveParams>(cfg.params), cfg.seed, threads, warn);
      break;
    case ExperimentKind::TopologyStudy:
      table = run_topology(std::get<TopologyStudyParams>(cfg.params), cfg.seed, threads, warn);
      break;
    case ExperimentKind::ProtoTrace:
      table = run_proto(std::get<ProtoTraceParams>(cfg.params), cfg.seed, threads);
      break;
    case ExperimentKind::OutageCurve:
      table = run_outage(std::get<OutageCurveParams>(cfg.params), cfg.seed, threads, warn);
      break;
    case ExperimentKind::OracleAudit:
      table = run_audit(std::get<OracleAuditParams>(cfg.params), cfg.seed, threads);
      break;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<std::pair<std::string, std::string>> head = {
      {"experiment", std::string(to_string(cfg.kind))},
      {"config_hash", hex64(cfg.config_hash)},
      {"seed", std::to_string(cfg.seed)},
      {"tool_version", std::string(tool_version())},
      {"threads", std::to_string(resolve_threads(threads))},
      {"wall_clock_s", format_double(elapsed)},
  };
  head.insert(head.end(), table.metadata.begin(), table.metadata.end());
  table.metadata = std::move(head);
  warn.store(table);
  return table;
}

}  // namespace oprelay
