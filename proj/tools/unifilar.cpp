// Command-line front end for the unifilar channel solvers.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "unifilar/bound.hpp"
#include "unifilar/capacity.hpp"
#include "unifilar/channel.hpp"
#include "unifilar/common.hpp"
#include "unifilar/divergence_mdp.hpp"
#include "unifilar/mc_verify.hpp"
#include "unifilar/pair_mdp.hpp"
#include "unifilar/report.hpp"

using namespace unifilar;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNotConverged = 3;

struct Options {
  std::string preset;
  std::string channel_file;
  int belief_grid = 100;
  int policy_grid = 21;
  int capacity_grid = 200;
  int capacity_policy_grid = 21;
  double tolerance = 1e-6;
  std::int64_t max_horizon = 1'000'000;
  std::uint64_t seed = 1;
  std::string out;
  bool strict = false;
  int precision = 4;

  // bound
  int samples = 11;
  double c1_override = -1.0;
  double capacity_override = -1.0;
  std::string json_out;

  // verify
  int replications = 200;
  std::int64_t horizon = 10'000;
};

struct Run {
  const Options& opt;
  bool converged = true;

  SolverConfig solver() const {
    SolverConfig cfg;
    cfg.tolerance = opt.tolerance;
    cfg.max_horizon = opt.max_horizon;
    cfg.check();
    return cfg;
  }
  GridSpec grids() const { return {opt.belief_grid, opt.policy_grid}; }
  GridSpec capacity_grids() const { return {opt.capacity_grid, opt.capacity_policy_grid}; }
  json num(double v) const { return json_number(v, opt.precision); }
  std::string fmt(double v) const { return format_number(v, opt.precision); }
  void track(const GainResult& g) { converged = converged && g.converged; }
};

ChannelSpec read_channel(const Options& opt) {
  if (opt.preset.empty() == opt.channel_file.empty())
    throw InvalidParameter("give exactly one of --preset or --channel");
  if (!opt.preset.empty()) return build_preset(PresetId::parse(opt.preset));
  std::ifstream in(opt.channel_file);
  if (!in) throw InvalidParameter("cannot read channel file " + opt.channel_file);
  std::stringstream text;
  text << in.rdbuf();
  return load_channel(text.str());
}

std::string channel_name(const Options& opt) {
  return opt.preset.empty() ? opt.channel_file : PresetId::parse(opt.preset).name();
}

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opt.out, std::ios::binary);
  if (!out) throw InvalidParameter("cannot write " + opt.out);
  out << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double capacity_of(Run& run, const ChannelSpec& spec) {
  if (run.opt.capacity_override > 0.0) return run.opt.capacity_override;
  const CapacityResult cap = estimate_capacity(spec, run.capacity_grids(), run.solver());
  run.track(cap.gains);
  return cap.capacity_bits;
}

int cmd_info(Run& run) {
  emit(run.opt, describe_channel(read_channel(run.opt)));
  return 0;
}

int cmd_solve_c1(Run& run) {
  const ChannelSpec spec = read_channel(run.opt);
  const C1Result c1 = compute_C1(spec, run.grids(), run.solver());
  const C1StarResult star = compute_C1star(spec, run.grids(), run.solver());
  run.track(c1.gains);
  run.track(star.gains);
  json j = {{"channel", channel_name(run.opt)},
            {"belief_grid", run.opt.belief_grid},
            {"policy_grid", run.opt.policy_grid},
            {"C1", run.num(c1.sup)},
            {"infV", run.num(c1.inf)},
            {"C1_star", run.num(star.value)},
            {"converged", c1.gains.converged && star.gains.converged},
            {"span_residual", run.num(c1.gains.span_residual)},
            {"horizon_used", c1.gains.horizon_used}};
  emit(run.opt, dump(j));
  return 0;
}

int cmd_solve_pair(Run& run) {
  const ChannelSpec spec = read_channel(run.opt);
  const PairResult pair = compute_Vtilde(spec, run.solver());
  run.track(pair.gains);
  json states = json::object();
  for (int i = 0; i < static_cast<int>(pair.gains.gain.size()); ++i) {
    const PairState p = pair_state_of(spec, i);
    states["(" + std::to_string(p.s0) + "," + std::to_string(p.s1) + ")"] = run.num(pair.gains.gain[i]);
  }
  json j = {{"channel", channel_name(run.opt)},
            {"Vtilde_max", run.num(pair.max)},
            {"Vtilde_min", run.num(pair.min)},
            {"gains", states},
            {"result", to_json(pair.gains, run.opt.precision)},
            {"converged", pair.gains.converged},
            {"span_residual", run.num(pair.gains.span_residual)}};
  emit(run.opt, dump(j));
  return 0;
}

int cmd_solve_capacity(Run& run) {
  const ChannelSpec spec = read_channel(run.opt);
  const CapacityResult cap = estimate_capacity(spec, run.capacity_grids(), run.solver());
  run.track(cap.gains);
  json j = {{"channel", channel_name(run.opt)},
            {"capacity_bits", run.num(cap.capacity_bits)},
            {"grid", {{"belief", cap.belief_resolution}, {"policy", cap.policy_resolution}}},
            {"residual", run.num(cap.residual)},
            {"converged", cap.gains.converged}};
  emit(run.opt, dump(j));
  return 0;
}

int cmd_bound(Run& run) {
  const ChannelSpec spec = read_channel(run.opt);
  double c1 = run.opt.c1_override;
  double c1_star = kInf;
  double vtilde = kInf;
  if (c1 < 0.0) {
    const C1Result r = compute_C1(spec, run.grids(), run.solver());
    run.track(r.gains);
    c1 = r.sup;
  }
  const double capacity = capacity_of(run, spec);
  BoundInputs inputs{c1, capacity,
                     "asymptotic envelope; belief_grid=" + std::to_string(run.opt.belief_grid) +
                         " policy_grid=" + std::to_string(run.opt.policy_grid) +
                         " capacity_grid=" + std::to_string(run.opt.capacity_grid)};
  const BoundCurve curve = emit_curve(inputs, run.opt.samples);
  emit(run.opt, curve_to_csv(curve, run.opt.precision));

  if (!run.opt.json_out.empty()) {
    const C1StarResult star = compute_C1star(spec, run.grids(), run.solver());
    run.track(star.gains);
    c1_star = star.value;
    const PairResult pair = compute_Vtilde(spec, run.solver());
    run.track(pair.gains);
    vtilde = pair.max;
    json samples = json::array();
    for (const auto& s : curve.samples) samples.push_back({run.num(s.rate), run.num(s.exponent)});
    json j = {{"channel", channel_name(run.opt)},
              {"C", run.num(capacity)},
              {"C1", run.num(c1)},
              {"C1_star", run.num(c1_star)},
              {"Vtilde_max", run.num(vtilde)},
              {"C2", run.num(compute_C2(spec))},
              {"curve", samples},
              {"metadata", curve.metadata}};
    std::ofstream out(run.opt.json_out, std::ios::binary);
    if (!out) throw InvalidParameter("cannot write " + run.opt.json_out);
    out << dump(j);
  }
  return 0;
}

int cmd_table2(Run& run) {
  const std::vector<std::string> rows = {"A", "B,0.9", "C,0.5,0.1", "C,0.9,0.1", "D,0.5,0.1,0.1,0.1",
                                         "D,0.9,0.1,0.1,0.1"};
  std::string csv = "channel,infV,supV,minVt,maxVt,C1,C1star\n";
  for (const auto& row : rows) {
    const PresetId id = PresetId::parse(row);
    const ChannelSpec spec = build_preset(id);
    const C1Result c1 = compute_C1(spec, run.grids(), run.solver());
    const PairResult pair = compute_Vtilde(spec, run.solver());
    const C1StarResult star = compute_C1star(spec, run.grids(), run.solver());
    run.track(c1.gains);
    run.track(pair.gains);
    run.track(star.gains);
    csv += "\"" + id.name() + "\"," + run.fmt(c1.inf) + "," + run.fmt(c1.sup) + "," + run.fmt(pair.min) + "," +
           run.fmt(pair.max) + "," + run.fmt(c1.sup) + "," + run.fmt(star.value) + "\n";
  }
  emit(run.opt, csv);
  return 0;
}

json drift_json(const Run& run, const std::vector<DriftBucket>& buckets) {
  json out = json::array();
  for (const auto& b : buckets) {
    if (b.count == 0) continue;
    out.push_back({{"low", run.num(b.h_low)},
                   {"high", run.num(b.h_high)},
                   {"count", b.count},
                   {"mean", run.num(b.mean)},
                   {"stderr", run.num(b.stderr_mean)},
                   {"flagged", b.flagged}});
  }
  return out;
}

int cmd_verify(Run& run) {
  const ChannelSpec spec = read_channel(run.opt);
  const SolverConfig cfg = run.solver();
  json checks = json::array();

  const PairResult pair = compute_Vtilde(spec, cfg);
  run.track(pair.gains);
  if (std::isfinite(pair.max)) {
    int start = 0;
    for (int i = 0; i < static_cast<int>(pair.gains.gain.size()); ++i)
      if (pair.gains.gain[i] > pair.gains.gain[start]) start = i;
    const PairState ps = pair_state_of(spec, start);
    HypothesisSim sim;
    sim.channel = spec;
    sim.policy = pair_policy(spec, pair.gains.policy);
    sim.initial_s0 = ps.s0;
    sim.initial_b1.assign(spec.num_states, 0.0);
    sim.initial_b1[ps.s1] = 1.0;
    sim.horizon = run.opt.horizon;
    sim.seed = run.opt.seed;
    sim.replications = run.opt.replications;
    const DivergenceEstimate est = simulate_divergence(sim);
    const bool pass = std::abs(est.mean_llr_rate - pair.max) <= 3.0 * est.stderr_rate;
    checks.push_back({{"check", "pair_policy_divergence"},
                      {"mdp_gain", run.num(pair.max)},
                      {"estimate", run.num(est.mean_llr_rate)},
                      {"stderr", run.num(est.stderr_rate)},
                      {"pass", pass}});
  }

  const double capacity = capacity_of(run, spec);
  EntropyDriftConfig drift_cfg;
  drift_cfg.seed = run.opt.seed;
  drift_cfg.capacity = capacity;
  drift_cfg.windows = 3;
  drift_cfg.replications = std::max(run.opt.replications, 1000);
  const DriftReport drift = check_entropy_drift(spec, greedy_balancing_encoder(), drift_cfg);
  checks.push_back({{"check", "entropy_drift"},
                    {"threshold", run.num(drift.threshold)},
                    {"buckets", drift_json(run, drift.buckets)},
                    {"pass", drift.violations == 0}});

  const SubmartingaleConfig k = submartingale_constants(drift.paths, 0.5);
  const SubmartingaleReport sub = check_submartingale(drift.paths, k.K1, k.K2, k.K3, k.H_star);
  checks.push_back({{"check", "submartingale"},
                    {"K1", run.num(k.K1)},
                    {"K2", run.num(k.K2)},
                    {"K3", run.num(k.K3)},
                    {"H_star", run.num(k.H_star)},
                    {"lambda", run.num(sub.config.lambda)},
                    {"buckets", drift_json(run, sub.buckets)},
                    {"pass", sub.violations == 0}});

  const auto runs = simulate_decoding(spec, greedy_balancing_encoder(), 16, 0.99, 1000,
                                      std::max(run.opt.replications, 1000), run.opt.seed);
  const FanoReport fano = check_fano(runs, 16);
  checks.push_back({{"check", "fano"},
                    {"error_rate", run.num(fano.error_rate)},
                    {"mean_entropy", run.num(fano.mean_entropy)},
                    {"bound", run.num(fano.bound)},
                    {"pass", fano.holds}});

  json j = {{"channel", channel_name(run.opt)}, {"seed", run.opt.seed}, {"checks", checks}};
  emit(run.opt, dump(j));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-exponent bounds for unifilar channels with feedback"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub, bool channel) {
    if (channel) {
      sub->add_option("--preset", opt.preset, "Preset such as A, B,0.9, C,0.5,0.1");
      sub->add_option("--channel", opt.channel_file, "Channel description file");
    }
    sub->add_option("--belief-grid", opt.belief_grid, "Belief grid points")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--policy-grid", opt.policy_grid, "Policy grid points per row")->check(CLI::Range(2, 1 << 12));
    sub->add_option("--capacity-grid", opt.capacity_grid, "Belief grid for capacity")->check(CLI::Range(2, 1 << 20));
    sub->add_option("--capacity-policy-grid", opt.capacity_policy_grid, "Policy grid for capacity")
        ->check(CLI::Range(2, 1 << 12));
    sub->add_option("--tolerance", opt.tolerance, "Value-iteration tolerance");
    sub->add_option("--max-horizon", opt.max_horizon, "Iteration cap");
    sub->add_option("--seed", opt.seed, "Monte Carlo seed");
    sub->add_option("--out", opt.out, "Output file (default stdout)");
    sub->add_flag("--strict", opt.strict, "Exit 3 if any solve did not converge");
    sub->add_option("--precision", opt.precision, "Significant digits")->check(CLI::Range(1, 17));
  };

  auto* info = app.add_subcommand("info", "Print a channel");
  add_common(info, true);
  auto* c1 = app.add_subcommand("solve-c1", "Belief-state divergence MDP");
  add_common(c1, true);
  auto* pair = app.add_subcommand("solve-pair", "Pair-state upper bound");
  add_common(pair, true);
  auto* cap = app.add_subcommand("solve-capacity", "Feedback capacity estimate");
  add_common(cap, true);
  auto* bound = app.add_subcommand("bound", "Straight-line error-exponent bound");
  add_common(bound, true);
  bound->add_option("--samples", opt.samples, "Curve samples")->check(CLI::Range(2, 1 << 20));
  bound->add_option("--c1", opt.c1_override, "Use this C1 instead of solving");
  bound->add_option("--capacity", opt.capacity_override, "Use this capacity instead of solving");
  bound->add_option("--json", opt.json_out, "Also write the JSON bundle here");
  auto* table = app.add_subcommand("table2", "Asymptotic rewards for the six reference channels");
  add_common(table, false);
  auto* verify = app.add_subcommand("verify", "Monte Carlo checks");
  add_common(verify, true);
  verify->add_option("--replications", opt.replications)->check(CLI::PositiveNumber);
  verify->add_option("--horizon", opt.horizon)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  Run run{opt};
  try {
    int code = 0;
    if (*info) code = cmd_info(run);
    else if (*c1) code = cmd_solve_c1(run);
    else if (*pair) code = cmd_solve_pair(run);
    else if (*cap) code = cmd_solve_capacity(run);
    else if (*bound) code = cmd_bound(run);
    else if (*table) code = cmd_table2(run);
    else if (*verify) code = cmd_verify(run);
    if (code == 0 && opt.strict && !run.converged) {
      std::cerr << "error: a solve did not converge\n";
      return kExitNotConverged;
    }
    return code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}
