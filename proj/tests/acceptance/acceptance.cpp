// Acceptance suite: one PASS/FAIL line per criterion, preceded by the
// measured values. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "unifilar/bound.hpp"
#include "unifilar/capacity.hpp"
#include "unifilar/common.hpp"
#include "unifilar/divergence_mdp.hpp"
#include "unifilar/mc_verify.hpp"
#include "unifilar/pair_mdp.hpp"

using namespace unifilar;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

ChannelSpec preset(const std::string& name) { return build_preset(PresetId::parse(name)); }

struct Reporter {
  int failures = 0;

  // Prints one detail line and returns whether |got - want| <= tol.
  bool near(const std::string& label, double got, double want, double tol) {
    const bool ok = std::abs(got - want) <= tol;
    std::printf("    %-44s got %-10.5f want %.3f +/- %g %s\n", label.c_str(), got, want, tol, ok ? "ok" : "MISS");
    return ok;
  }
  bool check(const std::string& label, bool ok, const std::string& detail) {
    std::printf("    %-44s %s %s\n", label.c_str(), detail.c_str(), ok ? "ok" : "MISS");
    return ok;
  }
  void verdict(int id, const std::string& name, bool ok) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, name.c_str());
    std::fflush(stdout);
    failures += !ok;
  }
};

std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

const std::vector<std::string> kFinite = {"C,0.5,0.1", "C,0.9,0.1", "D,0.5,0.1,0.1,0.1", "D,0.9,0.1,0.1,0.1"};

void pair_reproduction(Reporter& rep, const SolverConfig& cfg) {
  struct Row {
    std::string name;
    double max;
    double min;  // NaN when the table gives no separate minimum
  };
  const std::vector<Row> rows = {{"C,0.5,0.1", 1.637, NAN},
                                 {"C,0.9,0.1", 2.536, 2.533},
                                 {"D,0.9,0.1,0.1,0.1", 2.536, 2.533},
                                 {"D,0.5,0.1,0.1,0.1", 2.298, NAN}};
  bool ok = true;
  for (const Row& r : rows) {
    const auto t0 = Clock::now();
    const PairResult p = compute_Vtilde(preset(r.name), cfg);
    const double secs = seconds_since(t0);
    ok &= rep.near(r.name + " max Vtilde", p.max, r.max, 0.002);
    if (!std::isnan(r.min)) ok &= rep.near(r.name + " min Vtilde", p.min, r.min, 0.002);
    ok &= rep.check(r.name + " runtime", secs < 1.0, fmt("%.3f s", secs));
  }
  rep.verdict(1, "pair-MDP reference values within 0.002 bits, < 1 s each", ok);
}

void belief_reproduction(Reporter& rep, const SolverConfig& cfg) {
  const double sup[] = {1.637, 2.536, 2.303, 2.536};
  const double inf[] = {1.633, 2.459, 2.274, 2.459};
  bool ok = true;
  for (std::size_t i = 0; i < kFinite.size(); ++i) {
    const auto t0 = Clock::now();
    const C1Result r = compute_C1(preset(kFinite[i]), {100, 21}, cfg);
    const double secs = seconds_since(t0);
    ok &= rep.near(kFinite[i] + " sup V", r.sup, sup[i], 0.02);
    ok &= rep.near(kFinite[i] + " inf V", r.inf, inf[i], 0.02);
    ok &= rep.check(kFinite[i] + " runtime", secs < 600.0, fmt("%.2f s", secs));
  }
  rep.verdict(2, "belief-MDP (n=100, m=21) sup/inf within 0.02 bits, < 10 min each", ok);
}

void c1_star(Reporter& rep, const SolverConfig& cfg) {
  const std::vector<std::pair<std::string, double>> rows = {
      {"C,0.5,0.1", 1.533}, {"C,0.9,0.1", 2.459}, {"D,0.5,0.1,0.1,0.1", 2.247},
      {"D,0.9,0.1,0.1,0.1", 2.459}, {"B,0.9", 3.294}};
  bool ok = true;
  for (const auto& [name, want] : rows) {
    const C1StarResult r = compute_C1star(preset(name), {100, 21}, cfg);
    ok &= std::isfinite(r.value);
    ok &= rep.near(name + " C1*", r.value, want, 0.02);
  }
  rep.verdict(3, "C1* column within 0.02 bits, finite for B(0.9)", ok);
}

void infinity(Reporter& rep, const SolverConfig& cfg) {
  bool ok = true;
  for (const std::string name : {"A", "B,0.9"}) {
    const ChannelSpec c = preset(name);
    const C1Result b = compute_C1(c, {100, 21}, cfg);
    const PairResult p = compute_Vtilde(c, cfg);
    const bool all = is_infinite(b.sup) && is_infinite(b.inf) && is_infinite(p.max) && is_infinite(p.min);
    ok &= rep.check(name + " infV supV minVt maxVt C1", all, all ? "all inf" : "finite entry");
  }
  rep.verdict(4, "presets A and B(0.9) report infinity for C1 and Vtilde", ok);
}

void dominance(Reporter& rep, const SolverConfig& cfg) {
  bool ok = true;
  for (const auto& name : kFinite) {
    const DominanceReport d = check_dominance(preset(name), {100, 21}, cfg, 0.03);
    ok &= rep.check(name + " C1 <= max Vtilde + 0.03", d.holds, fmt("C1 %.5f", d.c1) + fmt(" Vt %.5f", d.vtilde_max));
  }
  rep.verdict(5, "dominance C1 <= max Vtilde + 0.03 for strictly positive presets", ok);
}

void monte_carlo(Reporter& rep, const SolverConfig& cfg) {
  bool ok = true;
  {
    const ChannelSpec c = preset("C,0.9,0.1");
    const PairResult p = compute_Vtilde(c, cfg);
    HypothesisSim sim;
    sim.channel = c;
    sim.policy = pair_policy(c, p.gains.policy);
    sim.initial_s0 = 0;
    sim.initial_b1 = {0.0, 1.0};
    sim.horizon = 10'000;
    sim.replications = 200;
    sim.seed = 20240601;
    const DivergenceEstimate e = simulate_divergence(sim);
    ok &= rep.near("C(0.9,0.1) pair policy rate", e.mean_llr_rate, p.max, 3 * e.stderr_rate);
  }
  {
    const ChannelSpec c = preset("C,0.5,0.1");
    const double cycle = (reward_Rtilde(0, 1, 0, 1, c) + reward_Rtilde(0, 0, 0, 1, c)) / 2;
    HypothesisSim sim;
    sim.channel = c;
    sim.policy = alternating_cycle_policy(c);
    sim.initial_s0 = 0;
    sim.initial_b1 = {0.0, 1.0};
    sim.horizon = 10'000;
    sim.replications = 200;
    sim.seed = 20240602;
    const DivergenceEstimate e = simulate_divergence(sim);
    ok &= rep.near("C(0.5,0.1) alternating cycle rate", e.mean_llr_rate, cycle, 3 * e.stderr_rate);
    ok &= rep.near("C(0.5,0.1) cycle mean", cycle, 1.533, 0.001);
  }
  rep.verdict(6, "simulated divergence within 3 standard errors of the MDP gains", ok);
}

void oracle(Reporter& rep) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> size(1, 4);
  std::uniform_int_distribution<int> horizon(0, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng), m = size(rng), h = horizon(rng);
    FiniteMdp mdp(n, m, n);
    for (int s = 0; s < n; ++s)
      for (int a = 0; a < m; ++a) {
        mdp.set_reward(s, a, 4.0 * u(rng) - 1.0);
        std::vector<double> w(n);
        double total = 0.0;
        for (auto& v : w) total += (v = u(rng) < 0.25 ? 0.0 : u(rng));
        if (total == 0.0) w[0] = total = 1.0;
        for (int t = 0; t < n; ++t)
          if (w[t] > 0.0) mdp.add_transition(s, a, t, w[t] / total);
      }
    const auto v = solve_finite_horizon(mdp, h);
    for (int s = 0; s < n; ++s) worst = std::max(worst, std::abs(brute_force_VN(mdp, h, s) - v[s]));
  }
  const bool ok = rep.check("100 random MDPs, max |brute - backward|", worst <= 1e-9, fmt("%.3g", worst));
  rep.verdict(7, "brute force equals backward induction within 1e-9", ok);
}

void capacity(Reporter& rep, const SolverConfig& cfg) {
  ChannelSpec bsc(2, 2, 1);
  bsc.Q(0, 0, 0) = 0.9;
  bsc.Q(1, 0, 0) = 0.1;
  bsc.Q(0, 1, 0) = 0.1;
  bsc.Q(1, 1, 0) = 0.9;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) bsc.g(0, x, y) = 0;
  ChannelSpec flat = preset("C,0.5,0.5");
  for (double& q : flat.kernel) q = 0.5;

  bool ok = true;
  ok &= rep.near("BSC(0.1) with one state", estimate_capacity(bsc, {1, 21}, cfg).capacity_bits, 0.531, 0.005);
  ok &= rep.near("trapdoor, n=200", estimate_capacity(preset("A"), {200, 21}, cfg).capacity_bits, 0.694, 0.01);
  const double zero = estimate_capacity(flat, {100, 21}, cfg).capacity_bits;
  ok &= rep.check("uniform-Q channel", zero == 0.0, fmt("%.3g", zero));
  rep.verdict(8, "capacity sanity values", ok);
}

void curve(Reporter& rep, const SolverConfig& cfg) {
  const ChannelSpec c = preset("C,0.9,0.1");
  const double c1 = compute_C1(c, {100, 21}, cfg).sup;
  const double cap = estimate_capacity(c, {200, 21}, cfg).capacity_bits;
  const BoundCurve k = emit_curve({c1, cap, ""}, 101);
  const auto& first = k.samples.front();
  const auto& last = k.samples.back();
  bool ok = rep.check("first sample (0, C1)", first.rate == 0.0 && first.exponent == c1,
                      fmt("(%.6g, ", first.rate) + fmt("%.6g)", first.exponent));
  ok &= rep.check("last sample (C, 0)", last.rate == cap && last.exponent == 0.0,
                  fmt("(%.6g, ", last.rate) + fmt("%.6g)", last.exponent));
  double worst = 0.0;
  for (std::size_t i = 2; i < k.samples.size(); ++i)
    worst = std::max(worst, std::abs(k.samples[i].exponent - 2 * k.samples[i - 1].exponent +
                                     k.samples[i - 2].exponent));
  // Second differences are zero up to double rounding of the samples.
  ok &= rep.check("max |second difference|", worst <= 8 * c1 * 0x1p-52, fmt("%.3g", worst));
  rep.verdict(9, "bound curve endpoints and linearity", ok);
}

void properties(Reporter& rep) {
  bool ok = true;
  {
    std::vector<DecodingRun> runs;
    for (int i = 0; i < 1000; ++i) runs.push_back({1, 1.0, i % 2 == 1});
    const FanoReport f = check_fano(runs, 2);
    ok &= rep.check("Fano equality M=2, Pe=0.5", f.bound == 1.0 && f.mean_entropy == 1.0 && f.holds,
                    fmt("bound %.17g", f.bound));
  }
  {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    int verified = 0;
    for (int i = 0; i < 20; ++i) {
      const double K1 = u(rng), K2 = K1 * (1.0 + u(rng)), K3 = u(rng), H = u(rng);
      const double lambda = choose_lambda(K1, K2, K3, H);
      verified += lambda_satisfies(K1, K2, K3, H, lambda, 100'000);
    }
    ok &= rep.check("lambda re-verified on 1e5-point grid", verified == 20, std::to_string(verified) + "/20");
  }
  {
    const ChannelSpec c = preset("C,0.9,0.1");
    const double cap = estimate_capacity(c, {200, 21}, SolverConfig{}).capacity_bits;
    EntropyDriftConfig cfg;
    cfg.num_messages = 16;
    cfg.window = 20;
    cfg.windows = 3;
    cfg.replications = 10'000;
    cfg.seed = 31;
    cfg.capacity = cap;
    const DriftReport drift = check_entropy_drift(c, greedy_balancing_encoder(), cfg);
    ok &= rep.check("entropy drift >= -N(C+eps)", drift.violations == 0,
                    std::to_string(drift.violations) + " flagged buckets");

    const SubmartingaleConfig k = submartingale_constants(drift.paths, 0.5);
    const SubmartingaleReport sub = check_submartingale(drift.paths, k.K1, k.K2, k.K3, k.H_star);
    ok &= rep.check("submartingale bucketed drift", sub.violations == 0,
                    std::to_string(sub.violations) + " flagged buckets" + fmt(", lambda %.3g", sub.config.lambda));
  }
  rep.verdict(10, "Fano, lambda selection and submartingale property suites", ok);
}

}  // namespace

int main() {
  const SolverConfig cfg;
  Reporter rep;
  const std::vector<std::function<void()>> criteria = {
      [&] { pair_reproduction(rep, cfg); }, [&] { belief_reproduction(rep, cfg); },
      [&] { c1_star(rep, cfg); },           [&] { infinity(rep, cfg); },
      [&] { dominance(rep, cfg); },         [&] { monte_carlo(rep, cfg); },
      [&] { oracle(rep); },                 [&] { capacity(rep, cfg); },
      [&] { curve(rep, cfg); },             [&] { properties(rep); }};
  for (const auto& run : criteria) run();
  std::printf("%d of %zu criteria failed\n", rep.failures, criteria.size());
  return rep.failures;
}
