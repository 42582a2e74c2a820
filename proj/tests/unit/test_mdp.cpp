#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "unifilar/common.hpp"
#include "unifilar/mdp.hpp"
#include "unifilar/report.hpp"

using namespace unifilar;

namespace {

FiniteMdp two_cycle(double r0, double r1) {
  FiniteMdp m(2, 1, 1);
  m.set_reward(0, 0, r0);
  m.set_reward(1, 0, r1);
  m.add_transition(0, 0, 1, 1.0);
  m.add_transition(1, 0, 0, 1.0);
  return m;
}

FiniteMdp random_deterministic(std::mt19937_64& rng, int n, int m) {
  std::uniform_int_distribution<int> next(0, n - 1);
  std::uniform_real_distribution<double> reward(0.0, 3.0);
  FiniteMdp mdp(n, m, 1);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      mdp.set_reward(s, a, reward(rng));
      mdp.add_transition(s, a, next(rng), 1.0);
    }
  return mdp;
}

FiniteMdp random_stochastic(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FiniteMdp mdp(n, m, n);
  for (int s = 0; s < n; ++s)
    for (int a = 0; a < m; ++a) {
      mdp.set_reward(s, a, 2.0 * u(rng));
      std::vector<double> w(n);
      double total = 0.0;
      for (auto& v : w) total += (v = u(rng) < 0.3 ? 0.0 : u(rng));
      if (total == 0.0) w[0] = total = 1.0;
      for (int t = 0; t < n; ++t)
        if (w[t] > 0.0) mdp.add_transition(s, a, t, w[t] / total);
    }
  return mdp;
}

// Best mean-reward cycle reachable from each start, over every deterministic
// stationary policy of a deterministic MDP.
std::vector<double> max_mean_cycle(const FiniteMdp& mdp) {
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  std::vector<double> best(n, -kInf);
  std::vector<int> policy(n, 0);
  while (true) {
    for (int start = 0; start < n; ++start) {
      std::vector<int> seen(n, -1);
      int s = start;
      int step = 0;
      while (seen[s] < 0) {
        seen[s] = step++;
        s = mdp.transitions(s, policy[s])[0].next;
      }
      double sum = 0.0;
      int len = 0;
      int c = s;
      do {
        sum += mdp.reward(c, policy[c]);
        ++len;
        c = mdp.transitions(c, policy[c])[0].next;
      } while (c != s);
      best[start] = std::max(best[start], sum / len);
    }
    int k = 0;
    while (k < n && ++policy[k] == m) policy[k++] = 0;
    if (k == n) break;
  }
  return best;
}

}  // namespace

TEST_CASE("finite horizon examples") {
  FiniteMdp single(1, 1, 1);
  single.set_reward(0, 0, 1.0);
  single.add_transition(0, 0, 0, 1.0);
  CHECK(solve_finite_horizon(single, 10)[0] == doctest::Approx(10.0));

  const auto v = solve_finite_horizon(two_cycle(2.536, 0.531), 2);
  CHECK(v[0] == doctest::Approx(3.067).epsilon(1e-12));

  const auto zero = solve_finite_horizon(two_cycle(2.536, 0.531), 0);
  CHECK(zero == std::vector<double>{0.0, 0.0});
  CHECK_THROWS_AS(solve_finite_horizon(single, -1), InvalidParameter);

  FiniteMdp inf_mdp = single;
  inf_mdp.set_reward(0, 0, kInf);
  CHECK_THROWS_AS(solve_finite_horizon(inf_mdp, 3), InvalidParameter);
}

TEST_CASE("average reward examples") {
  SolverConfig cfg;
  for (double c : {0.0, 1.0, -2.5, 3.25}) {
    FiniteMdp single(1, 1, 1);
    single.set_reward(0, 0, c);
    single.add_transition(0, 0, 0, 1.0);
    const GainResult r = solve_average_reward(single, cfg);
    CHECK(r.gain[0] == doctest::Approx(c).epsilon(1e-9));
    CHECK(r.converged);
  }
  const GainResult r = solve_average_reward(two_cycle(2.536, 0.531), cfg);
  CHECK(r.gain[0] == doctest::Approx(1.5335).epsilon(1e-9));
  CHECK(r.gain[1] == doctest::Approx(1.5335).epsilon(1e-9));
  CHECK(r.span_residual <= cfg.tolerance);
}

TEST_CASE("multichain gains depend on the start") {
  // Two absorbing states with different rewards and a transient chooser.
  FiniteMdp m(3, 2, 1);
  m.set_reward(0, 0, 1.0);
  m.add_transition(0, 0, 0, 1.0);
  m.set_reward(0, 1, 1.0);
  m.add_transition(0, 1, 0, 1.0);
  m.set_reward(1, 0, 2.0);
  m.add_transition(1, 0, 1, 1.0);
  m.set_reward(1, 1, 2.0);
  m.add_transition(1, 1, 1, 1.0);
  m.set_reward(2, 0, 5.0);
  m.add_transition(2, 0, 0, 1.0);
  m.set_reward(2, 1, 0.0);
  m.add_transition(2, 1, 1, 1.0);
  const GainResult r = solve_average_reward(m, SolverConfig{});
  CHECK(r.gain[0] == doctest::Approx(1.0));
  CHECK(r.gain[1] == doctest::Approx(2.0));
  CHECK(r.gain[2] == doctest::Approx(2.0));
  CHECK(r.policy[2] == 1);
  CHECK(r.max_gain() == doctest::Approx(2.0));
  CHECK(r.min_gain() == doctest::Approx(1.0));
}

TEST_CASE("deterministic MDPs match exhaustive cycle search") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 4;
    const int m = 1 + (trial / 4) % 3;
    if (n * m > 12) continue;
    const FiniteMdp mdp = random_deterministic(rng, n, m);
    const GainResult r = solve_average_reward(mdp, SolverConfig{});
    const auto oracle = max_mean_cycle(mdp);
    for (int s = 0; s < n; ++s) CHECK(r.gain[s] == doctest::Approx(oracle[s]).epsilon(1e-5));
  }
}

TEST_CASE("greedy policy evaluates to the same gain") {
  std::mt19937_64 rng(5);
  SolverConfig cfg;
  for (int trial = 0; trial < 20; ++trial) {
    const FiniteMdp mdp = random_stochastic(rng, 2 + trial % 5, 1 + trial % 3);
    const GainResult r = solve_average_reward(mdp, cfg);
    const GainResult e = evaluate_policy(mdp, r.policy, cfg);
    for (int s = 0; s < mdp.num_states(); ++s) CHECK(e.gain[s] == doctest::Approx(r.gain[s]).epsilon(1e-5));
  }
}

TEST_CASE("finite horizon increments are bounded by reward range") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const FiniteMdp mdp = random_stochastic(rng, 4, 3);
    double lo = kInf, hi = -kInf;
    for (int s = 0; s < 4; ++s)
      for (int a = 0; a < 3; ++a) {
        lo = std::min(lo, mdp.reward(s, a));
        hi = std::max(hi, mdp.reward(s, a));
      }
    const auto v5 = solve_finite_horizon(mdp, 5);
    const auto v6 = solve_finite_horizon(mdp, 6);
    for (int s = 0; s < 4; ++s) {
      CHECK(v6[s] >= v5[s] + lo - 1e-12);
      CHECK(v6[s] <= v5[s] + hi + 1e-12);
    }
  }
}

TEST_CASE("periodic chain converges") {
  // A 3-cycle whose value increments oscillate without the self-loop mix.
  FiniteMdp m(3, 1, 1);
  const double r[3] = {3.0, 0.0, 0.0};
  for (int s = 0; s < 3; ++s) {
    m.set_reward(s, 0, r[s]);
    m.add_transition(s, 0, (s + 1) % 3, 1.0);
  }
  const GainResult g = solve_average_reward(m, SolverConfig{});
  CHECK(g.converged);
  for (double v : g.gain) CHECK(v == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("non-convergence is reported not thrown") {
  std::mt19937_64 rng(3);
  const FiniteMdp mdp = random_stochastic(rng, 5, 2);
  SolverConfig cfg;
  cfg.tolerance = 1e-300;
  cfg.max_horizon = 5;
  const GainResult r = solve_average_reward(mdp, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.horizon_used == 5);
  CHECK(r.span_residual > cfg.tolerance);
}

TEST_CASE("infinity detection") {
  SolverConfig cfg;
  std::mt19937_64 rng(1);
  const FiniteMdp finite = random_stochastic(rng, 4, 2);
  for (bool f : detect_infinity(finite, cfg)) CHECK_FALSE(f);

  FiniteMdp single(1, 1, 1);
  single.set_reward(0, 0, kInf);
  single.add_transition(0, 0, 0, 1.0);
  CHECK(detect_infinity(single, cfg) == std::vector<bool>{true});
  const GainResult r = solve_average_reward(single, cfg);
  CHECK(is_infinite(r.gain[0]));
  CHECK(r.infinite[0]);

  // An infinite reward on a transient step does not make the gain infinite.
  FiniteMdp transient(2, 1, 1);
  transient.set_reward(0, 0, kInf);
  transient.add_transition(0, 0, 1, 1.0);
  transient.set_reward(1, 0, 1.0);
  transient.add_transition(1, 0, 1, 1.0);
  const GainResult t = solve_average_reward(transient, cfg);
  CHECK_FALSE(t.infinite[0]);
  CHECK(t.gain[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("caps below every reward leave results identical") {
  std::mt19937_64 rng(2);
  const FiniteMdp mdp = random_stochastic(rng, 4, 3);
  SolverConfig a;
  SolverConfig b;
  b.reward_cap_low = 60.0;
  b.reward_cap_high = 500.0;
  const GainResult ra = solve_average_reward(mdp, a);
  const GainResult rb = solve_average_reward(mdp, b);
  CHECK(ra.gain == rb.gain);
  CHECK(ra.bias == rb.bias);
  CHECK(ra.policy == rb.policy);
}

TEST_CASE("solver is independent of thread count") {
  std::mt19937_64 rng(4);
  const FiniteMdp mdp = random_stochastic(rng, 300, 4);
  setenv("UNIFILAR_THREADS", "1", 1);
  const GainResult one = solve_average_reward(mdp, SolverConfig{});
  setenv("UNIFILAR_THREADS", "7", 1);
  const GainResult many = solve_average_reward(mdp, SolverConfig{});
  unsetenv("UNIFILAR_THREADS");
  CHECK(one.gain == many.gain);
  CHECK(one.policy == many.policy);
}

TEST_CASE("mask restricts actions") {
  FiniteMdp m(1, 2, 1);
  m.set_reward(0, 0, 1.0);
  m.add_transition(0, 0, 0, 1.0);
  m.set_reward(0, 1, 2.0);
  m.add_transition(0, 1, 0, 1.0);
  const ActionMask mask{1, 0};
  const GainResult r = solve_average_reward(m, SolverConfig{}, &mask);
  CHECK(r.gain[0] == doctest::Approx(1.0));
  CHECK(r.policy[0] == 0);
}

TEST_CASE("ties go to the lowest action") {
  FiniteMdp m(1, 3, 1);
  for (int a = 0; a < 3; ++a) {
    m.set_reward(0, a, 1.0);
    m.add_transition(0, a, 0, 1.0);
  }
  CHECK(solve_average_reward(m, SolverConfig{}).policy[0] == 0);
}

TEST_CASE("strongly connected components") {
  const auto c = strongly_connected_components(two_cycle(1.0, 2.0));
  CHECK(c[0] == c[1]);
  FiniteMdp chain(3, 1, 1);
  chain.add_transition(0, 0, 1, 1.0);
  chain.add_transition(1, 0, 2, 1.0);
  chain.add_transition(2, 0, 2, 1.0);
  const auto d = strongly_connected_components(chain);
  CHECK(d[0] != d[1]);
  CHECK(d[1] != d[2]);
}

TEST_CASE("validation and config checks") {
  FiniteMdp m(1, 1, 2);
  m.add_transition(0, 0, 0, 0.4);
  CHECK_FALSE(m.validate().empty());
  m.add_transition(0, 0, 0, 0.6);
  CHECK(m.validate().empty());

  SolverConfig bad;
  bad.reward_cap_high = bad.reward_cap_low;
  CHECK_THROWS_AS(bad.check(), InvalidParameter);
  SolverConfig neg;
  neg.tolerance = 0.0;
  CHECK_THROWS_AS(neg.check(), InvalidParameter);
}

TEST_CASE("gain result json uses inf sentinel") {
  GainResult r;
  r.gain = {1.5, kInf};
  r.infinite = {false, true};
  const auto j = to_json(r);
  CHECK(j["gain"][0] == 1.5);
  CHECK(j["gain"][1] == "inf");
  CHECK(j["max"] == "inf");
}
