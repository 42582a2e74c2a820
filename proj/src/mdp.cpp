#include "unifilar/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "unifilar/common.hpp"
#include "unifilar/parallel.hpp"

namespace unifilar {

FiniteMdp::FiniteMdp(int num_states, int num_actions, int max_successors)
    : num_states_(num_states),
      num_actions_(num_actions),
      stride_(max_successors),
      rewards_(static_cast<std::size_t>(num_states) * num_actions, 0.0),
      transitions_(static_cast<std::size_t>(num_states) * num_actions * max_successors) {
  if (num_states <= 0 || num_actions <= 0 || max_successors <= 0)
    throw InvalidParameter("FiniteMdp dimensions must be positive");
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      for (auto& t : transitions(s, a)) t = {s, 0.0};
}

void FiniteMdp::add_transition(int s, int a, int next, double prob) {
  if (prob <= 0.0) return;
  auto slots = transitions(s, a);
  for (auto& t : slots) {
    if (t.prob > 0.0 && t.next == next) {
      t.prob += prob;
      return;
    }
  }
  for (auto& t : slots) {
    if (t.prob <= 0.0) {
      t = {next, prob};
      return;
    }
  }
  throw InvalidParameter("FiniteMdp: successor slots exhausted");
}

bool FiniteMdp::has_infinite_rewards() const {
  return std::any_of(rewards_.begin(), rewards_.end(), [](double r) { return is_infinite(r); });
}

FiniteMdp FiniteMdp::with_capped_rewards(double cap) const {
  FiniteMdp out = *this;
  for (double& r : out.rewards_)
    if (is_infinite(r)) r = cap;
  return out;
}

std::vector<std::string> FiniteMdp::validate(double tol) const {
  std::vector<std::string> out;
  for (int s = 0; s < num_states_; ++s)
    for (int a = 0; a < num_actions_; ++a) {
      const double r = reward(s, a);
      if (std::isnan(r) || r == -kInf)
        out.push_back("reward(" + std::to_string(s) + "," + std::to_string(a) + ") is not finite or +inf");
      double sum = 0.0;
      for (const auto& t : transitions(s, a)) {
        if (t.prob < 0.0 || t.next < 0 || t.next >= num_states_)
          out.push_back("bad transition at (" + std::to_string(s) + "," + std::to_string(a) + ")");
        sum += t.prob;
      }
      if (std::abs(sum - 1.0) > tol)
        out.push_back("P(" + std::to_string(s) + "," + std::to_string(a) + ") sums to " + std::to_string(sum));
    }
  return out;
}

void SolverConfig::check() const {
  if (!(tolerance > 0.0)) throw InvalidParameter("tolerance must be positive");
  if (max_horizon <= 0) throw InvalidParameter("max_horizon must be positive");
  if (!(reward_cap_low < reward_cap_high)) throw InvalidParameter("reward_cap_low must be below reward_cap_high");
  if (!(infinity_gap > 0.0)) throw InvalidParameter("infinity_gap must be positive");
  if (!(aperiodicity > 0.0 && aperiodicity <= 1.0)) throw InvalidParameter("aperiodicity must be in (0,1]");
}

double GainResult::max_gain() const {
  return gain.empty() ? 0.0 : *std::max_element(gain.begin(), gain.end());
}

double GainResult::min_gain() const {
  return gain.empty() ? 0.0 : *std::min_element(gain.begin(), gain.end());
}

namespace {

bool allowed(const ActionMask* mask, int num_actions, int s, int a) {
  return mask == nullptr || (*mask)[static_cast<std::size_t>(s) * num_actions + a] != 0;
}

void check_mask(const FiniteMdp& mdp, const ActionMask* mask) {
  if (mask == nullptr) return;
  if (mask->size() != static_cast<std::size_t>(mdp.num_states()) * mdp.num_actions())
    throw InvalidParameter("action mask has the wrong size");
  for (int s = 0; s < mdp.num_states(); ++s) {
    bool any = false;
    for (int a = 0; a < mdp.num_actions() && !any; ++a) any = allowed(mask, mdp.num_actions(), s, a);
    if (!any) throw InvalidParameter("action mask leaves state " + std::to_string(s) + " without actions");
  }
}

std::vector<int> components(const FiniteMdp& mdp, const ActionMask* mask) {
  const int n = mdp.num_states();
  std::vector<std::vector<int>> adj(n);
  for (int s = 0; s < n; ++s) {
    for (int a = 0; a < mdp.num_actions(); ++a) {
      if (!allowed(mask, mdp.num_actions(), s, a)) continue;
      for (const auto& t : mdp.transitions(s, a))
        if (t.prob > 0.0) adj[s].push_back(t.next);
    }
    std::sort(adj[s].begin(), adj[s].end());
    adj[s].erase(std::unique(adj[s].begin(), adj[s].end()), adj[s].end());
  }

  // Iterative Tarjan.
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
  std::vector<char> on_stack(n, 0);
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0, ncomp = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, edge] = call.back();
      if (edge < adj[v].size()) {
        const int w = adj[v][edge++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      const int done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  return comp;
}

/// max over (s, a) of sum_t P(t|s,a) g(t) - g(s).
double gain_excess(const FiniteMdp& mdp, const ActionMask* mask, const std::vector<double>& g) {
  double worst = 0.0;
  for (int s = 0; s < mdp.num_states(); ++s)
    for (int a = 0; a < mdp.num_actions(); ++a) {
      if (!allowed(mask, mdp.num_actions(), s, a)) continue;
      double e = 0.0;
      for (const auto& t : mdp.transitions(s, a)) e += t.prob * g[t.next];
      worst = std::max(worst, e - g[s]);
    }
  return worst;
}

/// Value iteration on finite rewards.
GainResult iterate(const FiniteMdp& mdp, const SolverConfig& cfg, const ActionMask* mask) {
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  const double tau = cfg.aperiodicity;
  const std::vector<int> comp = components(mdp, mask);
  const int ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;

  std::vector<double> v(n, 0.0), vnew(n, 0.0), d(n, 0.0), dprev(n, 0.0);
  std::vector<int> policy(n, 0);
  std::vector<double> cmin(ncomp), cmax(ncomp);

  GainResult result;
  result.span_residual = kInf;
  std::int64_t k = 0;
  while (k < cfg.max_horizon) {
    ++k;
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t si) {
          const int s = static_cast<int>(si);
          double best = -kInf;
          int best_a = 0;
          for (int a = 0; a < m; ++a) {
            if (!allowed(mask, m, s, a)) continue;
            double q = 0.0;
            for (const auto& t : mdp.transitions(s, a)) q += t.prob * v[t.next];
            q = mdp.reward(s, a) + tau * q + (1.0 - tau) * v[s];
            if (q > best) {
              best = q;
              best_a = a;
            }
          }
          vnew[s] = best;
          policy[s] = best_a;
        },
        32);

    for (int s = 0; s < n; ++s) d[s] = vnew[s] - v[s];
    std::fill(cmin.begin(), cmin.end(), kInf);
    std::fill(cmax.begin(), cmax.end(), -kInf);
    double change = 0.0;
    for (int s = 0; s < n; ++s) {
      cmin[comp[s]] = std::min(cmin[comp[s]], d[s]);
      cmax[comp[s]] = std::max(cmax[comp[s]], d[s]);
      change = std::max(change, std::abs(d[s] - dprev[s]));
    }
    double span = 0.0;
    for (int c = 0; c < ncomp; ++c) span = std::max(span, cmax[c] - cmin[c]);
    double residual = k >= 2 ? std::max(span, change) : kInf;
    // Near-constant increments can still hide a switch to a better class
    // later on, so the gains must also satisfy g(s) >= sum P g for every action.
    if (residual < cfg.tolerance) residual = std::max(residual, gain_excess(mdp, mask, d));
    result.span_residual = residual;

    const double shift = *std::max_element(vnew.begin(), vnew.end());
    for (int s = 0; s < n; ++s) v[s] = vnew[s] - shift;
    std::swap(d, dprev);
    if (residual < cfg.tolerance) break;
  }
  // dprev holds the last increments after the swap.
  result.gain = dprev;
  result.policy = policy;
  result.horizon_used = k;
  result.converged = result.span_residual <= cfg.tolerance;
  const double vmin = *std::min_element(v.begin(), v.end());
  result.bias.resize(n);
  for (int s = 0; s < n; ++s) result.bias[s] = v[s] - vmin;
  result.infinite.assign(n, false);
  return result;
}

}  // namespace

std::vector<double> solve_finite_horizon(const FiniteMdp& mdp, std::int64_t horizon) {
  if (horizon < 0) throw InvalidParameter("horizon must be nonnegative");
  if (mdp.has_infinite_rewards()) throw InvalidParameter("solve_finite_horizon needs finite rewards");
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  std::vector<double> v(n, 0.0), vnew(n, 0.0);
  for (std::int64_t k = 0; k < horizon; ++k) {
    parallel_for(
        static_cast<std::size_t>(n),
        [&](std::size_t si) {
          const int s = static_cast<int>(si);
          double best = -kInf;
          for (int a = 0; a < m; ++a) {
            double q = mdp.reward(s, a);
            for (const auto& t : mdp.transitions(s, a)) q += t.prob * v[t.next];
            best = std::max(best, q);
          }
          vnew[s] = best;
        },
        32);
    std::swap(v, vnew);
  }
  return v;
}

std::vector<bool> detect_infinity(const FiniteMdp& mdp, const SolverConfig& cfg, const ActionMask* mask) {
  cfg.check();
  check_mask(mdp, mask);
  if (!mdp.has_infinite_rewards()) return std::vector<bool>(mdp.num_states(), false);
  const GainResult low = iterate(mdp.with_capped_rewards(cfg.reward_cap_low), cfg, mask);
  const GainResult high = iterate(mdp.with_capped_rewards(cfg.reward_cap_high), cfg, mask);
  std::vector<bool> flags(mdp.num_states());
  for (int s = 0; s < mdp.num_states(); ++s) flags[s] = high.gain[s] - low.gain[s] > cfg.infinity_gap;
  return flags;
}

GainResult solve_average_reward(const FiniteMdp& mdp, const SolverConfig& cfg, const ActionMask* mask) {
  cfg.check();
  check_mask(mdp, mask);
  if (!mdp.has_infinite_rewards()) return iterate(mdp, cfg, mask);

  GainResult low = iterate(mdp.with_capped_rewards(cfg.reward_cap_low), cfg, mask);
  const GainResult high = iterate(mdp.with_capped_rewards(cfg.reward_cap_high), cfg, mask);
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (high.gain[s] - low.gain[s] > cfg.infinity_gap) {
      low.infinite[s] = true;
      low.gain[s] = kInf;
    }
  }
  low.span_residual = std::max(low.span_residual, high.span_residual);
  low.converged = low.converged && high.converged;
  return low;
}

GainResult evaluate_policy(const FiniteMdp& mdp, std::span<const int> policy, const SolverConfig& cfg) {
  if (policy.size() != static_cast<std::size_t>(mdp.num_states()))
    throw InvalidParameter("policy size does not match the state count");
  ActionMask mask(static_cast<std::size_t>(mdp.num_states()) * mdp.num_actions(), 0);
  for (int s = 0; s < mdp.num_states(); ++s) {
    if (policy[s] < 0 || policy[s] >= mdp.num_actions()) throw InvalidParameter("policy action out of range");
    mask[static_cast<std::size_t>(s) * mdp.num_actions() + policy[s]] = 1;
  }
  return solve_average_reward(mdp, cfg, &mask);
}

std::vector<int> strongly_connected_components(const FiniteMdp& mdp) { return components(mdp, nullptr); }

std::vector<double> action_gaps(const FiniteMdp& mdp, const GainResult& result, const SolverConfig& cfg) {
  if (mdp.has_infinite_rewards()) throw InvalidParameter("action_gaps needs finite rewards");
  const int n = mdp.num_states();
  const int m = mdp.num_actions();
  const double tau = cfg.aperiodicity;
  std::vector<double> gaps(static_cast<std::size_t>(n) * m);
  for (int s = 0; s < n; ++s) {
    double best = -kInf;
    for (int a = 0; a < m; ++a) {
      double q = 0.0;
      for (const auto& t : mdp.transitions(s, a)) q += t.prob * result.bias[t.next];
      q = mdp.reward(s, a) + tau * q + (1.0 - tau) * result.bias[s];
      gaps[static_cast<std::size_t>(s) * m + a] = q;
      best = std::max(best, q);
    }
    for (int a = 0; a < m; ++a) gaps[static_cast<std::size_t>(s) * m + a] = best - gaps[static_cast<std::size_t>(s) * m + a];
  }
  return gaps;
}

}  // namespace unifilar
