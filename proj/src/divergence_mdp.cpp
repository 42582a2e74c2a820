#include "unifilar/divergence_mdp.hpp"

#include <algorithm>
#include <cmath>

#include "unifilar/common.hpp"
#include "unifilar/parallel.hpp"

namespace unifilar {

namespace {

/// All compositions of `total` into `parts` nonnegative integers; the first
/// coordinate is the remainder and the others run in lexicographic order.
void compositions(int parts, int total, std::vector<std::vector<int>>& out) {
  std::vector<int> tail(parts - 1, 0);
  while (true) {
    int used = 0;
    for (int v : tail) used += v;
    if (used <= total) {
      std::vector<int> point;
      point.reserve(parts);
      point.push_back(total - used);
      point.insert(point.end(), tail.begin(), tail.end());
      out.push_back(std::move(point));
    }
    // Odometer with the last coordinate slowest gives k1 ascending first.
    int pos = 0;
    while (pos < parts - 1) {
      if (++tail[pos] <= total) break;
      tail[pos] = 0;
      ++pos;
    }
    if (pos == parts - 1) break;
  }
}

std::vector<Belief> simplex_grid(int dims, int resolution) {
  if (dims <= 0) throw InvalidParameter("simplex dimension must be positive");
  if (resolution <= 0) throw InvalidParameter("grid resolution must be positive");
  if (dims == 1) return {Belief{1.0}};
  if (resolution == 1) return {Belief(dims, 1.0 / dims)};
  std::vector<std::vector<int>> comps;
  compositions(dims, resolution - 1, comps);
  std::vector<Belief> points;
  points.reserve(comps.size());
  const double step = 1.0 / (resolution - 1);
  for (const auto& c : comps) {
    Belief b(dims);
    for (int i = 0; i < dims; ++i) b[i] = c[i] * step;
    // Remainder coordinate absorbs rounding so each point sums to one.
    double rest = 1.0;
    for (int i = 1; i < dims; ++i) rest -= b[i];
    b[0] = c[0] == 0 ? 0.0 : rest;
    points.push_back(std::move(b));
  }
  return points;
}

double sq_distance(const Belief& a, const Belief& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace

BeliefGrid::BeliefGrid(int num_states, int resolution)
    : num_states_(num_states), resolution_(resolution), points_(simplex_grid(num_states, resolution)) {}

int BeliefGrid::project(const Belief& b) const {
  if (points_.size() == 1) return 0;
  if (num_states_ == 2) {
    // Points are ordered by b[1]; only the two neighbours can be nearest.
    const double t = std::clamp(b[1], 0.0, 1.0) * (resolution_ - 1);
    const int lo = std::min(static_cast<int>(std::floor(t)), resolution_ - 1);
    const int hi = std::min(lo + 1, resolution_ - 1);
    return sq_distance(b, points_[hi]) < sq_distance(b, points_[lo]) ? hi : lo;
  }
  int best = 0;
  double best_d = sq_distance(b, points_[0]);
  for (int i = 1; i < size(); ++i) {
    const double d = sq_distance(b, points_[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ConditionalPolicy ConditionalPolicy::deterministic(int num_states, int num_inputs,
                                                   const std::vector<int>& input_per_state) {
  ConditionalPolicy p{num_states, num_inputs, std::vector<double>(static_cast<std::size_t>(num_states) * num_inputs, 0.0)};
  for (int s = 0; s < num_states; ++s) p.prob[static_cast<std::size_t>(s) * num_inputs + input_per_state.at(s)] = 1.0;
  return p;
}

ConditionalPolicy ConditionalPolicy::uniform(int num_states, int num_inputs) {
  return {num_states, num_inputs,
          std::vector<double>(static_cast<std::size_t>(num_states) * num_inputs, 1.0 / num_inputs)};
}

PolicyGrid::PolicyGrid(int num_states, int num_inputs, int resolution) : resolution_(resolution) {
  const std::vector<Belief> rows = simplex_grid(num_inputs, resolution);
  const int r = static_cast<int>(rows.size());
  std::size_t total = 1;
  for (int s = 0; s < num_states; ++s) total *= rows.size();
  points_.reserve(total);
  std::vector<int> digit(num_states, 0);
  for (std::size_t k = 0; k < total; ++k) {
    ConditionalPolicy p{num_states, num_inputs, {}};
    p.prob.reserve(static_cast<std::size_t>(num_states) * num_inputs);
    for (int s = 0; s < num_states; ++s) p.prob.insert(p.prob.end(), rows[digit[s]].begin(), rows[digit[s]].end());
    points_.push_back(std::move(p));
    for (int s = num_states - 1; s >= 0; --s) {
      if (++digit[s] < r) break;
      digit[s] = 0;
    }
  }
}

double mixture_output(const Belief& b, const ConditionalPolicy& x1, int y, const ChannelSpec& spec) {
  double p = 0.0;
  for (int s = 0; s < spec.num_states; ++s) {
    if (b[s] <= 0.0) continue;
    for (int x = 0; x < spec.num_inputs; ++x) p += spec.Q(y, x, s) * x1(s, x) * b[s];
  }
  return p;
}

Belief belief_update(const Belief& b, const ConditionalPolicy& x1, int y, const ChannelSpec& spec) {
  Belief next(spec.num_states, 0.0);
  double denom = 0.0;
  for (int s = 0; s < spec.num_states; ++s) {
    if (b[s] <= 0.0) continue;
    for (int x = 0; x < spec.num_inputs; ++x) {
      const double w = spec.Q(y, x, s) * x1(s, x) * b[s];
      next[spec.g(s, x, y)] += w;
      denom += w;
    }
  }
  if (!(denom > 0.0)) throw ImpossibleObservation("output " + std::to_string(y) + " has zero predicted probability");
  for (double& v : next) v /= denom;
  return next;
}

double reward_R(int s0, const Belief& b1, int x0, const ConditionalPolicy& x1, const ChannelSpec& spec) {
  double r = 0.0;
  for (int y = 0; y < spec.num_outputs; ++y) {
    const double p = spec.Q(y, x0, s0);
    if (p <= 0.0) continue;
    const double t = kl_term(p, mixture_output(b1, x1, y, spec));
    if (is_infinite(t)) return kInf;
    r += t;
  }
  return r;
}

double reward_Rstar(int s0, const Belief& b1, int x0, const ConditionalPolicy& x1, const ChannelSpec& spec) {
  double r = 0.0;
  for (int s = 0; s < spec.num_states; ++s) {
    for (int x = 0; x < spec.num_inputs; ++x) {
      const double w = x1(s, x) * b1[s];
      if (w <= 0.0) continue;
      double kl = 0.0;
      for (int y = 0; y < spec.num_outputs; ++y) kl += kl_term(spec.Q(y, x, s), spec.Q(y, x0, s0));
      if (is_infinite(kl)) return kInf;
      r += w * kl;
    }
  }
  return r;
}

Belief routed_belief(const Belief& b, const ConditionalPolicy& x1, int y, const ChannelSpec& spec) {
  Belief out(spec.num_states, 0.0);
  double total = 0.0;
  for (int s = 0; s < spec.num_states; ++s)
    for (int x = 0; x < spec.num_inputs; ++x) {
      const double w = b[s] * x1(s, x);
      out[spec.g(s, x, y)] += w;
      total += w;
    }
  for (double& v : out) v /= total;
  return out;
}

DivergenceMdp build_divergence_mdp(const ChannelSpec& spec, const BeliefGrid& beliefs, const PolicyGrid& policies,
                                   DivergenceReward reward) {
  DivergenceMdp out;
  out.num_channel_states = spec.num_states;
  out.num_inputs = spec.num_inputs;
  out.num_beliefs = beliefs.size();
  out.num_policies = policies.size();
  const int num_states = spec.num_states * out.num_beliefs;
  const int num_actions = spec.num_inputs * out.num_policies;
  out.mdp = FiniteMdp(num_states, num_actions, spec.num_outputs);

  parallel_for(static_cast<std::size_t>(num_states), [&](std::size_t si) {
    const int state = static_cast<int>(si);
    const int s0 = out.channel_state_of(state);
    const int bi = out.belief_of(state);
    const Belief& b1 = beliefs[bi];
    for (int x0 = 0; x0 < spec.num_inputs; ++x0) {
      for (int pi = 0; pi < out.num_policies; ++pi) {
        const ConditionalPolicy& x1 = policies[pi];
        const int action = x0 * out.num_policies + pi;
        out.mdp.set_reward(state, action,
                           reward == DivergenceReward::R ? reward_R(s0, b1, x0, x1, spec)
                                                         : reward_Rstar(s0, b1, x0, x1, spec));
        for (int y = 0; y < spec.num_outputs; ++y) {
          const double p = spec.Q(y, x0, s0);
          if (p <= 0.0) continue;
          const int next_s0 = spec.g(s0, x0, y);
          const Belief next = mixture_output(b1, x1, y, spec) > 0.0 ? belief_update(b1, x1, y, spec)
                                                                   : routed_belief(b1, x1, y, spec);
          const int next_b = beliefs.project(next);
          out.mdp.add_transition(state, action, out.state_index(next_s0, next_b), p);
        }
      }
    }
  }, 4);
  return out;
}

namespace {

void fill_extremes(const GainResult& g, double& sup, double& inf) {
  sup = g.max_gain();
  inf = g.min_gain();
}

}  // namespace

C1Result compute_C1(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg) {
  const BeliefGrid beliefs(spec.num_states, grids.belief_resolution);
  const PolicyGrid policies(spec.num_states, spec.num_inputs, grids.policy_resolution);
  const DivergenceMdp model = build_divergence_mdp(spec, beliefs, policies, DivergenceReward::R);
  C1Result out;
  out.gains = solve_average_reward(model.mdp, cfg);
  fill_extremes(out.gains, out.sup, out.inf);
  return out;
}

C1StarResult compute_C1star(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg, double slack) {
  const BeliefGrid beliefs(spec.num_states, grids.belief_resolution);
  const PolicyGrid policies(spec.num_states, spec.num_inputs, grids.policy_resolution);
  const DivergenceMdp primary = build_divergence_mdp(spec, beliefs, policies, DivergenceReward::R);
  const DivergenceMdp swapped = build_divergence_mdp(spec, beliefs, policies, DivergenceReward::Rstar);

  const FiniteMdp capped = primary.mdp.with_capped_rewards(cfg.reward_cap_low);
  const GainResult first = solve_average_reward(capped, cfg);
  const std::vector<double> gaps = action_gaps(capped, first, cfg);

  const int n = capped.num_states();
  const int m = capped.num_actions();
  ActionMask mask(static_cast<std::size_t>(n) * m, 0);
  int admissible = 0;
  for (int s = 0; s < n; ++s) {
    bool any_finite = false;
    for (int a = 0; a < m; ++a) {
      const std::size_t k = static_cast<std::size_t>(s) * m + a;
      if (gaps[k] <= slack && !is_infinite(swapped.mdp.reward(s, a))) any_finite = true;
    }
    for (int a = 0; a < m; ++a) {
      const std::size_t k = static_cast<std::size_t>(s) * m + a;
      const bool keep = gaps[k] <= slack && (!any_finite || !is_infinite(swapped.mdp.reward(s, a)));
      mask[k] = keep ? 1 : 0;
      admissible += keep;
    }
  }

  C1StarResult out;
  out.gains = solve_average_reward(swapped.mdp, cfg, &mask);
  out.admissible_actions = admissible;
  fill_extremes(out.gains, out.value, out.inf);
  return out;
}

}  // namespace unifilar
