#include "unifilar/capacity.hpp"

#include <algorithm>
#include <vector>

#include "unifilar/common.hpp"
#include "unifilar/parallel.hpp"

namespace unifilar {

double capacity_reward(const Belief& b, const ConditionalPolicy& u, const ChannelSpec& spec) {
  // I(X,S;Y) = sum_{s,x} w(s,x) D(Q(.|x,s) || P_Y). With the output law
  // normalized by the total weight, identical rows give exactly zero.
  double total = 0.0;
  for (int s = 0; s < spec.num_states; ++s)
    for (int x = 0; x < spec.num_inputs; ++x) total += b[s] * u(s, x);
  std::vector<double> py(spec.num_outputs);
  for (int y = 0; y < spec.num_outputs; ++y) py[y] = mixture_output(b, u, y, spec) / total;
  double mi = 0.0;
  for (int s = 0; s < spec.num_states; ++s)
    for (int x = 0; x < spec.num_inputs; ++x) {
      const double w = b[s] * u(s, x);
      if (w <= 0.0) continue;
      double d = 0.0;
      for (int y = 0; y < spec.num_outputs; ++y) d += kl_term(spec.Q(y, x, s), py[y]);
      mi += w * d;
    }
  return std::max(0.0, mi / total);
}

FiniteMdp build_capacity_mdp(const ChannelSpec& spec, const BeliefGrid& beliefs, const PolicyGrid& policies) {
  FiniteMdp mdp(beliefs.size(), policies.size(), spec.num_outputs);
  parallel_for(static_cast<std::size_t>(beliefs.size()), [&](std::size_t bi) {
    const int state = static_cast<int>(bi);
    const Belief& b = beliefs[state];
    for (int a = 0; a < policies.size(); ++a) {
      const ConditionalPolicy& u = policies[a];
      mdp.set_reward(state, a, capacity_reward(b, u, spec));
      for (int y = 0; y < spec.num_outputs; ++y) {
        const double p = mixture_output(b, u, y, spec);
        if (p <= 0.0) continue;
        mdp.add_transition(state, a, beliefs.project(belief_update(b, u, y, spec)), p);
      }
    }
  }, 4);
  return mdp;
}

CapacityResult estimate_capacity(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg) {
  const BeliefGrid beliefs(spec.num_states, grids.belief_resolution);
  const PolicyGrid policies(spec.num_states, spec.num_inputs, grids.policy_resolution);
  CapacityResult out;
  out.gains = solve_average_reward(build_capacity_mdp(spec, beliefs, policies), cfg);
  out.capacity_bits = out.gains.max_gain();
  out.belief_resolution = grids.belief_resolution;
  out.policy_resolution = grids.policy_resolution;
  out.residual = out.gains.span_residual;
  return out;
}

}  // namespace unifilar
