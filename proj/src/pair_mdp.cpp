#include "unifilar/pair_mdp.hpp"

#include "unifilar/common.hpp"

namespace unifilar {

double reward_Rtilde(int s0, int s1, int x0, int x1, const ChannelSpec& spec) {
  double r = 0.0;
  for (int y = 0; y < spec.num_outputs; ++y) {
    const double t = kl_term(spec.Q(y, x0, s0), spec.Q(y, x1, s1));
    if (is_infinite(t)) return kInf;
    r += t;
  }
  return r;
}

FiniteMdp build_pair_mdp(const ChannelSpec& spec) {
  const int ns = spec.num_states;
  const int nx = spec.num_inputs;
  FiniteMdp mdp(ns * ns, nx * nx, spec.num_outputs);
  for (int s0 = 0; s0 < ns; ++s0)
    for (int s1 = 0; s1 < ns; ++s1) {
      const int state = s0 * ns + s1;
      mdp.state_labels.push_back("(" + std::to_string(s0) + "," + std::to_string(s1) + ")");
      for (int x0 = 0; x0 < nx; ++x0)
        for (int x1 = 0; x1 < nx; ++x1) {
          const int action = x0 * nx + x1;
          mdp.set_reward(state, action, reward_Rtilde(s0, s1, x0, x1, spec));
          for (int y = 0; y < spec.num_outputs; ++y)
            mdp.add_transition(state, action, spec.g(s0, x0, y) * ns + spec.g(s1, x1, y), spec.Q(y, x0, s0));
        }
    }
  return mdp;
}

PairResult compute_Vtilde(const ChannelSpec& spec, const SolverConfig& cfg) {
  PairResult out;
  out.gains = solve_average_reward(build_pair_mdp(spec), cfg);
  out.max = out.gains.max_gain();
  out.min = out.gains.min_gain();
  return out;
}

DominanceReport check_dominance(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg,
                                double slack) {
  DominanceReport r;
  r.c1 = compute_C1(spec, grids, cfg).sup;
  r.vtilde_max = compute_Vtilde(spec, cfg).max;
  r.slack = slack;
  r.holds = is_infinite(r.vtilde_max) || r.c1 <= r.vtilde_max + slack;
  return r;
}

}  // namespace unifilar
