#pragma once

#include "unifilar/channel.hpp"
#include "unifilar/divergence_mdp.hpp"
#include "unifilar/mdp.hpp"

namespace unifilar {

struct PairState {
  int s0 = 0;  ///< channel state under the true hypothesis
  int s1 = 0;  ///< channel state under the alternative
  bool operator==(const PairState&) const = default;
};

/// D(Q(.|x0,s0) || Q(.|x1,s1)) in bits, +infinity when the support of the
/// first row is not contained in the second.
double reward_Rtilde(int s0, int s1, int x0, int x1, const ChannelSpec& spec);

/// Exact pair-state MDP. State (s0,s1) -> s0 * |S| + s1,
/// action (x0,x1) -> x0 * |X| + x1. Both states move with the same output,
/// drawn from Q(.|x0,s0).
FiniteMdp build_pair_mdp(const ChannelSpec& spec);

inline int pair_state_index(const ChannelSpec& spec, PairState p) { return p.s0 * spec.num_states + p.s1; }
inline PairState pair_state_of(const ChannelSpec& spec, int index) {
  return {index / spec.num_states, index % spec.num_states};
}

struct PairResult {
  GainResult gains;
  double max = 0.0;
  double min = 0.0;
};

PairResult compute_Vtilde(const ChannelSpec& spec, const SolverConfig& cfg);

struct DominanceReport {
  double c1 = 0.0;
  double vtilde_max = 0.0;
  double slack = 0.0;
  bool holds = false;
};

/// C1 <= max Vtilde + slack; the slack absorbs belief-grid error.
DominanceReport check_dominance(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg,
                                double slack = 0.03);

}  // namespace unifilar
