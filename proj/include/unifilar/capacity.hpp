#pragma once

#include "unifilar/channel.hpp"
#include "unifilar/divergence_mdp.hpp"
#include "unifilar/mdp.hpp"

namespace unifilar {

/// I(X,S;Y) in bits under the joint b(s) u(x|s) Q(y|x,s).
double capacity_reward(const Belief& b, const ConditionalPolicy& u, const ChannelSpec& spec);

/// Receiver-belief MDP for feedback capacity: state is a grid belief on S,
/// action a gridded input policy u(x|s), reward the one-step mutual
/// information, transitions the Bayes update with y drawn from the mixture.
/// Action index equals the PolicyGrid index.
FiniteMdp build_capacity_mdp(const ChannelSpec& spec, const BeliefGrid& beliefs, const PolicyGrid& policies);

struct CapacityResult {
  double capacity_bits = 0.0;  ///< max over grid initial beliefs
  int belief_resolution = 0;
  int policy_resolution = 0;
  double residual = 0.0;
  GainResult gains;
};

CapacityResult estimate_capacity(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg);

}  // namespace unifilar
