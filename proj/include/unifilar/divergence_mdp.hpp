#pragma once

#include <vector>

#include "unifilar/channel.hpp"
#include "unifilar/mdp.hpp"

namespace unifilar {

/// Probability vector over channel states.
using Belief = std::vector<double>;

/// Uniform grid on the belief simplex. For two states the points are
/// (1 - i/(n-1), i/(n-1)), i = 0..n-1; resolution 1 is the uniform belief.
class BeliefGrid {
 public:
  BeliefGrid(int num_states, int resolution);

  int resolution() const { return resolution_; }
  int size() const { return static_cast<int>(points_.size()); }
  const Belief& operator[](int i) const { return points_[i]; }
  const std::vector<Belief>& points() const { return points_; }

  /// Index of the nearest grid point (Euclidean); ties go to the lower index.
  int project(const Belief& b) const;

 private:
  int num_states_;
  int resolution_;
  std::vector<Belief> points_;
};

/// Input distribution for every channel state, row-major [s][x].
struct ConditionalPolicy {
  int num_states = 0;
  int num_inputs = 0;
  std::vector<double> prob;

  double operator()(int s, int x) const { return prob[static_cast<std::size_t>(s) * num_inputs + x]; }

  static ConditionalPolicy deterministic(int num_states, int num_inputs, const std::vector<int>& input_per_state);
  static ConditionalPolicy uniform(int num_states, int num_inputs);
};

/// Every ConditionalPolicy whose rows lie on the uniform m-point simplex grid
/// over inputs. Row index varies slowest for state 0.
class PolicyGrid {
 public:
  PolicyGrid(int num_states, int num_inputs, int resolution);

  int resolution() const { return resolution_; }
  int size() const { return static_cast<int>(points_.size()); }
  const ConditionalPolicy& operator[](int i) const { return points_[i]; }

 private:
  int resolution_;
  std::vector<ConditionalPolicy> points_;
};

struct GridSpec {
  int belief_resolution = 100;
  int policy_resolution = 21;
};

/// Predicted output probability sum_{x,s} Q(y|x,s) x1(x|s) b(s).
double mixture_output(const Belief& b, const ConditionalPolicy& x1, int y, const ChannelSpec& spec);

/// Bayes update of the alternative-hypothesis state belief after output y.
/// Throws ImpossibleObservation if y has zero predicted probability.
Belief belief_update(const Belief& b, const ConditionalPolicy& x1, int y, const ChannelSpec& spec);

/// State distribution after output y routed through g without likelihood
/// weighting. This is the limit of belief_update when every zero entry of Q is
/// floored at the same small value, and it is the successor used when y has
/// zero predicted probability.
Belief routed_belief(const Belief& b, const ConditionalPolicy& x1, int y, const ChannelSpec& spec);

/// sum_y Q(y|x0,s0) log2 [Q(y|x0,s0) / mixture(y)]; +infinity if the mixture
/// misses an output the true hypothesis can produce.
double reward_R(int s0, const Belief& b1, int x0, const ConditionalPolicy& x1, const ChannelSpec& spec);

/// sum_{x,s} x1(x|s) b1(s) D(Q(.|x,s) || Q(.|x0,s0)), a mixture of KLs.
double reward_Rstar(int s0, const Belief& b1, int x0, const ConditionalPolicy& x1, const ChannelSpec& spec);

enum class DivergenceReward { R, Rstar };

/// The belief-state hypothesis-testing MDP on quantized grids.
/// State (s0, b1) has index s0 * |beliefs| + belief_index; action
/// (x0, x1) has index x0 * |policies| + policy_index.
struct DivergenceMdp {
  FiniteMdp mdp;
  int num_channel_states = 0;
  int num_inputs = 0;
  int num_beliefs = 0;
  int num_policies = 0;

  int state_index(int s0, int belief) const { return s0 * num_beliefs + belief; }
  int channel_state_of(int state) const { return state / num_beliefs; }
  int belief_of(int state) const { return state % num_beliefs; }
  int input_of(int action) const { return action / num_policies; }
  int policy_of(int action) const { return action % num_policies; }
};

/// Successor beliefs are projected to the nearest grid point. When the
/// mixture gives an output probability zero (reward +infinity) the successor
/// is routed_belief().
DivergenceMdp build_divergence_mdp(const ChannelSpec& spec, const BeliefGrid& beliefs,
                                   const PolicyGrid& policies, DivergenceReward reward);

struct C1Result {
  double sup = 0.0;  ///< C1: max over initial (s0, b1) of the gain
  double inf = 0.0;
  GainResult gains;
};

C1Result compute_C1(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg);

struct C1StarResult {
  double value = 0.0;  ///< max over initial states
  double inf = 0.0;
  GainResult gains;
  int admissible_actions = 0;
};

/// Average R* reward collected while playing a policy that is optimal for R
/// (first maximize the R gain, then, among R-optimal actions, maximize the
/// R* gain). Actions with infinite R* are dropped where a finite one is
/// R-optimal. `slack` is the Q-value gap, in bits, that still counts as
/// R-optimal.
C1StarResult compute_C1star(const ChannelSpec& spec, const GridSpec& grids, const SolverConfig& cfg,
                            double slack = 1e-4);

}  // namespace unifilar
