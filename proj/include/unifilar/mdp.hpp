#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace unifilar {

struct Transition {
  int next = 0;
  double prob = 0.0;
};

/// Explicit finite average-reward MDP with sparse successor lists.
///
/// Every (state, action) pair owns a fixed-width slot of `max_successors`
/// transitions; unused slots have probability 0. Builders can therefore fill
/// pairs independently and in parallel. Rewards are finite or +infinity.
class FiniteMdp {
 public:
  FiniteMdp() = default;
  FiniteMdp(int num_states, int num_actions, int max_successors);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int max_successors() const { return stride_; }

  double reward(int s, int a) const { return rewards_[index(s, a)]; }
  void set_reward(int s, int a, double r) { rewards_[index(s, a)] = r; }

  std::span<const Transition> transitions(int s, int a) const {
    return {transitions_.data() + index(s, a) * stride_, static_cast<std::size_t>(stride_)};
  }
  std::span<Transition> transitions(int s, int a) {
    return {transitions_.data() + index(s, a) * stride_, static_cast<std::size_t>(stride_)};
  }
  /// Adds probability mass to s -> next, merging with an existing slot.
  void add_transition(int s, int a, int next, double prob);

  bool has_infinite_rewards() const;
  /// Copy with every +infinity reward replaced by `cap`.
  FiniteMdp with_capped_rewards(double cap) const;
  /// Violations of the row-sum / nonnegativity / no-NaN invariants.
  std::vector<std::string> validate(double tol = 1e-10) const;

  std::vector<std::string> state_labels;

 private:
  std::size_t index(int s, int a) const {
    return static_cast<std::size_t>(s) * num_actions_ + a;
  }
  int num_states_ = 0;
  int num_actions_ = 0;
  int stride_ = 0;
  std::vector<double> rewards_;
  std::vector<Transition> transitions_;
};

struct SolverConfig {
  double tolerance = 1e-6;
  std::int64_t max_horizon = 1'000'000;
  double reward_cap_low = 50.0;
  double reward_cap_high = 100.0;
  double infinity_gap = 10.0;
  /// Self-loop weight mixed into every transition while iterating for the
  /// gain. Leaves gains unchanged and removes periodic oscillation of the
  /// value increments.
  double aperiodicity = 0.5;

  /// Throws InvalidParameter if an invariant is broken.
  void check() const;
};

struct GainResult {
  std::vector<double> gain;  ///< bits per step; +infinity where infinite[s]
  std::vector<double> bias;  ///< relative values of the iterated chain, min 0
  std::vector<int> policy;   ///< greedy action from the final stage
  std::int64_t horizon_used = 0;
  double span_residual = 0.0;
  std::vector<bool> infinite;
  bool converged = false;

  double max_gain() const;
  double min_gain() const;
};

/// Optional per-(state, action) admissibility mask, row-major [s][a].
/// Every state must keep at least one admissible action.
using ActionMask = std::vector<std::uint8_t>;

/// V^N by backward induction from V^0 = 0: the best expected N-step total
/// reward from every state. Rewards must be finite. N = 0 gives zeros;
/// negative N throws InvalidParameter.
std::vector<double> solve_finite_horizon(const FiniteMdp& mdp, std::int64_t horizon);

/// Long-run average reward by value iteration on the aperiodicity-transformed
/// chain. Stops once, within every strongly connected component of the
/// transition graph, the span of the value increments is below the tolerance,
/// the increments have stopped moving, and no action leads to a higher
/// expected increment than the current state's own. Non-convergence is reported through
/// span_residual / converged, never thrown. Rewards of +infinity go through
/// detect_infinity(); flagged states report gain +infinity.
GainResult solve_average_reward(const FiniteMdp& mdp, const SolverConfig& cfg,
                                const ActionMask* mask = nullptr);

/// Flags states whose gain grows by more than cfg.infinity_gap when +infinity
/// rewards are capped at reward_cap_high instead of reward_cap_low.
std::vector<bool> detect_infinity(const FiniteMdp& mdp, const SolverConfig& cfg,
                                  const ActionMask* mask = nullptr);

/// Gain of a fixed stationary deterministic policy.
GainResult evaluate_policy(const FiniteMdp& mdp, std::span<const int> policy,
                           const SolverConfig& cfg);

/// Component id per state for the union (any-action) transition graph.
std::vector<int> strongly_connected_components(const FiniteMdp& mdp);

/// Q-value gaps of a converged solve on a finite-reward MDP:
/// gap(s,a) = max_b q(s,b) - q(s,a) >= 0 using the returned bias.
std::vector<double> action_gaps(const FiniteMdp& mdp, const GainResult& result,
                                const SolverConfig& cfg);

}  // namespace unifilar
