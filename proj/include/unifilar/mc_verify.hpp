#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "unifilar/channel.hpp"
#include "unifilar/divergence_mdp.hpp"
#include "unifilar/mdp.hpp"

namespace unifilar {

/// Receiver posterior over M messages. Each message carries the channel
/// state it implies, which the receiver can track because the channel is
/// unifilar and the encoder is deterministic.
class PosteriorTracker {
 public:
  PosteriorTracker(int num_messages, int initial_state);

  int size() const { return static_cast<int>(posterior_.size()); }
  const std::vector<double>& posterior() const { return posterior_; }
  const std::vector<int>& states() const { return states_; }
  double entropy() const { return entropy_; }
  int map_estimate() const;
  double max_posterior() const;

  /// Bayes update after output y when message i sent inputs[i].
  /// Throws ImpossibleObservation if every message gives y probability 0.
  void update(const ChannelSpec& spec, const std::vector<int>& inputs, int y);

 private:
  std::vector<double> posterior_;
  std::vector<int> states_;
  double entropy_ = 0.0;
};

/// Inputs for every message given the posterior and the per-message states.
using Encoder = std::function<std::vector<int>(const PosteriorTracker&, const ChannelSpec&)>;

/// Input independent of the message.
Encoder constant_encoder(int x);
/// Messages in decreasing posterior order go to whichever input brings the
/// predicted probability of output 0 closest to one half.
Encoder greedy_balancing_encoder();

/// Decision of the test at one step: x0 under the true hypothesis and the
/// alternative's conditional input law.
struct HypothesisAction {
  int x0 = 0;
  ConditionalPolicy x1;
};

/// Arguments: true state s0, alternative belief b1, step index, and a shared
/// uniform draw visible to both sides.
using HypothesisPolicy = std::function<HypothesisAction(int, const Belief&, std::int64_t, double)>;

struct HypothesisSim {
  ChannelSpec channel;
  HypothesisPolicy policy;
  int initial_s0 = 0;
  Belief initial_b1;
  std::int64_t horizon = 1;
  std::uint64_t seed = 0;
  int replications = 1;
  /// Likelihoods are floored at this value when positive; 0 means a
  /// zero-probability output under the mixture throws.
  double clamp = 0.0;
};

struct DivergenceEstimate {
  double mean_llr_rate = 0.0;  ///< bits per step
  double stderr_rate = 0.0;
  std::vector<double> per_replication;
};

/// Monte Carlo estimate of the N-stage average log-likelihood ratio between
/// the true hypothesis and the alternative mixture.
DivergenceEstimate simulate_divergence(const HypothesisSim& sim);

/// Policy that reads the alternative state from a point-mass belief and
/// plays the pair-MDP action there. `policy` is indexed by pair state.
HypothesisPolicy pair_policy(const ChannelSpec& spec, std::vector<int> policy);

/// Two-state cycle for binary presets: at differing states send x0 = s0 and
/// x1 = s1, at equal states send x0 = s and x1 = 1 - s.
HypothesisPolicy alternating_cycle_policy(const ChannelSpec& spec);

struct DriftBucket {
  double h_low = 0.0;
  double h_high = 0.0;
  std::int64_t count = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
  bool flagged = false;
};

struct DriftReport {
  double threshold = 0.0;  ///< -N (C + eps)
  std::vector<DriftBucket> buckets;
  int violations = 0;
  /// Entropy paths in bits, one per replication, length windows * N + 1.
  std::vector<std::vector<double>> paths;
};

struct EntropyDriftConfig {
  int num_messages = 16;
  int window = 20;  ///< N
  int windows = 1;
  int replications = 10'000;
  std::uint64_t seed = 0;
  double capacity = 0.0;
  double epsilon = 0.05;
  int buckets = 8;
};

/// Empirical E[H_{t+N} - H_t | bucket of H_t] compared with -N (C + eps).
/// A bucket is flagged when its mean sits more than 3 standard errors below.
DriftReport check_entropy_drift(const ChannelSpec& spec, const Encoder& encoder, const EntropyDriftConfig& cfg);

struct SubmartingaleConfig {
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  double H_star = 0.0;
  double lambda = 0.0;
};

/// f(y) = (1 - e^{lambda y}) / (K2 lambda).
double submartingale_f(double y, double K2, double lambda);

/// Checks the four sufficient inequalities for lambda on `grid_points`
/// points of y in (-K3, 0) and (0, K3).
bool lambda_satisfies(double K1, double K2, double K3, double H_star, double lambda, int grid_points);

/// Largest lambda = 2^-j, j = 0..60, passing lambda_satisfies on 10^4 points.
/// Throws InfeasibleConfig when none does, InvalidParameter on bad constants.
double choose_lambda(double K1, double K2, double K3, double H_star);

/// Z_t with the linear branch above H_star and the log branch at or below.
/// Logarithms here are natural; H is whatever unit K1 and H_star use.
double submartingale_Z(double H, std::int64_t t, const SubmartingaleConfig& cfg);

struct SubmartingaleReport {
  SubmartingaleConfig config;
  std::vector<DriftBucket> buckets;
  int violations = 0;
  std::vector<std::vector<double>> increments;  ///< Z_{t+1} - Z_t per path
};

/// Bucketed E[Z_{t+1} - Z_t | H_t]; flags buckets below -3 sigma. Paths stop
/// at the first nonpositive entropy. lambda is picked with choose_lambda.
SubmartingaleReport check_submartingale(const std::vector<std::vector<double>>& paths, double K1, double K2,
                                        double K3, double H_star, int buckets = 8);

/// Constants for check_submartingale from entropy paths in bits over binary
/// outputs: K1 = 1 (one output bit bounds the expected entropy drop), K3 is
/// 1.1 times the largest observed |log H_{t+1} - log H_t| with H_t < H_star
/// (at least 0.1), and K2 = max(K3, 2 K1).
SubmartingaleConfig submartingale_constants(const std::vector<std::vector<double>>& paths, double H_star);

struct DecodingRun {
  std::int64_t stop_time = 0;
  double final_entropy = 0.0;  ///< bits
  bool error = false;
};

struct FanoReport {
  double error_rate = 0.0;
  double mean_entropy = 0.0;
  double stderr_entropy = 0.0;
  double bound = 0.0;  ///< h(Pe) + Pe log2(M - 1)
  bool holds = false;  ///< mean - 3 stderr <= bound
};

FanoReport check_fano(const std::vector<DecodingRun>& runs, int num_messages);

/// Threshold decoding of a uniformly drawn message: stop when the largest
/// posterior reaches `threshold` or at `max_steps`.
std::vector<DecodingRun> simulate_decoding(const ChannelSpec& spec, const Encoder& encoder, int num_messages,
                                           double threshold, std::int64_t max_steps, int replications,
                                           std::uint64_t seed);

/// Exhaustive N-step optimum from `start` without memoization. Throws
/// InvalidParameter when |A|^N exceeds 10^7 or N is negative.
double brute_force_VN(const FiniteMdp& mdp, int horizon, int start);

}  // namespace unifilar
