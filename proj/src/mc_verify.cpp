#include "unifilar/mc_verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "unifilar/common.hpp"
#include "unifilar/parallel.hpp"
#include "unifilar/rng.hpp"

namespace unifilar {

namespace {

double shannon_bits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) h += entropy_term(v);
  return h;
}

struct Moments {
  std::int64_t n = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double v) {
    ++n;
    sum += v;
    sum_sq += v * v;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double stderr_mean() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1));
    return std::sqrt(var / n);
  }
};

int argmax(const Belief& b) {
  return static_cast<int>(std::max_element(b.begin(), b.end()) - b.begin());
}

}  // namespace

PosteriorTracker::PosteriorTracker(int num_messages, int initial_state) {
  if (num_messages < 1) throw InvalidParameter("need at least one message");
  posterior_.assign(num_messages, 1.0 / num_messages);
  states_.assign(num_messages, initial_state);
  entropy_ = std::log2(static_cast<double>(num_messages));
}

int PosteriorTracker::map_estimate() const {
  return static_cast<int>(std::max_element(posterior_.begin(), posterior_.end()) - posterior_.begin());
}

double PosteriorTracker::max_posterior() const { return *std::max_element(posterior_.begin(), posterior_.end()); }

void PosteriorTracker::update(const ChannelSpec& spec, const std::vector<int>& inputs, int y) {
  double total = 0.0;
  for (int i = 0; i < size(); ++i) {
    posterior_[i] *= spec.Q(y, inputs[i], states_[i]);
    total += posterior_[i];
  }
  if (total <= 0.0) throw ImpossibleObservation("output has probability zero under every message");
  for (int i = 0; i < size(); ++i) {
    posterior_[i] /= total;
    states_[i] = spec.g(states_[i], inputs[i], y);
  }
  entropy_ = shannon_bits(posterior_);
}

Encoder constant_encoder(int x) {
  return [x](const PosteriorTracker& t, const ChannelSpec&) { return std::vector<int>(t.size(), x); };
}

Encoder greedy_balancing_encoder() {
  return [](const PosteriorTracker& t, const ChannelSpec& spec) {
    const auto& pi = t.posterior();
    std::vector<int> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return pi[a] > pi[b]; });
    std::vector<int> inputs(t.size(), 0);
    double p0 = 0.0;
    double mass = 0.0;
    for (int i : order) {
      mass += pi[i];
      int best = 0;
      double best_dev = kInf;
      for (int x = 0; x < spec.num_inputs; ++x) {
        const double dev = std::abs(p0 + pi[i] * spec.Q(0, x, t.states()[i]) - 0.5 * mass);
        if (dev < best_dev) {
          best_dev = dev;
          best = x;
        }
      }
      inputs[i] = best;
      p0 += pi[i] * spec.Q(0, best, t.states()[i]);
    }
    return inputs;
  };
}

DivergenceEstimate simulate_divergence(const HypothesisSim& sim) {
  if (sim.horizon < 1) throw InvalidParameter("horizon must be at least 1");
  if (sim.replications < 1) throw InvalidParameter("replications must be at least 1");
  const ChannelSpec& spec = sim.channel;
  if (static_cast<int>(sim.initial_b1.size()) != spec.num_states)
    throw InvalidParameter("initial belief has the wrong size");

  DivergenceEstimate out;
  out.per_replication.assign(sim.replications, 0.0);
  parallel_for(
      static_cast<std::size_t>(sim.replications),
      [&](std::size_t r) {
        CounterRng channel_rng(sim.seed, 2 * r);
        CounterRng common_rng(sim.seed, 2 * r + 1);
        int s0 = sim.initial_s0;
        Belief b1 = sim.initial_b1;
        double total = 0.0;
        for (std::int64_t t = 0; t < sim.horizon; ++t) {
          const HypothesisAction act = sim.policy(s0, b1, t, common_rng.uniform());
          const auto row = spec.row(act.x0, s0);
          const int y = channel_rng.categorical(row.data(), spec.num_outputs);
          double num = row[y];
          double den = mixture_output(b1, act.x1, y, spec);
          if (den <= 0.0) {
            if (sim.clamp <= 0.0) throw ImpossibleObservation("alternative assigns probability zero to the output");
            num = std::max(num, sim.clamp);
            den = sim.clamp;
          } else {
            b1 = belief_update(b1, act.x1, y, spec);
          }
          total += std::log2(num / den);
          s0 = spec.g(s0, act.x0, y);
        }
        out.per_replication[r] = total / static_cast<double>(sim.horizon);
      },
      1);
  Moments m;
  for (double v : out.per_replication) m.add(v);
  out.mean_llr_rate = m.mean();
  out.stderr_rate = m.stderr_mean();
  return out;
}

HypothesisPolicy pair_policy(const ChannelSpec& spec, std::vector<int> policy) {
  return [spec, policy = std::move(policy)](int s0, const Belief& b1, std::int64_t, double) {
    const int s1 = argmax(b1);
    const int a = policy[static_cast<std::size_t>(s0) * spec.num_states + s1];
    const int x1 = a % spec.num_inputs;
    return HypothesisAction{a / spec.num_inputs,
                            ConditionalPolicy::deterministic(spec.num_states, spec.num_inputs,
                                                             std::vector<int>(spec.num_states, x1))};
  };
}

HypothesisPolicy alternating_cycle_policy(const ChannelSpec& spec) {
  if (spec.num_inputs != 2 || spec.num_states != 2) throw InvalidParameter("cycle policy needs a binary channel");
  return [spec](int s0, const Belief& b1, std::int64_t, double) {
    const int s1 = argmax(b1);
    const int x0 = s0;
    const int x1 = s0 != s1 ? s1 : 1 - s1;
    return HypothesisAction{x0, ConditionalPolicy::deterministic(2, 2, {x1, x1})};
  };
}

namespace {

std::vector<DriftBucket> make_buckets(double low, double high, int count) {
  std::vector<DriftBucket> out(count);
  for (int k = 0; k < count; ++k) {
    out[k].h_low = low + (high - low) * k / count;
    out[k].h_high = low + (high - low) * (k + 1) / count;
  }
  return out;
}

int bucket_of(double v, double low, double high, int count) {
  if (high <= low) return 0;
  const int k = static_cast<int>((v - low) / (high - low) * count);
  return std::clamp(k, 0, count - 1);
}

int finish_buckets(std::vector<DriftBucket>& buckets, const std::vector<Moments>& moments, double threshold) {
  int violations = 0;
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    buckets[k].count = moments[k].n;
    buckets[k].mean = moments[k].mean();
    buckets[k].stderr_mean = moments[k].stderr_mean();
    buckets[k].flagged = moments[k].n > 0 && buckets[k].mean < threshold - 3.0 * buckets[k].stderr_mean;
    violations += buckets[k].flagged;
  }
  return violations;
}

}  // namespace

DriftReport check_entropy_drift(const ChannelSpec& spec, const Encoder& encoder, const EntropyDriftConfig& cfg) {
  if (cfg.window < 1 || cfg.windows < 1 || cfg.replications < 1 || cfg.buckets < 1)
    throw InvalidParameter("drift check needs positive window, windows, replications and buckets");
  const int length = cfg.window * cfg.windows;
  DriftReport report;
  report.threshold = -cfg.window * (cfg.capacity + cfg.epsilon);
  report.paths.assign(cfg.replications, {});
  parallel_for(
      static_cast<std::size_t>(cfg.replications),
      [&](std::size_t r) {
        CounterRng rng(cfg.seed, r);
        PosteriorTracker tracker(cfg.num_messages, spec.initial_state);
        const int message = static_cast<int>(rng.uniform() * cfg.num_messages);
        auto& path = report.paths[r];
        path.reserve(length + 1);
        path.push_back(tracker.entropy());
        for (int t = 0; t < length; ++t) {
          const std::vector<int> inputs = encoder(tracker, spec);
          const auto row = spec.row(inputs[message], tracker.states()[message]);
          tracker.update(spec, inputs, rng.categorical(row.data(), spec.num_outputs));
          path.push_back(tracker.entropy());
        }
      },
      16);

  const double high = std::log2(static_cast<double>(cfg.num_messages));
  report.buckets = make_buckets(0.0, high, cfg.buckets);
  std::vector<Moments> moments(cfg.buckets);
  for (const auto& path : report.paths)
    for (int w = 0; w < cfg.windows; ++w) {
      const double h = path[static_cast<std::size_t>(w) * cfg.window];
      moments[bucket_of(h, 0.0, high, cfg.buckets)].add(path[static_cast<std::size_t>(w + 1) * cfg.window] - h);
    }
  report.violations = finish_buckets(report.buckets, moments, report.threshold);
  return report;
}

double submartingale_f(double y, double K2, double lambda) { return -std::expm1(lambda * y) / (K2 * lambda); }

bool lambda_satisfies(double K1, double K2, double K3, double H_star, double lambda, int grid_points) {
  if (!(1.0 - lambda * std::exp(lambda * K3) / (2.0 * K2) * K3 * K3 > 0.0)) return false;
  const double slope = H_star / K1;
  for (int i = 1; i <= grid_points; ++i) {
    const double y = K3 * i / (grid_points + 1.0);
    for (double v : {-y, y}) {
      const double lhs = slope * std::expm1(v);
      const double rhs = -(std::expm1(lambda * v) - lambda * v) / (K2 * lambda);
      if (v < 0.0 && !(lhs < rhs)) return false;
      if (v > 0.0 && !(lhs > rhs)) return false;
      if (v < 0.0 && !(-std::expm1(lambda * v) / K2 > 0.0)) return false;
    }
  }
  return true;
}

double choose_lambda(double K1, double K2, double K3, double H_star) {
  if (!(K1 > 0.0 && K2 > K1 && K3 > 0.0 && H_star > 0.0))
    throw InvalidParameter("need K2 > K1 > 0, K3 > 0 and H_star > 0");
  for (int j = 0; j <= 60; ++j) {
    const double lambda = std::ldexp(1.0, -j);
    if (lambda_satisfies(K1, K2, K3, H_star, lambda, 10'000)) return lambda;
  }
  throw InfeasibleConfig("no lambda in 2^-j, j = 0..60, satisfies the drift inequalities");
}

double submartingale_Z(double H, std::int64_t t, const SubmartingaleConfig& cfg) {
  if (H > cfg.H_star) return (H - cfg.H_star) / cfg.K1 + static_cast<double>(t);
  const double y = std::log(H / cfg.H_star);
  return y / cfg.K2 + static_cast<double>(t) + submartingale_f(y, cfg.K2, cfg.lambda);
}

SubmartingaleReport check_submartingale(const std::vector<std::vector<double>>& paths, double K1, double K2,
                                        double K3, double H_star, int buckets) {
  if (buckets < 1) throw InvalidParameter("need at least one bucket");
  SubmartingaleReport report;
  report.config = {K1, K2, K3, H_star, choose_lambda(K1, K2, K3, H_star)};

  // Buckets are equal-width in log(H / H_star) over the observed range.
  double low = kInf;
  double high = -kInf;
  for (const auto& path : paths)
    for (std::size_t t = 0; t + 1 < path.size() && path[t] > 0.0 && path[t + 1] > 0.0; ++t) {
      const double y = std::log(path[t] / H_star);
      low = std::min(low, y);
      high = std::max(high, y);
    }
  if (low > high) low = high = 0.0;
  report.buckets = make_buckets(low, high, buckets);
  std::vector<Moments> moments(buckets);
  report.increments.reserve(paths.size());
  for (const auto& path : paths) {
    auto& inc = report.increments.emplace_back();
    for (std::size_t t = 0; t + 1 < path.size() && path[t] > 0.0 && path[t + 1] > 0.0; ++t) {
      const double dz = submartingale_Z(path[t + 1], static_cast<std::int64_t>(t + 1), report.config) -
                        submartingale_Z(path[t], static_cast<std::int64_t>(t), report.config);
      inc.push_back(dz);
      moments[bucket_of(std::log(path[t] / H_star), low, high, buckets)].add(dz);
    }
  }
  report.violations = finish_buckets(report.buckets, moments, 0.0);
  return report;
}

SubmartingaleConfig submartingale_constants(const std::vector<std::vector<double>>& paths, double H_star) {
  double biggest = 0.0;
  for (const auto& p : paths)
    for (std::size_t t = 0; t + 1 < p.size() && p[t] > 0.0 && p[t + 1] > 0.0; ++t)
      if (p[t] < H_star) biggest = std::max(biggest, std::abs(std::log(p[t + 1] / p[t])));
  SubmartingaleConfig cfg;
  cfg.K1 = 1.0;
  cfg.K3 = std::max(1.1 * biggest, 0.1);
  cfg.K2 = std::max(cfg.K3, 2.0 * cfg.K1);
  cfg.H_star = H_star;
  return cfg;
}

FanoReport check_fano(const std::vector<DecodingRun>& runs, int num_messages) {
  if (runs.empty()) throw InvalidParameter("no decoding runs");
  if (num_messages < 2) throw InvalidParameter("need at least two messages");
  Moments h;
  std::int64_t errors = 0;
  for (const auto& run : runs) {
    h.add(run.final_entropy);
    errors += run.error;
  }
  FanoReport report;
  report.error_rate = static_cast<double>(errors) / static_cast<double>(runs.size());
  report.mean_entropy = h.mean();
  report.stderr_entropy = h.stderr_mean();
  report.bound = binary_entropy(report.error_rate) + report.error_rate * std::log2(num_messages - 1.0);
  report.holds = report.mean_entropy - 3.0 * report.stderr_entropy <= report.bound + 1e-12;
  return report;
}

std::vector<DecodingRun> simulate_decoding(const ChannelSpec& spec, const Encoder& encoder, int num_messages,
                                           double threshold, std::int64_t max_steps, int replications,
                                           std::uint64_t seed) {
  if (replications < 1 || max_steps < 1) throw InvalidParameter("need positive replications and max_steps");
  std::vector<DecodingRun> runs(replications);
  parallel_for(
      static_cast<std::size_t>(replications),
      [&](std::size_t r) {
        CounterRng rng(seed, r);
        PosteriorTracker tracker(num_messages, spec.initial_state);
        const int message = static_cast<int>(rng.uniform() * num_messages);
        std::int64_t t = 0;
        while (t < max_steps && tracker.max_posterior() < threshold) {
          const std::vector<int> inputs = encoder(tracker, spec);
          const auto row = spec.row(inputs[message], tracker.states()[message]);
          tracker.update(spec, inputs, rng.categorical(row.data(), spec.num_outputs));
          ++t;
        }
        runs[r] = {t, tracker.entropy(), tracker.map_estimate() != message};
      },
      16);
  return runs;
}

namespace {

double brute_value(const FiniteMdp& mdp, int state, int remaining) {
  if (remaining == 0) return 0.0;
  double best = -kInf;
  for (int a = 0; a < mdp.num_actions(); ++a) {
    double q = mdp.reward(state, a);
    for (const Transition& tr : mdp.transitions(state, a))
      if (tr.prob > 0.0) q += tr.prob * brute_value(mdp, tr.next, remaining - 1);
    best = std::max(best, q);
  }
  return best;
}

}  // namespace

double brute_force_VN(const FiniteMdp& mdp, int horizon, int start) {
  if (horizon < 0) throw InvalidParameter("horizon must be nonnegative");
  if (start < 0 || start >= mdp.num_states()) throw InvalidParameter("start state out of range");
  if (std::pow(static_cast<double>(mdp.num_actions()), horizon) > 1e7)
    throw InvalidParameter("brute-force tree exceeds 10^7 action sequences");
  if (mdp.has_infinite_rewards()) throw InvalidParameter("brute force needs finite rewards");
  return brute_value(mdp, start, horizon);
}

}  // namespace unifilar
