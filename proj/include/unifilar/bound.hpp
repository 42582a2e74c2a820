#pragma once

#include <string>
#include <vector>

#include "unifilar/channel.hpp"

namespace unifilar {

struct BoundInputs {
  double C1 = 0.0;  ///< bits per step, may be +infinity
  double C = 0.0;   ///< capacity estimate, bits per step
  std::string metadata;
};

struct BoundSample {
  double rate = 0.0;
  double exponent = 0.0;
};

/// Samples of the straight line E(R) = C1 (1 - R / C), sorted by rate.
/// The finite-length correction term is not included.
struct BoundCurve {
  std::vector<BoundSample> samples;
  std::string metadata;
};

/// C1 (1 - rate / C). An infinite C1 gives +infinity below capacity and 0 at
/// rate == C. Throws InvalidParameter for rate outside [0, C] or bad inputs.
double bound_at(const BoundInputs& inputs, double rate);

/// num_samples >= 2 uniformly spaced rates; the last rate is exactly C.
BoundCurve emit_curve(const BoundInputs& inputs, int num_samples);

/// CSV with header rate_bits,exponent_bits; infinite values print as "inf".
std::string curve_to_csv(const BoundCurve& curve, int precision);

/// Largest |log2 Q(y|x,s) / Q(y|x',s')| over positive entries; +infinity for
/// channels with a structural zero.
double compute_C2(const ChannelSpec& spec);

}  // namespace unifilar
