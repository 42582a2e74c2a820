#include "unifilar/bound.hpp"

#include <cmath>

#include "unifilar/common.hpp"
#include "unifilar/report.hpp"

namespace unifilar {

namespace {

void check_inputs(const BoundInputs& in) {
  if (!(in.C > 0.0) || !std::isfinite(in.C)) throw InvalidParameter("capacity must be positive and finite");
  if (std::isnan(in.C1) || in.C1 < 0.0) throw InvalidParameter("C1 must be nonnegative");
}

}  // namespace

double bound_at(const BoundInputs& inputs, double rate) {
  check_inputs(inputs);
  if (!(rate >= 0.0 && rate <= inputs.C)) throw InvalidParameter("rate outside [0, C]");
  if (rate == inputs.C) return 0.0;
  if (is_infinite(inputs.C1)) return kInf;
  return inputs.C1 * (1.0 - rate / inputs.C);
}

BoundCurve emit_curve(const BoundInputs& inputs, int num_samples) {
  check_inputs(inputs);
  if (num_samples < 2) throw InvalidParameter("curve needs at least two samples");
  BoundCurve curve;
  curve.metadata = inputs.metadata;
  curve.samples.reserve(num_samples);
  for (int i = 0; i < num_samples; ++i) {
    const double rate = i + 1 == num_samples ? inputs.C : inputs.C * i / (num_samples - 1);
    curve.samples.push_back({rate, bound_at(inputs, rate)});
  }
  return curve;
}

std::string curve_to_csv(const BoundCurve& curve, int precision) {
  std::string out = "rate_bits,exponent_bits\n";
  for (const auto& s : curve.samples)
    out += format_number(s.rate, precision) + "," + format_number(s.exponent, precision) + "\n";
  return out;
}

double compute_C2(const ChannelSpec& spec) {
  if (!spec.strictly_positive()) return kInf;
  double best = 0.0;
  for (int y = 0; y < spec.num_outputs; ++y)
    for (int x = 0; x < spec.num_inputs; ++x)
      for (int s = 0; s < spec.num_states; ++s)
        for (int x2 = 0; x2 < spec.num_inputs; ++x2)
          for (int s2 = 0; s2 < spec.num_states; ++s2)
            best = std::max(best, std::log2(spec.Q(y, x, s) / spec.Q(y, x2, s2)));
  return best;
}

}  // namespace unifilar
