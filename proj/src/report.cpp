#include "unifilar/report.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "unifilar/common.hpp"

namespace unifilar {

std::string format_number(double v, int significant_digits) {
  if (is_infinite(v)) return "inf";
  if (v == -kInf) return "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", significant_digits, v);
  return buf;
}

nlohmann::json json_number(double v, int digits) {
  if (is_infinite(v)) return "inf";
  if (digits > 0) return std::stod(format_number(v, digits));
  return v;
}

nlohmann::json to_json(const GainResult& r, int digits) {
  nlohmann::json gains = nlohmann::json::array();
  for (double g : r.gain) gains.push_back(json_number(g, digits));
  return {{"gain", gains},
          {"policy", r.policy},
          {"max", json_number(r.max_gain(), digits)},
          {"min", json_number(r.min_gain(), digits)},
          {"horizon_used", r.horizon_used},
          {"span_residual", json_number(r.span_residual, digits)},
          {"converged", r.converged}};
}

}  // namespace unifilar
