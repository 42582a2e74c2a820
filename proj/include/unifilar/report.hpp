#pragma once

#include <string>

#include <json.hpp>

#include "unifilar/mdp.hpp"

namespace unifilar {

/// %.<digits>g, with +infinity written as "inf".
std::string format_number(double v, int significant_digits = 4);

/// Number or the string "inf". With digits > 0 the number is rounded to that
/// many significant digits first.
nlohmann::json json_number(double v, int digits = 0);

nlohmann::json to_json(const GainResult& r, int digits = 0);

}  // namespace unifilar
