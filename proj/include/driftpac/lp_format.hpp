#pragma once

#include "driftpac/milp_model.hpp"

#include <string>
#include <string_view>

namespace driftpac {

/// LP interchange text (Minimize / Subject To / Bounds / Binary / End).
/// Every variable is listed in Bounds in model order so that parsing
/// recovers the variable order; numbers are printed with 17 significant
/// digits, making export -> parse -> export byte-identical.
std::string export_lp(const MilpModel& model);

/// Parses the subset of the LP format produced by export_lp (plus `free`,
/// `>=`/`=<` spellings, and `\` comments). Throws std::runtime_error with a
/// line number on malformed input.
MilpModel parse_lp(std::string_view text);

}  // namespace driftpac
