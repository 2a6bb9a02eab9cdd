#pragma once

#include <string>

namespace ares {

// Shortest decimal form that strtod parses back to exactly the same double.
// Shared by the scenario writer and the CSV emitters so output bytes are
// stable across platforms and thread counts.
std::string format_number(double value);

}  // namespace ares
