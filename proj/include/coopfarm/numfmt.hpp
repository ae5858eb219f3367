#pragma once

#include <string>
#include <string_view>

namespace coopfarm {

// Shortest decimal form that parses back to the same double (at most 17
// significant digits). Independent of the C locale.
std::string format_double(double v);

// Locale-independent inverse of format_double. Throws std::invalid_argument.
double parse_double(std::string_view s);

}  // namespace coopfarm
