#include "coopfarm/numfmt.hpp"

#include <charconv>
#include <stdexcept>

namespace coopfarm {

std::string format_double(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto result = std::from_chars(s.data(), s.data() + s.size(), v);
  if (result.ec != std::errc{} || result.ptr != s.data() + s.size())
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  return v;
}

}  // namespace coopfarm
