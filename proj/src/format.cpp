#include "biochar/format.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace biochar {

std::string format_double(double value) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec == std::errc()) return std::string(buf, end);
  // Fallback: widen the precision until the value survives a round trip.
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

}  // namespace biochar
