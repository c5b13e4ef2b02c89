#pragma once

#include <string>

namespace biochar {

/// Shortest decimal representation that parses back to exactly the same
/// double. Used by the mechanism printer and the CSV writer so round trips
/// are bit-exact.
std::string format_double(double value);

}  // namespace biochar
