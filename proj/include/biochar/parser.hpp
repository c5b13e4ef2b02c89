#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "biochar/mechanism.hpp"

namespace biochar {

/// Diagnostic for a malformed mechanism file; carries the 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses the line-oriented mechanism format:
///
///   # comment
///   species Om M Ch CO2
///   Om -> 10 CO2 @rate(k1, arg=M)
///   M + 10 Om -> 2 M @rate(k3, arg=Ch)
///   source Om = 0.02
///
/// Species must be declared before use; coefficients default to 1 and parse
/// as decimal floats. Numeric rate-law values live in the parameter config,
/// not here: `@rate(name, ...)` is resolved against `rate_laws`, and names
/// missing from the table get the unit constant law.
Mechanism parse_mechanism(std::string_view text,
                          const std::map<std::string, RateLaw>& rate_laws = {});

/// Canonical text rendering; parse_mechanism(print_mechanism(m), laws) is
/// structurally identical to m when `laws` resolves the same names.
std::string print_mechanism(const Mechanism& m);

}  // namespace biochar
