#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "biochar/rate_law.hpp"

namespace biochar {

/// Concentrations this close below zero are treated as integrator noise and
/// clamped to zero; anything more negative is an error.
inline constexpr double kNegativeNoiseFloor = 1e-12;

struct Species {
  std::string name;
  int index = 0;

  bool operator==(const Species&) const = default;
};

/// One irreversible reaction: sum(alpha_i * S_i) -> sum(beta_i * S_i).
/// The rate may be modulated by the concentration of one species
/// (rate_argument); without one the law is evaluated at zero.
struct Reaction {
  std::map<int, double> reactant_coeffs;  // species index -> alpha
  std::map<int, double> product_coeffs;   // species index -> beta
  RateLaw rate;
  std::string rate_name;                 // label used by the text format
  std::optional<int> rate_argument;

  bool operator==(const Reaction&) const = default;
};

/// A reaction network plus constant source terms.
struct Mechanism {
  std::vector<Species> species;
  std::vector<Reaction> reactions;
  std::map<int, double> sources;  // species index -> constant inflow

  /// Index of a species by name, or -1.
  int species_index(std::string_view name) const;

  bool operator==(const Mechanism&) const = default;
};

/// Mass-action rates r_j = k_j(arg) * prod_i y_i^alpha_ij, one per reaction.
/// Species with alpha = 0 contribute a factor 1 (0^0 := 1).
std::vector<double> reaction_rates(const Mechanism& m, std::span<const double> y);

/// dy_i/dt = sum_j (beta_ij - alpha_ij) r_j + source_i.
std::vector<double> mechanism_rhs(const Mechanism& m, std::span<const double> y);

namespace detail {
/// Rejects non-finite values, clamps noise-negative ones to zero and throws
/// std::domain_error below the noise floor.
double checked_concentration(double value, int component);
}  // namespace detail

}  // namespace biochar
