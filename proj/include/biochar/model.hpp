#pragma once

#include <array>
#include <string>
#include <vector>

#include "biochar/mechanism.hpp"
#include "biochar/rate_law.hpp"

namespace biochar {

/// Concentration 4-vector. Component order is fixed: organic matter,
/// microbes, charcoal, CO2.
struct State {
  double organic_matter = 0.0;
  double microbes = 0.0;
  double charcoal = 0.0;
  double co2 = 0.0;

  static constexpr int size = 4;

  double operator[](int i) const {
    return i == 0 ? organic_matter : i == 1 ? microbes : i == 2 ? charcoal : co2;
  }
  double& operator[](int i) {
    return i == 0 ? organic_matter : i == 1 ? microbes : i == 2 ? charcoal : co2;
  }

  std::array<double, 4> to_array() const {
    return {organic_matter, microbes, charcoal, co2};
  }
  static State from_array(const std::array<double, 4>& a) {
    return {a[0], a[1], a[2], a[3]};
  }

  bool operator==(const State&) const = default;
};

/// All parameters of the soil-charcoal model: the four rate laws, the
/// stoichiometric constants, the organic-matter source and the reference
/// scales used for nondimensionalization.
struct Params {
  RateLaw k1;  // organic-matter mineralization, modulated by microbes
  RateLaw k2;  // charcoal mineralization, modulated by microbes
  RateLaw k3;  // microbe reproduction, modulated by charcoal
  RateLaw k4;  // microbe death; a true constant (slope 0)

  double delta = 1.0;   // organic-matter particles consumed per reproduction
  double eta = 1.0;     // organic-matter particles returned per dead microbe
  double mu = 1.0;      // net microbes gained per reproduction
  double n_co2 = 1.0;   // CO2 released per mineralized organic-matter particle
  double source = 0.0;  // constant organic-matter inflow, concentration/time

  // Reference concentrations U1..U4 and reference time (seconds).
  double ref_om = 1.0;
  double ref_microbes = 1.0;
  double ref_charcoal = 1.0;
  double ref_co2 = 1.0;
  double ref_time = 1.0;
};

/// Checks every parameter restriction; returns one message per violated
/// inequality (empty means valid). Violations are data, not exceptions, so
/// a caller can print all of them at once.
std::vector<std::string> validate_params(const Params& p);

/// Hand-written right-hand side of the four model equations. Kept separate
/// from the generic mechanism engine so the two can cross-check each other.
State model_rhs(const Params& p, const State& y);

/// The model expressed as a generic mechanism: four reactions plus the
/// organic-matter source. mechanism_rhs on the result reproduces model_rhs.
Mechanism model_mechanism(const Params& p);

}  // namespace biochar
