#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "biochar/model.hpp"

namespace biochar {

inline constexpr double kSecondsPerYear = 365.0 * 24.0 * 3600.0;

/// The free parameters of a study: constitutive coefficients, the three
/// directly chosen reference rate constants, reference concentrations and
/// the reference time. Everything else (eta, alpha, s, K4) is derived from
/// the normalization chain.
struct FreeParameters {
  double a1 = 1.0, a2 = 1.0, a3 = 1.0;
  double b1 = 1.0, b2 = 1.0, b3 = 1.0, b4 = 1.0;
  double K1 = 1.0, K2 = 1.0, K3 = 1.0;  // per second
  double U1 = 1.0, U2 = 1.0, U3 = 1.0, U4 = 1.0;
  double mu = 1.0, delta = 1.0, n = 1.0;
  double tau = 1.0;             // seconds
  std::string tau_unit = "s";   // display unit: "s" or "year"
};

/// Constants fixed by the normalization: eta balances reproduction against
/// death, alpha places the source above the bifurcation, K4 pins the
/// microbial equilibrium at U1, and s follows from alpha.
struct DerivedConstants {
  double eta = 1.0;
  double alpha = 2.0;
  double source = 0.0;  // same units as concentration/second
  double K4 = 1.0;      // per second
};

DerivedConstants derive_constants(const FreeParameters& f);

/// Assembles full model parameters; `pinned` replaces individual derived
/// constants ("eta", "alpha", "s", "K4") after the chain runs.
Params build_params(const FreeParameters& f,
                    const std::map<std::string, double>& pinned = {});

/// The nine dimensionless characteristic time scales of the rescaled system.
struct TimeScales {
  double tau1 = 0.0;  // om mineralization
  double tau2 = 0.0;  // om consumption by reproduction
  double tau3 = 0.0;  // om recycling from dead microbes
  double tau4 = 0.0;  // source scaling, 1/U1
  double tau5 = 0.0;  // microbe reproduction
  double tau6 = 0.0;  // microbe death
  double tau7 = 0.0;  // charcoal mineralization
  double tau8 = 0.0;  // co2 from om
  double tau9 = 0.0;  // co2 from charcoal
};

TimeScales time_scales(const Params& p);

/// K2 < K1/2 < min{K3*U1^delta, K4}/2: mineralization of charcoal slower
/// than of organic matter, both slower than the microbial turnover.
/// The composite K3*U1^delta puts K3 in per-second units.
struct OrderingReport {
  bool satisfied = false;
  std::string detail;
};
OrderingReport check_ordering(const Params& p);

State to_dimensionless(const Params& p, const State& dimensional);
State to_dimensional(const Params& p, const State& dimensionless);

/// The rescaled system: du~_i/dt~ expressed through the time scales and the
/// dimensionless rate laws. This is what the scenario runner integrates.
struct ScaledSystem {
  TimeScales ts;
  RateLaw k1, k2, k3, k4;  // scale = arg_ref = 1
  double delta = 1.0;
  double source_term = 0.0;  // tau4 * s

  State rhs(const State& u) const;
};

ScaledSystem scaled_system(const Params& p);

/// Built-in parameter tables: the O(1) exploratory set, the
/// literature-valued set, and its tuned variant.
FreeParameters parameter_set_1();
FreeParameters parameter_set_2();
FreeParameters parameter_set_3();
FreeParameters parameter_set(int which);  // 1..3

/// Flat "key = value" config: keys a1..b4, K1..K3, U1..U4, mu, delta, n,
/// tau, tau_unit, plus "override.eta|alpha|s|K4" pins. tau is given in
/// tau_unit. Returns the table and the pins.
std::pair<FreeParameters, std::map<std::string, double>> load_config(std::istream& in);

/// Assigns one free parameter by key name; throws on unknown keys.
void set_free_parameter(FreeParameters& f, const std::string& key, double value);

}  // namespace biochar
