#include "biochar/model.hpp"

#include <algorithm>
#include <cmath>

namespace biochar {

namespace {

void check_positive(std::vector<std::string>& out, double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) out.push_back(name + " > 0");
}

void check_law(std::vector<std::string>& out, const RateLaw& law,
               const std::string& name, bool strictly_increasing) {
  if (!(law.intercept > 0.0) || !std::isfinite(law.intercept)) {
    out.push_back(name + ".intercept > 0");
  }
  if (strictly_increasing) {
    if (!(law.slope > 0.0) || !std::isfinite(law.slope)) out.push_back(name + ".slope > 0");
  } else {
    if (!(law.slope >= 0.0) || !std::isfinite(law.slope)) out.push_back(name + ".slope >= 0");
  }
  check_positive(out, law.scale, name + ".scale");
  check_positive(out, law.arg_ref, name + ".arg_ref");
}

}  // namespace

std::vector<std::string> validate_params(const Params& p) {
  std::vector<std::string> v;
  if (!(p.delta >= 1.0) || !std::isfinite(p.delta)) v.push_back("delta >= 1");
  // eta is usually derived as delta/mu, so allow rounding at the boundary.
  const double slack = 1e-12 * std::max(1.0, p.delta);
  if (!(p.eta * p.mu - p.delta <= slack) || !std::isfinite(p.eta * p.mu)) {
    v.push_back("delta >= eta*mu");
  }
  check_positive(v, p.eta, "eta");
  check_positive(v, p.mu, "mu");
  check_positive(v, p.n_co2, "n");
  if (!(p.source >= 0.0) || !std::isfinite(p.source)) v.push_back("s >= 0");
  check_law(v, p.k1, "k1", true);
  check_law(v, p.k2, "k2", true);
  check_law(v, p.k3, "k3", true);
  check_law(v, p.k4, "k4", false);
  check_positive(v, p.ref_om, "U1");
  check_positive(v, p.ref_microbes, "U2");
  check_positive(v, p.ref_charcoal, "U3");
  check_positive(v, p.ref_co2, "U4");
  check_positive(v, p.ref_time, "tau");
  return v;
}

State model_rhs(const Params& p, const State& y) {
  const double om = detail::checked_concentration(y.organic_matter, 0);
  const double mic = detail::checked_concentration(y.microbes, 1);
  const double ch = detail::checked_concentration(y.charcoal, 2);
  detail::checked_concentration(y.co2, 3);

  const double k1v = p.k1(mic);
  const double k2v = p.k2(mic);
  const double k3v = p.k3(ch);
  const double k4v = p.k4(0.0);

  // Elementary rates, written in the same evaluation order as the generic
  // engine so the cross-check holds to the last bit.
  const double r1 = k1v * om;                              // Om -> n CO2
  const double r2 = k2v * ch;                              // Ch -> CO2
  const double r3 = k3v * std::pow(om, p.delta) * mic;     // M + delta Om -> (mu+1) M
  const double r4 = k4v * mic;                             // M -> eta Om

  State d;
  d.organic_matter = -r1 - p.delta * r3 + p.eta * r4 + p.source;
  d.microbes = p.mu * r3 - r4;
  d.charcoal = -r2;
  d.co2 = p.n_co2 * r1 + r2;
  return d;
}

Mechanism model_mechanism(const Params& p) {
  Mechanism m;
  m.species = {{"Om", 0}, {"M", 1}, {"Ch", 2}, {"CO2", 3}};

  Reaction mineralize_om;
  mineralize_om.reactant_coeffs = {{0, 1.0}};
  mineralize_om.product_coeffs = {{3, p.n_co2}};
  mineralize_om.rate = p.k1;
  mineralize_om.rate_name = "k1";
  mineralize_om.rate_argument = 1;

  Reaction mineralize_charcoal;
  mineralize_charcoal.reactant_coeffs = {{2, 1.0}};
  mineralize_charcoal.product_coeffs = {{3, 1.0}};
  mineralize_charcoal.rate = p.k2;
  mineralize_charcoal.rate_name = "k2";
  mineralize_charcoal.rate_argument = 1;

  Reaction reproduce;
  reproduce.reactant_coeffs = {{0, p.delta}, {1, 1.0}};
  reproduce.product_coeffs = {{1, p.mu + 1.0}};
  reproduce.rate = p.k3;
  reproduce.rate_name = "k3";
  reproduce.rate_argument = 2;

  Reaction die;
  die.reactant_coeffs = {{1, 1.0}};
  die.product_coeffs = {{0, p.eta}};
  die.rate = p.k4;
  die.rate_name = "k4";

  m.reactions = {mineralize_om, mineralize_charcoal, reproduce, die};
  m.sources = {{0, p.source}};
  return m;
}

}  // namespace biochar
