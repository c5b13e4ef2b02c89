#include "biochar/mechanism.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace biochar {

int Mechanism::species_index(std::string_view name) const {
  for (const Species& s : species) {
    if (s.name == name) return s.index;
  }
  return -1;
}

namespace detail {

double checked_concentration(double value, int component) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite concentration in component " +
                                std::to_string(component));
  }
  if (value < 0.0) {
    if (value < -kNegativeNoiseFloor) {
      throw std::domain_error("negative concentration " + std::to_string(value) +
                              " in component " + std::to_string(component));
    }
    return 0.0;
  }
  return value;
}

}  // namespace detail

std::vector<double> reaction_rates(const Mechanism& m, std::span<const double> y) {
  if (y.size() != m.species.size()) {
    throw std::invalid_argument("state size does not match species count");
  }
  std::vector<double> conc(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    conc[i] = detail::checked_concentration(y[i], static_cast<int>(i));
  }

  std::vector<double> rates;
  rates.reserve(m.reactions.size());
  for (const Reaction& rx : m.reactions) {
    const double arg = rx.rate_argument ? conc[*rx.rate_argument] : 0.0;
    double r = rx.rate(arg);
    for (const auto& [idx, alpha] : rx.reactant_coeffs) {
      if (alpha == 0.0) continue;  // 0^0 := 1
      if (alpha == 1.0) {
        r *= conc[idx];
      } else {
        r *= std::pow(conc[idx], alpha);
      }
    }
    rates.push_back(r);
  }
  return rates;
}

std::vector<double> mechanism_rhs(const Mechanism& m, std::span<const double> y) {
  const std::vector<double> rates = reaction_rates(m, y);
  std::vector<double> dydt(y.size(), 0.0);
  for (std::size_t j = 0; j < m.reactions.size(); ++j) {
    const Reaction& rx = m.reactions[j];
    // One fused (beta - alpha) * r term per species so the arithmetic matches
    // the hand-written model equations.
    std::map<int, double> net;
    for (const auto& [idx, beta] : rx.product_coeffs) net[idx] += beta;
    for (const auto& [idx, alpha] : rx.reactant_coeffs) net[idx] -= alpha;
    for (const auto& [idx, coeff] : net) {
      if (coeff != 0.0) dydt[idx] += coeff * rates[j];
    }
  }
  for (const auto& [idx, inflow] : m.sources) {
    dydt[idx] += inflow;
  }
  return dydt;
}

}  // namespace biochar
