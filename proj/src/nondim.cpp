#include "biochar/nondim.hpp"

#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace biochar {

DerivedConstants derive_constants(const FreeParameters& f) {
  if (!(f.a1 > 0.0) || !(f.b1 > 0.0)) {
    throw std::invalid_argument("derive_constants requires a1 > 0 and b1 > 0");
  }
  DerivedConstants d;
  d.eta = f.delta / f.mu;
  d.alpha = 1.0 + f.a1 / f.b1;
  d.source = d.alpha * f.K1 * f.b1 * f.U1;
  d.K4 = std::pow(f.U1, f.delta) * f.K3 * f.mu * f.b3 / f.b4;
  return d;
}

Params build_params(const FreeParameters& f, const std::map<std::string, double>& pinned) {
  DerivedConstants d = derive_constants(f);
  for (const auto& [key, value] : pinned) {
    if (key == "eta") {
      d.eta = value;
    } else if (key == "alpha") {
      d.alpha = value;
      d.source = d.alpha * f.K1 * f.b1 * f.U1;
    } else if (key == "s") {
      d.source = value;
    } else if (key == "K4") {
      d.K4 = value;
    } else {
      throw std::invalid_argument("unknown derived-constant pin '" + key + "'");
    }
  }

  Params p;
  p.k1 = {f.a1, f.b1, f.K1, f.U2};
  p.k2 = {f.a2, f.b2, f.K2, f.U2};
  p.k3 = {f.a3, f.b3, f.K3, f.U3};
  p.k4 = {0.0, f.b4, d.K4, 1.0};
  p.delta = f.delta;
  p.eta = d.eta;
  p.mu = f.mu;
  p.n_co2 = f.n;
  p.source = d.source;
  p.ref_om = f.U1;
  p.ref_microbes = f.U2;
  p.ref_charcoal = f.U3;
  p.ref_co2 = f.U4;
  p.ref_time = f.tau;
  return p;
}

TimeScales time_scales(const Params& p) {
  if (!(p.ref_time > 0.0)) throw std::invalid_argument("tau > 0 required");
  const double tau = p.ref_time;
  const double K1 = p.k1.scale, K2 = p.k2.scale, K3 = p.k3.scale, K4 = p.k4.scale;
  TimeScales t;
  t.tau1 = tau * K1;
  t.tau2 = tau * p.delta * K3 * std::pow(p.ref_om, p.delta - 1.0) * p.ref_microbes;
  t.tau3 = tau * p.eta * K4 * p.ref_microbes / p.ref_om;
  t.tau4 = tau / p.ref_om;
  t.tau5 = tau * p.mu * K3 * std::pow(p.ref_om, p.delta);
  t.tau6 = tau * K4;
  t.tau7 = tau * K2;
  t.tau8 = tau * p.n_co2 * K1 * p.ref_om / p.ref_co2;
  t.tau9 = tau * K2 * p.ref_charcoal / p.ref_co2;
  return t;
}

OrderingReport check_ordering(const Params& p) {
  const double K1 = p.k1.scale;
  const double K2 = p.k2.scale;
  const double K3_eff = p.k3.scale * std::pow(p.ref_om, p.delta);
  const double K4 = p.k4.scale;
  OrderingReport r;
  const bool first = K2 < 0.5 * K1;
  const bool second = 0.5 * K1 < 0.5 * std::min(K3_eff, K4);
  r.satisfied = first && second;
  std::ostringstream os;
  os << "K2 < K1/2: " << (first ? "yes" : "no") << " (" << K2 << " vs " << 0.5 * K1
     << "); K1/2 < min{K3*U1^delta, K4}/2: " << (second ? "yes" : "no") << " ("
     << 0.5 * K1 << " vs " << 0.5 * std::min(K3_eff, K4) << ")";
  r.detail = os.str();
  return r;
}

State to_dimensionless(const Params& p, const State& u) {
  return {u.organic_matter / p.ref_om, u.microbes / p.ref_microbes,
          u.charcoal / p.ref_charcoal, u.co2 / p.ref_co2};
}

State to_dimensional(const Params& p, const State& u) {
  return {u.organic_matter * p.ref_om, u.microbes * p.ref_microbes,
          u.charcoal * p.ref_charcoal, u.co2 * p.ref_co2};
}

State ScaledSystem::rhs(const State& u) const {
  const double k1v = k1(u.microbes);
  const double k2v = k2(u.microbes);
  const double k3v = k3(u.charcoal);
  const double k4v = k4.at_zero();
  const double grow = k3v * std::pow(u.organic_matter, delta) * u.microbes;
  State d;
  d.organic_matter = -ts.tau1 * k1v * u.organic_matter - ts.tau2 * grow +
                     ts.tau3 * k4v * u.microbes + source_term;
  d.microbes = ts.tau5 * grow - ts.tau6 * k4v * u.microbes;
  d.charcoal = -ts.tau7 * k2v * u.charcoal;
  d.co2 = ts.tau8 * k1v * u.organic_matter + ts.tau9 * k2v * u.charcoal;
  return d;
}

ScaledSystem scaled_system(const Params& p) {
  ScaledSystem s;
  s.ts = time_scales(p);
  s.k1 = {p.k1.slope, p.k1.intercept, 1.0, 1.0};
  s.k2 = {p.k2.slope, p.k2.intercept, 1.0, 1.0};
  s.k3 = {p.k3.slope, p.k3.intercept, 1.0, 1.0};
  s.k4 = {0.0, p.k4.intercept, 1.0, 1.0};
  s.delta = p.delta;
  s.source_term = s.ts.tau4 * p.source;
  return s;
}

FreeParameters parameter_set_1() {
  FreeParameters f;
  f.a1 = 1.0; f.a2 = 1.0; f.a3 = 1.9;
  f.b1 = 1.0; f.b2 = 1.0; f.b3 = 0.1; f.b4 = 1.0;
  f.K1 = 0.01; f.K2 = 1e-3; f.K3 = 1.0;
  f.U1 = 1.0; f.U2 = 1.0; f.U3 = 1.0; f.U4 = 1e3;
  f.mu = 1.0; f.delta = 10.0; f.n = 10.0;
  f.tau = 1.0;
  f.tau_unit = "s";
  return f;
}

FreeParameters parameter_set_2() {
  FreeParameters f;
  f.a1 = 1.0; f.a2 = 1.0; f.a3 = 1.9;
  f.b1 = 1.0; f.b2 = 1.0; f.b3 = 0.1; f.b4 = 1.0;
  f.K1 = 5e-8; f.K2 = 2e-8; f.K3 = 3e-10;
  f.U1 = 18.0; f.U2 = 0.2; f.U3 = 100.0; f.U4 = 180.0;
  f.mu = 1.0; f.delta = 2.0; f.n = 10.0;
  f.tau = kSecondsPerYear;
  f.tau_unit = "year";
  return f;
}

FreeParameters parameter_set_3() {
  FreeParameters f;
  f.a1 = 1.0; f.a2 = 1.0; f.a3 = 1.9;
  f.b1 = 1.0; f.b2 = 1.0; f.b3 = 0.1; f.b4 = 1.0;
  f.K1 = 5e-8; f.K2 = 5e-8; f.K3 = 5e-8;
  f.U1 = 3.6; f.U2 = 2.0; f.U3 = 100.0; f.U4 = 180.0;
  f.mu = 1.0; f.delta = 5.0; f.n = 100.0;
  f.tau = kSecondsPerYear;
  f.tau_unit = "year";
  return f;
}

FreeParameters parameter_set(int which) {
  switch (which) {
    case 1: return parameter_set_1();
    case 2: return parameter_set_2();
    case 3: return parameter_set_3();
  }
  throw std::invalid_argument("parameter set must be 1, 2 or 3");
}

void set_free_parameter(FreeParameters& f, const std::string& key, double value) {
  static const std::map<std::string, double FreeParameters::*> fields = {
      {"a1", &FreeParameters::a1},   {"a2", &FreeParameters::a2},
      {"a3", &FreeParameters::a3},   {"b1", &FreeParameters::b1},
      {"b2", &FreeParameters::b2},   {"b3", &FreeParameters::b3},
      {"b4", &FreeParameters::b4},   {"K1", &FreeParameters::K1},
      {"K2", &FreeParameters::K2},   {"K3", &FreeParameters::K3},
      {"U1", &FreeParameters::U1},   {"U2", &FreeParameters::U2},
      {"U3", &FreeParameters::U3},   {"U4", &FreeParameters::U4},
      {"mu", &FreeParameters::mu},   {"delta", &FreeParameters::delta},
      {"n", &FreeParameters::n},     {"tau", &FreeParameters::tau},
  };
  auto it = fields.find(key);
  if (it == fields.end()) throw std::invalid_argument("unknown parameter '" + key + "'");
  f.*(it->second) = value;
}

std::pair<FreeParameters, std::map<std::string, double>> load_config(std::istream& in) {
  FreeParameters f;
  std::map<std::string, double> pinned;
  std::string tau_unit = "s";
  double tau_value = 1.0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key, eq;
    if (!(ls >> key)) continue;
    if (!(ls >> eq) || eq != "=") {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    }
    if (key == "tau_unit") {
      ls >> tau_unit;
      continue;
    }
    double value = 0.0;
    if (!(ls >> value)) {
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": bad numeric value for '" + key + "'");
    }
    if (key.starts_with("override.")) {
      pinned[key.substr(9)] = value;
    } else if (key == "tau") {
      tau_value = value;
    } else {
      set_free_parameter(f, key, value);
    }
  }
  if (tau_unit == "year" || tau_unit == "years") {
    f.tau = tau_value * kSecondsPerYear;
    f.tau_unit = "year";
  } else if (tau_unit == "s" || tau_unit == "sec" || tau_unit == "seconds") {
    f.tau = tau_value;
    f.tau_unit = "s";
  } else {
    throw std::runtime_error("unknown tau_unit '" + tau_unit + "'");
  }
  return {f, pinned};
}

}  // namespace biochar
