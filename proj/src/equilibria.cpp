#include "biochar/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace biochar {

namespace {

constexpr double kMarginalBand = 1e-10;

void require_valid(const Params& p) {
  // Full validation is the caller's job; these are the quantities this
  // module divides by or takes roots of.
  if (!(p.delta >= 1.0) || !(p.mu > 0.0) || !(p.k3.at_zero() > 0.0) ||
      !(p.k1.at_zero() > 0.0)) {
    throw std::invalid_argument("invalid parameters for equilibrium analysis");
  }
}

}  // namespace

const char* to_string(Stability s) {
  switch (s) {
    case Stability::asymptotically_stable: return "asymptotically stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "?";
}

const char* to_string(EquilibriumKind k) {
  return k == EquilibriumKind::microbe_free ? "microbe-free" : "microbial";
}

const char* to_string(SubsystemRegime r) {
  switch (r) {
    case SubsystemRegime::bounded: return "bounded";
    case SubsystemRegime::degenerate_line: return "degenerate-line";
    case SubsystemRegime::blow_up_prone: return "blow-up-prone";
  }
  return "?";
}

double u1_star(const Params& p) {
  require_valid(p);
  return std::pow(p.k4.at_zero() / (p.mu * p.k3.at_zero()), 1.0 / p.delta);
}

double bifurcation_threshold(const Params& p) {
  return p.k1.at_zero() * u1_star(p);
}

std::optional<double> solve_u2_star(const Params& p) {
  require_valid(p);
  const double big_u1 = u1_star(p);
  if (!(p.source > p.k1.at_zero() * big_u1)) return std::nullopt;

  const double k4v = p.k4.at_zero();
  const double coupling = (k4v / p.mu) * (p.delta - p.eta * p.mu);
  const auto residual = [&](double u2) {
    return -p.k1(u2) * big_u1 - coupling * u2 + p.source;
  };

  // The residual is strictly decreasing and positive at 0. Expand the upper
  // bracket until it goes negative, then bisect.
  double hi = p.ref_microbes;
  while (residual(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e9 * p.ref_microbes) {
      throw std::runtime_error("no root below 1e9 * U2; rate law is degenerate");
    }
  }
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-17 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Mat3 jacobian_microbe_free(const Params& p) {
  const double k1v = p.k1.at_zero();
  const double k3v = p.k3.at_zero();
  const double k4v = p.k4.at_zero();
  const double om = p.source / k1v;
  Mat3 j{};
  j[0][0] = -k1v;
  j[0][1] = -p.k1.derivative() * om - p.delta * k3v * std::pow(om, p.delta) +
            p.eta * k4v;
  j[0][2] = 0.0;
  j[1][0] = 0.0;
  j[1][1] = p.mu * k3v * std::pow(om, p.delta) - k4v;
  j[1][2] = 0.0;
  j[2][0] = 0.0;
  j[2][1] = 0.0;
  j[2][2] = -p.k2.at_zero();
  return j;
}

Mat3 jacobian_microbial(const Params& p) {
  const auto u2 = solve_u2_star(p);
  if (!u2) throw std::runtime_error("microbial equilibrium does not exist");
  const double big_u1 = u1_star(p);
  const double k3v = p.k3.at_zero();
  const double k4v = p.k4.at_zero();
  const double k3_ratio = p.k3.derivative() / k3v;
  Mat3 j{};
  j[0][0] = -p.k1(*u2) - p.delta * p.delta * k3v * *u2 * std::pow(big_u1, p.delta - 1.0);
  j[0][1] = -p.k1.derivative() * big_u1 - (k4v / p.mu) * (p.delta - p.eta * p.mu);
  j[0][2] = -(p.delta / p.mu) * k3_ratio * k4v * *u2;
  j[1][0] = p.delta * p.mu * k3v * *u2 * std::pow(big_u1, p.delta - 1.0);
  j[1][1] = 0.0;
  j[1][2] = k3_ratio * k4v * *u2;
  j[2][0] = 0.0;
  j[2][1] = 0.0;
  j[2][2] = -p.k2(*u2);
  return j;
}

namespace {

// Roots of x^3 + a2 x^2 + a1 x + a0 with real coefficients.
EigenTriple solve_cubic(double a2, double a1, double a0) {
  // Depressed form t^3 + p t + q with x = t - a2/3.
  const double shift = a2 / 3.0;
  const double P = a1 - a2 * a2 / 3.0;
  const double Q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const double disc = Q * Q / 4.0 + P * P * P / 27.0;
  EigenTriple roots;
  if (disc > 0.0) {
    // One real root, one conjugate pair.
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-Q / 2.0 + sq);
    const double v = std::cbrt(-Q / 2.0 - sq);
    const double real = u + v;
    roots[0] = real - shift;
    roots[1] = std::complex<double>(-real / 2.0 - shift, std::sqrt(3.0) / 2.0 * (u - v));
    roots[2] = std::conj(roots[1]);
  } else if (P == 0.0 && Q == 0.0) {
    roots[0] = roots[1] = roots[2] = -shift;
  } else {
    // Three real roots (trigonometric form; P < 0 here).
    const double m = 2.0 * std::sqrt(-P / 3.0);
    const double arg = std::clamp(3.0 * Q / (P * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      roots[k] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift;
    }
  }
  return roots;
}

}  // namespace

EigenTriple eigenvalues_3x3(const Mat3& j) {
  const bool lower_zero = j[1][0] == 0.0 && j[2][0] == 0.0 && j[2][1] == 0.0;
  if (lower_zero) {
    return {j[0][0], j[1][1], j[2][2]};
  }
  const bool block_shape = j[2][0] == 0.0 && j[2][1] == 0.0 && j[1][1] == 0.0;
  if (block_shape) {
    // Leading block [[A1, A2], [A3, 0]]: lambda = A1/2 +- sqrt(A1^2/4 + A2*A3).
    const double a1 = j[0][0], a2 = j[0][1], a3 = j[1][0];
    const std::complex<double> sq = std::sqrt(std::complex<double>(a1 * a1 / 4.0 + a2 * a3));
    return {a1 / 2.0 + sq, a1 / 2.0 - sq, j[2][2]};
  }
  const double tr = j[0][0] + j[1][1] + j[2][2];
  const double minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] +
                        j[0][0] * j[2][2] - j[0][2] * j[2][0] +
                        j[1][1] * j[2][2] - j[1][2] * j[2][1];
  const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                     j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                     j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
  return solve_cubic(-tr, minors, -det);
}

Stability classify_stability(const EigenTriple& eigenvalues) {
  double max_re = eigenvalues[0].real();
  for (const auto& ev : eigenvalues) max_re = std::max(max_re, ev.real());
  if (max_re >= kMarginalBand) return Stability::unstable;
  if (max_re <= -kMarginalBand) return Stability::asymptotically_stable;
  return Stability::marginal;
}

std::vector<EquilibriumPoint> find_equilibria(const Params& p) {
  std::vector<EquilibriumPoint> out;

  EquilibriumPoint trivial;
  trivial.kind = EquilibriumKind::microbe_free;
  trivial.point = {p.source / p.k1.at_zero(), 0.0, 0.0};
  trivial.jacobian = jacobian_microbe_free(p);
  trivial.eigenvalues = eigenvalues_3x3(trivial.jacobian);
  trivial.verdict = classify_stability(trivial.eigenvalues);
  out.push_back(trivial);

  if (const auto u2 = solve_u2_star(p)) {
    EquilibriumPoint microbial;
    microbial.kind = EquilibriumKind::microbial;
    microbial.point = {u1_star(p), *u2, 0.0};
    microbial.jacobian = jacobian_microbial(p);
    microbial.eigenvalues = eigenvalues_3x3(microbial.jacobian);
    microbial.verdict = classify_stability(microbial.eigenvalues);
    out.push_back(microbial);
  }
  return out;
}

std::array<double, 2> subsystem_rhs(const Params& p, double om, double microbes) {
  const double k3v = p.k3.at_zero();
  const double k4v = p.k4.at_zero();
  const double grow = k3v * microbes * std::pow(om, p.delta);
  return {-p.delta * grow + p.eta * k4v * microbes,
          p.mu * grow - k4v * microbes};
}

SubsystemReport analyze_subsystem(const Params& p) {
  require_valid(p);
  SubsystemReport r;
  const double k3v = p.k3.at_zero();
  const double k4v = p.k4.at_zero();
  r.c1 = std::pow(p.eta * k4v / (p.delta * k3v), 1.0 / p.delta);
  r.u1 = u1_star(p);
  const double gap = p.delta - p.eta * p.mu;
  // eta is often derived as delta/mu in floating point, so compare with a
  // relative band rather than exactly.
  const double tol = 1e-9 * std::max({1.0, p.delta, p.eta * p.mu});
  if (std::fabs(gap) <= tol) {
    r.regime = SubsystemRegime::degenerate_line;
    r.conserved = true;
    r.equilibrium_line = r.c1;
  } else if (gap > 0.0) {
    r.regime = SubsystemRegime::bounded;
  } else {
    r.regime = SubsystemRegime::blow_up_prone;
  }
  return r;
}

}  // namespace biochar
