#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "biochar/model.hpp"

namespace biochar {

using Mat3 = std::array<std::array<double, 3>, 3>;
using EigenTriple = std::array<std::complex<double>, 3>;

enum class Stability { asymptotically_stable, unstable, marginal };
enum class EquilibriumKind { microbe_free, microbial };

const char* to_string(Stability s);
const char* to_string(EquilibriumKind k);

/// An equilibrium of the reduced (Om, M, Ch) system. Charcoal is always 0:
/// its equation forces it.
struct EquilibriumPoint {
  EquilibriumKind kind;
  std::array<double, 3> point;  // dimensional (om, microbes, charcoal)
  Mat3 jacobian;
  EigenTriple eigenvalues;
  Stability verdict;
};

/// Om level at which microbe reproduction balances death:
/// (k4 / (mu*k3(0)))^(1/delta).
double u1_star(const Params& p);

/// Source level s* = k1(0)*u1_star above which the microbial equilibrium
/// exists and the microbe-free one loses stability.
double bifurcation_threshold(const Params& p);

/// Microbe level of the microbial equilibrium: the unique root of
/// s - k1(u2)*U1 - (k4/mu)(delta - eta*mu)*u2, found by bisection (the
/// residual is strictly decreasing). Absent when s <= bifurcation threshold.
std::optional<double> solve_u2_star(const Params& p);

/// Analytic Jacobians of the reduced system at the two equilibria.
Mat3 jacobian_microbe_free(const Params& p);
Mat3 jacobian_microbial(const Params& p);

/// Eigenvalues of the block-structured Jacobians: the diagonal for upper
/// triangular input, the quadratic closed form when only the leading 2x2
/// block is coupled, and the closed-form characteristic cubic otherwise.
EigenTriple eigenvalues_3x3(const Mat3& j);

/// asymptotically stable / unstable by the sign of the largest real part;
/// marginal inside the numerical zero band (-1e-10, 1e-10).
Stability classify_stability(const EigenTriple& eigenvalues);

/// The microbe-free equilibrium, plus the microbial one when the source
/// exceeds the bifurcation threshold.
std::vector<EquilibriumPoint> find_equilibria(const Params& p);

/// Right-hand side of the isolated reproduction/death block (no charcoal,
/// no mineralization, no source).
std::array<double, 2> subsystem_rhs(const Params& p, double om, double microbes);

enum class SubsystemRegime { bounded, degenerate_line, blow_up_prone };

const char* to_string(SubsystemRegime r);

/// Behaviour of the reproduction/death block, classified by delta vs
/// eta*mu. In the degenerate case om + eta*microbes is conserved and the
/// equilibria form the line om = c1.
struct SubsystemReport {
  double c1 = 0.0;       // Om level of the Om nullcline
  double u1 = 0.0;       // Om level of the microbe nullcline (= u1_star)
  SubsystemRegime regime = SubsystemRegime::bounded;
  bool conserved = false;
  std::optional<double> equilibrium_line;
};

/// Intentionally accepts delta < eta*mu so the blow-up regime that
/// motivates the parameter restriction can be inspected.
SubsystemReport analyze_subsystem(const Params& p);

}  // namespace biochar
