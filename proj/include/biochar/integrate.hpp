#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace biochar {

/// dydt = f(t, y); dydt is preallocated to y.size().
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double t_end = 1.0;
  std::size_t max_steps = 10'000'000;
  double initial_step = 0.0;  // 0 = pick automatically

  /// Strictly increasing sample times starting at 0. The integrator steps
  /// exactly onto each sample, so recorded states carry full method order.
  /// Empty = record every accepted step.
  std::vector<double> sample_times;
};

enum class IntegrationStatus { ok, max_steps_exceeded, positivity_violation, non_finite };

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;

  IntegrationStatus status = IntegrationStatus::ok;
  std::string error;

  // Monitors.
  double min_component = std::numeric_limits<double>::infinity();
  int min_component_index = -1;
  double min_component_time = 0.0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  bool ok() const { return status == IntegrationStatus::ok; }
  std::size_t size() const { return times.size(); }
  const std::vector<double>& back() const { return states.back(); }

  /// One component of every sampled state.
  std::vector<double> component(std::size_t i) const;

  /// Index of the first sample time >= t.
  std::size_t index_at(double t) const;
};

/// Embedded Runge-Kutta 4(5) pair (Dormand-Prince) with PI step-size
/// control: local error per step <= abs_tol + rel_tol*|y|, safety factor
/// 0.9, step growth clamped to [0.2, 5]. Components in [-1e-12, 0) are
/// clamped to 0 after each accepted step; anything more negative stops the
/// run with a positivity violation.
Trajectory integrate_adaptive(const OdeRhs& rhs, std::vector<double> y0,
                              const IntegratorConfig& cfg);

/// Classical fixed-step 4th-order Runge-Kutta; the independent oracle for
/// adaptive results. No positivity handling; aborts on non-finite states.
Trajectory integrate_fixed_rk4(const OdeRhs& rhs, std::vector<double> y0, double dt,
                               double t_end,
                               const std::vector<double>& sample_times = {});

/// {0} followed by a log-spaced grid from t_end*first_fraction up to t_end.
std::vector<double> log_spaced_times(double t_end, int points_per_decade = 200,
                                     double first_fraction = 1e-6);

}  // namespace biochar
