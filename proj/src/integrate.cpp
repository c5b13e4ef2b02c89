#include "biochar/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "biochar/mechanism.hpp"

namespace biochar {

std::vector<double> Trajectory::component(std::size_t i) const {
  std::vector<double> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.at(i));
  return out;
}

std::size_t Trajectory::index_at(double t) const {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  return static_cast<std::size_t>(it - times.begin());
}

std::vector<double> log_spaced_times(double t_end, int points_per_decade,
                                     double first_fraction) {
  if (!(t_end > 0.0) || points_per_decade < 1 || !(first_fraction > 0.0) ||
      !(first_fraction < 1.0)) {
    throw std::invalid_argument("bad log grid request");
  }
  std::vector<double> times{0.0};
  const double lo = std::log10(t_end * first_fraction);
  const double hi = std::log10(t_end);
  const int n = static_cast<int>(std::ceil((hi - lo) * points_per_decade));
  for (int i = 0; i <= n; ++i) {
    double t = std::pow(10.0, lo + (hi - lo) * i / n);
    if (i == n) t = t_end;
    if (t > times.back()) times.push_back(t);
  }
  return times;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order weights equal the last tableau row (first-same-as-last);
// kE holds the difference to the embedded 4th-order solution.
constexpr double kE[7] = {71.0 / 57600,  0.0,          -71.0 / 16695, 71.0 / 1920,
                          -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

struct Stepper {
  const OdeRhs& rhs;
  std::size_t n;
  std::array<std::vector<double>, 7> k;
  std::vector<double> work;

  Stepper(const OdeRhs& f, std::size_t dim) : rhs(f), n(dim), work(dim) {
    for (auto& v : k) v.resize(dim);
  }

  // One trial step from (t, y) with size h; fills y_out and err_out.
  // k[0] must already hold f(t, y); on exit k[6] = f(t+h, y_out).
  void trial(double t, const std::vector<double>& y, double h,
             std::vector<double>& y_out, std::vector<double>& err_out) {
    for (int stage = 1; stage < 7; ++stage) {
      const std::vector<double>& src =
          (stage == 6) ? y_out : work;  // stage 6 evaluates at the 5th-order result
      if (stage < 6) {
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int s = 0; s < stage; ++s) acc += kA[stage][s] * k[s][i];
          work[i] = y[i] + h * acc;
        }
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (int s = 0; s < 6; ++s) acc += kA[6][s] * k[s][i];
          y_out[i] = y[i] + h * acc;
        }
      }
      rhs(t + kC[stage] * h, src, k[stage]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int s = 0; s < 7; ++s) acc += kE[s] * k[s][i];
      err_out[i] = h * acc;
    }
  }
};

void note_min(Trajectory& tr, const std::vector<double>& y, double t) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] < tr.min_component) {
      tr.min_component = y[i];
      tr.min_component_index = static_cast<int>(i);
      tr.min_component_time = t;
    }
  }
}

void check_grid(const std::vector<double>& grid, double t_end) {
  if (grid.empty()) return;
  if (grid.front() != 0.0) throw std::invalid_argument("sample grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("sample grid must be strictly increasing");
    }
  }
  if (grid.back() > t_end * (1 + 1e-12)) {
    throw std::invalid_argument("sample grid extends past t_end");
  }
}

}  // namespace

Trajectory integrate_adaptive(const OdeRhs& rhs, std::vector<double> y0,
                              const IntegratorConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || !(cfg.t_end > 0.0) ||
      cfg.max_steps < 1) {
    throw std::invalid_argument("bad integrator config");
  }
  check_grid(cfg.sample_times, cfg.t_end);
  const std::size_t n = y0.size();
  for (std::size_t i = 0; i < n; ++i) {
    y0[i] = detail::checked_concentration(y0[i], static_cast<int>(i));
  }

  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(y0);

  Stepper st(rhs, n);
  std::vector<double> y = std::move(y0), y_new(n), err(n);
  double t = 0.0;
  rhs(t, y, st.k[0]);

  // Initial step: h such that an Euler step moves y by ~1% of its scale.
  double h = cfg.initial_step;
  if (h <= 0.0) {
    double ynorm = 0.0, fnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc = cfg.abs_tol + cfg.rel_tol * std::fabs(y[i]);
      ynorm = std::max(ynorm, std::fabs(y[i]) / sc);
      fnorm = std::max(fnorm, std::fabs(st.k[0][i]) / sc);
    }
    h = (fnorm > 0.0) ? 0.01 * std::max(ynorm, 1.0) / fnorm : cfg.t_end / 100;
    h = std::min(h, cfg.t_end / 100);
  }

  constexpr double kSafety = 0.9;
  constexpr double kMinFactor = 0.2;
  constexpr double kMaxFactor = 5.0;
  constexpr double kBeta = 0.04;                 // PI stabilization
  constexpr double kExpo = 0.2 - kBeta * 0.75;
  double err_old = 1e-4;

  std::size_t next_sample = 1;  // sample_times[0] == 0 is already recorded
  const bool gridded = !cfg.sample_times.empty();

  while (t < cfg.t_end) {
    if (tr.accepted_steps + tr.rejected_steps >= cfg.max_steps) {
      tr.status = IntegrationStatus::max_steps_exceeded;
      tr.error = "max step count reached at t = " + std::to_string(t);
      break;
    }
    double target = cfg.t_end;
    if (gridded && next_sample < cfg.sample_times.size()) {
      target = cfg.sample_times[next_sample];
    }
    const bool hits_target = (target - t <= h);
    const double h_try = hits_target ? target - t : h;

    st.trial(t, y, h_try, y_new, err);

    // Scaled RMS error norm.
    double err_norm = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(y_new[i]) || !std::isfinite(err[i])) {
        finite = false;
        break;
      }
      const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
      err_norm += (err[i] / sc) * (err[i] / sc);
    }
    err_norm = finite ? std::sqrt(err_norm / n) : std::numeric_limits<double>::infinity();

    if (err_norm <= 1.0) {
      t = hits_target ? target : t + h_try;
      y.swap(y_new);
      note_min(tr, y, t);
      bool clamped = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (y[i] < 0.0) {
          if (y[i] < -kNegativeNoiseFloor) {
            tr.status = IntegrationStatus::positivity_violation;
            tr.error = "component " + std::to_string(i) + " reached " +
                       std::to_string(y[i]) + " at t = " + std::to_string(t);
            break;
          }
          y[i] = 0.0;
          clamped = true;
        }
      }
      if (tr.status != IntegrationStatus::ok) break;
      ++tr.accepted_steps;

      if (gridded) {
        if (hits_target && next_sample < cfg.sample_times.size() &&
            target == cfg.sample_times[next_sample]) {
          tr.times.push_back(target);
          tr.states.push_back(y);
          ++next_sample;
        }
      } else {
        tr.times.push_back(t);
        tr.states.push_back(y);
      }

      if (clamped) {
        rhs(t, y, st.k[0]);
      } else {
        st.k[0] = st.k[6];  // first-same-as-last
      }

      const double safe_err = std::max(err_norm, 1e-10);
      double factor = kSafety * std::pow(safe_err, -kExpo) * std::pow(err_old, kBeta);
      factor = std::clamp(factor, kMinFactor, kMaxFactor);
      err_old = safe_err;
      h = h_try * factor;
    } else {
      ++tr.rejected_steps;
      const double factor =
          std::clamp(kSafety * std::pow(err_norm, -0.2), kMinFactor, 1.0);
      h = h_try * factor;
      if (!(h >= (t + cfg.t_end) * 1e-16)) {
        tr.status = IntegrationStatus::non_finite;
        tr.error = "step size underflow at t = " + std::to_string(t);
        break;
      }
    }
  }
  return tr;
}

Trajectory integrate_fixed_rk4(const OdeRhs& rhs, std::vector<double> y0, double dt,
                               double t_end, const std::vector<double>& sample_times) {
  if (!(dt > 0.0) || !(t_end > 0.0)) throw std::invalid_argument("bad step or horizon");
  check_grid(sample_times, t_end);
  const std::size_t n = y0.size();

  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(y0);

  std::vector<double> y = std::move(y0);
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = 0.0;
  std::size_t next_sample = 1;
  const bool gridded = !sample_times.empty();

  while (t < t_end) {
    double target = t_end;
    if (gridded && next_sample < sample_times.size()) target = sample_times[next_sample];
    const bool hits_target = (target - t <= dt);
    const double h = hits_target ? target - t : dt;

    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
    rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    t = hits_target ? target : t + h;
    ++tr.accepted_steps;
    note_min(tr, y, t);

    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(y[i])) {
        tr.status = IntegrationStatus::non_finite;
        tr.error = "non-finite state at t = " + std::to_string(t);
        return tr;
      }
    }

    if (gridded) {
      if (hits_target && next_sample < sample_times.size()) {
        tr.times.push_back(target);
        tr.states.push_back(y);
        ++next_sample;
      }
    } else {
      tr.times.push_back(t);
      tr.states.push_back(y);
    }
  }
  return tr;
}

}  // namespace biochar
