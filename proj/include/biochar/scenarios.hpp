#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "biochar/integrate.hpp"
#include "biochar/model.hpp"
#include "biochar/nondim.hpp"

namespace biochar {

/// Model parameters failed validation; carries the full violation list.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// An integration did not finish; the message names the failing variant.
class SimulationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A file could not be written or read; the message names the path.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One simulation study: a parameter table (with optional pins), the
/// dimensionless initial state, the horizon, and sampling/tolerance knobs.
struct Scenario {
  std::string name;
  FreeParameters free;
  std::map<std::string, double> pinned;
  Params params;

  State initial{1.0, 1.0, 1.0, 0.0};  // dimensionless
  double t_end = 10.0;                // dimensionless
  double short_time_split = 0.1;      // boundary of the short-time panel
  int points_per_decade = 200;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  std::size_t max_steps = 10'000'000;
};

/// Built-in studies 1..3 with their default horizons.
Scenario scenario_for_set(int set);

/// Applies "key=value": plain keys modify the free table and rerun the
/// derivation chain; "override.<name>" pins a derived constant.
void apply_override(Scenario& sc, const std::string& key, double value);

/// The charcoal run against its no-charcoal baseline on a shared sample
/// grid, plus the CO2 emission difference per sample.
struct ComparisonResult {
  std::string scenario_name;
  Trajectory with_charcoal;
  Trajectory baseline;
  std::vector<double> delta_co2;
  std::optional<double> charcoal_half_life;  // dimensionless time
};

ComparisonResult run_scenario(const Scenario& sc);

/// Reruns with the charcoal reference concentration scaled by `factor`
/// (ten times the charcoal mass = factor 10).
ComparisonResult sensitivity_u3(const Scenario& sc, double factor);

/// Reruns with the charcoal-mineralization reference constant replaced
/// (per-second units).
ComparisonResult sensitivity_k2(const Scenario& sc, double new_k2);

/// First dimensionless time at which charcoal falls below half its initial
/// value, linearly interpolated between samples.
std::optional<double> charcoal_half_life(const Trajectory& tr);

/// CSV with exactly the columns t,u1,u2,u3,u4,u4_baseline,delta_co2 in full
/// double precision, LF line endings.
void export_csv(const ComparisonResult& r, std::ostream& out);
void export_csv(const ComparisonResult& r, const std::filesystem::path& path);

struct CsvColumns {
  std::vector<double> t, u1, u2, u3, u4, u4_baseline, delta_co2;
};
CsvColumns read_csv(std::istream& in);
CsvColumns read_csv(const std::filesystem::path& path);

/// Two stacked panels (short-time on top, full horizon below) with the five
/// labelled series u1, u2, u3, u4, u4_baseline.
std::string render_svg(const ComparisonResult& r, double short_time_split);
void export_svg(const ComparisonResult& r, const std::filesystem::path& path,
                double short_time_split);

/// JSON-lines report: equilibria with eigenvalues and verdicts, the
/// bifurcation threshold, the subsystem regime and the rate ordering.
std::string report_equilibria(const Scenario& sc);

}  // namespace biochar
