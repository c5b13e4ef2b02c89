#include "biochar/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "biochar/equilibria.hpp"
#include "biochar/format.hpp"

namespace biochar {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

OdeRhs scaled_ode(const ScaledSystem& sys) {
  return [sys](double, std::span<const double> y, std::span<double> d) {
    // Trial stages may poke slightly below zero; evaluate them at zero.
    const State u{std::max(y[0], 0.0), std::max(y[1], 0.0), std::max(y[2], 0.0),
                  std::max(y[3], 0.0)};
    const State out = sys.rhs(u);
    d[0] = out.organic_matter;
    d[1] = out.microbes;
    d[2] = out.charcoal;
    d[3] = out.co2;
  };
}

Trajectory integrate_variant(const ScaledSystem& sys, const State& y0,
                             const IntegratorConfig& cfg, const std::string& variant) {
  Trajectory tr = integrate_adaptive(scaled_ode(sys), {y0.organic_matter, y0.microbes,
                                                       y0.charcoal, y0.co2}, cfg);
  if (!tr.ok()) {
    throw SimulationError(variant + " run failed: " + tr.error);
  }
  return tr;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> violations)
    : std::runtime_error("parameter validation failed: " + join(violations, "; ")),
      violations_(std::move(violations)) {}

Scenario scenario_for_set(int set) {
  Scenario sc;
  sc.name = "set" + std::to_string(set);
  sc.free = parameter_set(set);
  sc.params = build_params(sc.free);
  if (set == 1) {
    sc.t_end = 2000.0;
    sc.short_time_split = 1.0;
  } else {
    sc.t_end = 10.0;
    sc.short_time_split = 0.01 * sc.t_end;
  }
  return sc;
}

void apply_override(Scenario& sc, const std::string& key, double value) {
  if (key.starts_with("override.")) {
    sc.pinned[key.substr(9)] = value;
  } else if (key == "tau") {
    // Like the config file, tau is given in the scenario's display unit.
    sc.free.tau = value * (sc.free.tau_unit == "year" ? kSecondsPerYear : 1.0);
  } else {
    set_free_parameter(sc.free, key, value);
  }
  sc.params = build_params(sc.free, sc.pinned);
}

ComparisonResult run_scenario(const Scenario& sc) {
  if (auto violations = validate_params(sc.params); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  const ScaledSystem sys = scaled_system(sc.params);

  IntegratorConfig cfg;
  cfg.rel_tol = sc.rel_tol;
  cfg.abs_tol = sc.abs_tol;
  cfg.t_end = sc.t_end;
  cfg.max_steps = sc.max_steps;
  cfg.sample_times = log_spaced_times(sc.t_end, sc.points_per_decade);

  ComparisonResult r;
  r.scenario_name = sc.name;
  r.with_charcoal = integrate_variant(sys, sc.initial, cfg, "with-charcoal");
  State no_charcoal = sc.initial;
  no_charcoal.charcoal = 0.0;
  r.baseline = integrate_variant(sys, no_charcoal, cfg, "baseline");

  r.delta_co2.resize(r.with_charcoal.size());
  for (std::size_t i = 0; i < r.delta_co2.size(); ++i) {
    r.delta_co2[i] = r.with_charcoal.states[i][3] - r.baseline.states[i][3];
  }
  r.charcoal_half_life = charcoal_half_life(r.with_charcoal);
  return r;
}

ComparisonResult sensitivity_u3(const Scenario& sc, double factor) {
  if (!(factor > 0.0)) throw std::invalid_argument("charcoal factor must be positive");
  Scenario varied = sc;
  varied.free.U3 *= factor;
  varied.params = build_params(varied.free, varied.pinned);
  return run_scenario(varied);
}

ComparisonResult sensitivity_k2(const Scenario& sc, double new_k2) {
  if (!(new_k2 > 0.0)) throw std::invalid_argument("K2 must be positive");
  Scenario varied = sc;
  varied.free.K2 = new_k2;
  varied.params = build_params(varied.free, varied.pinned);
  return run_scenario(varied);
}

std::optional<double> charcoal_half_life(const Trajectory& tr) {
  if (tr.states.empty()) return std::nullopt;
  const double start = tr.states.front()[2];
  if (!(start > 0.0)) return std::nullopt;
  const double target = 0.5 * start;
  for (std::size_t i = 1; i < tr.size(); ++i) {
    const double prev = tr.states[i - 1][2];
    const double cur = tr.states[i][2];
    if (cur < target) {
      const double w = (prev - target) / (prev - cur);
      return tr.times[i - 1] + w * (tr.times[i] - tr.times[i - 1]);
    }
  }
  return std::nullopt;
}

void export_csv(const ComparisonResult& r, std::ostream& out) {
  out << "t,u1,u2,u3,u4,u4_baseline,delta_co2\n";
  for (std::size_t i = 0; i < r.with_charcoal.size(); ++i) {
    const auto& s = r.with_charcoal.states[i];
    out << format_double(r.with_charcoal.times[i]) << ',' << format_double(s[0]) << ','
        << format_double(s[1]) << ',' << format_double(s[2]) << ','
        << format_double(s[3]) << ',' << format_double(r.baseline.states[i][3]) << ','
        << format_double(r.delta_co2[i]) << '\n';
  }
}

void export_csv(const ComparisonResult& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  export_csv(r, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

CsvColumns read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,u1,u2,u3,u4,u4_baseline,delta_co2") {
    throw IoError("unexpected CSV header");
  }
  CsvColumns c;
  std::vector<double>* cols[7] = {&c.t, &c.u1, &c.u2, &c.u3, &c.u4, &c.u4_baseline,
                                  &c.delta_co2};
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    for (auto* col : cols) {
      if (!std::getline(ls, cell, ',')) {
        throw IoError("short CSV row at line " + std::to_string(line_no));
      }
      col->push_back(std::strtod(cell.c_str(), nullptr));
    }
  }
  return c;
}

CsvColumns read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_csv(in);
}

namespace {

struct Series {
  const char* label;
  const char* color;
  bool co2_axis;  // co2 runs on its own (right-hand) scale like in the figures
  std::vector<double> values;
};

void render_panel(std::ostringstream& svg, const ComparisonResult& r,
                  const std::vector<Series>& series, double t_max, double x0, double y0,
                  double width, double height, const char* title) {
  const auto& times = r.with_charcoal.times;
  std::size_t count = 0;
  while (count < times.size() && times[count] <= t_max) ++count;
  if (count < 2) count = std::min<std::size_t>(2, times.size());

  double left_max = 0.0, right_max = 0.0;
  for (const auto& s : series) {
    double& m = s.co2_axis ? right_max : left_max;
    for (std::size_t i = 0; i < count; ++i) m = std::max(m, s.values[i]);
  }
  if (!(left_max > 0.0)) left_max = 1.0;
  if (!(right_max > 0.0)) right_max = 1.0;
  left_max *= 1.05;
  right_max *= 1.05;

  svg << "<g>\n";
  svg << "<rect x='" << x0 << "' y='" << y0 << "' width='" << width << "' height='"
      << height << "' fill='none' stroke='black'/>\n";
  svg << "<text x='" << x0 << "' y='" << y0 - 8 << "' font-size='14'>" << title
      << "</text>\n";
  for (const auto& s : series) {
    const double y_max = s.co2_axis ? right_max : left_max;
    svg << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
    for (std::size_t i = 0; i < count; ++i) {
      const double x = x0 + (t_max > 0 ? times[i] / t_max : 0.0) * width;
      const double y = y0 + height - (s.values[i] / y_max) * height;
      svg << x << ',' << y << ' ';
    }
    svg << "'/>\n";
  }
  // Axis annotations: horizon, concentration scale (left), co2 scale (right).
  svg << "<text x='" << x0 + width - 4 << "' y='" << y0 + height + 16
      << "' font-size='11' text-anchor='end'>t = " << format_double(t_max) << "</text>\n";
  svg << "<text x='" << x0 - 4 << "' y='" << y0 + 12
      << "' font-size='11' text-anchor='end'>" << format_double(left_max) << "</text>\n";
  svg << "<text x='" << x0 - 4 << "' y='" << y0 + height
      << "' font-size='11' text-anchor='end'>0</text>\n";
  svg << "<text x='" << x0 + width + 4 << "' y='" << y0 + 12
      << "' font-size='11'>" << format_double(right_max) << " (co2)</text>\n";
  svg << "</g>\n";
}

}  // namespace

std::string render_svg(const ComparisonResult& r, double short_time_split) {
  std::vector<Series> series = {
      {"u1", "#1f77b4", false, r.with_charcoal.component(0)},
      {"u2", "#2ca02c", false, r.with_charcoal.component(1)},
      {"u3", "#8c564b", false, r.with_charcoal.component(2)},
      {"u4", "#d62728", true, r.with_charcoal.component(3)},
      {"u4_baseline", "#7f7f7f", true, r.baseline.component(3)},
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='960' height='760' "
         "font-family='sans-serif'>\n";
  svg << "<text x='70' y='24' font-size='16'>" << r.scenario_name
      << ": concentrations with charcoal vs baseline CO2</text>\n";

  // Legend.
  double lx = 70.0;
  for (const auto& s : series) {
    svg << "<line x1='" << lx << "' y1='40' x2='" << lx + 24
        << "' y2='40' stroke='" << s.color << "' stroke-width='2'/>\n";
    svg << "<text x='" << lx + 28 << "' y='44' font-size='12'>" << s.label << "</text>\n";
    lx += 60.0 + 8.0 * std::char_traits<char>::length(s.label);
  }

  const double t_end = r.with_charcoal.times.back();
  render_panel(svg, r, series, short_time_split, 70, 80, 840, 280, "short time");
  render_panel(svg, r, series, t_end, 70, 430, 840, 280, "long time");
  svg << "</svg>\n";
  return svg.str();
}

void export_svg(const ComparisonResult& r, const std::filesystem::path& path,
                double short_time_split) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << render_svg(r, short_time_split);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::string report_equilibria(const Scenario& sc) {
  using nlohmann::json;
  if (auto violations = validate_params(sc.params); !violations.empty()) {
    throw ValidationError(std::move(violations));
  }
  const Params& p = sc.params;
  std::ostringstream out;

  const auto points = find_equilibria(p);
  out << json{{"type", "summary"},
              {"scenario", sc.name},
              {"source_s", p.source},
              {"bifurcation_threshold_s", bifurcation_threshold(p)},
              {"equilibrium_count", points.size()}}
             .dump()
      << '\n';

  for (const auto& pt : points) {
    json eig = json::array();
    for (const auto& ev : pt.eigenvalues) eig.push_back({ev.real(), ev.imag()});
    out << json{{"type", "equilibrium"},
                {"kind", to_string(pt.kind)},
                {"point", {pt.point[0], pt.point[1], pt.point[2]}},
                {"point_dimensionless",
                 {pt.point[0] / p.ref_om, pt.point[1] / p.ref_microbes,
                  pt.point[2] / p.ref_charcoal}},
                {"eigenvalues_per_second", eig},
                {"verdict", to_string(pt.verdict)}}
               .dump()
        << '\n';
  }

  const SubsystemReport sub = analyze_subsystem(p);
  json line = sub.equilibrium_line ? json(*sub.equilibrium_line) : json();
  out << json{{"type", "subsystem"},
              {"regime", to_string(sub.regime)},
              {"conserved", sub.conserved},
              {"c1", sub.c1},
              {"u1_star", sub.u1},
              {"equilibrium_line", line}}
             .dump()
      << '\n';

  const OrderingReport ord = check_ordering(p);
  out << json{{"type", "rate-ordering"}, {"satisfied", ord.satisfied}, {"detail", ord.detail}}
             .dump()
      << '\n';
  return out.str();
}

}  // namespace biochar
