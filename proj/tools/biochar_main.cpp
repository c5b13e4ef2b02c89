// Command-line front end: scenario simulation, equilibrium reports,
// sensitivity sweeps and the mechanism text rendering.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "biochar/equilibria.hpp"
#include "biochar/format.hpp"
#include "biochar/model.hpp"
#include "biochar/parser.hpp"
#include "biochar/scenarios.hpp"

namespace {

namespace fs = std::filesystem;
using namespace biochar;

constexpr int kExitValidation = 2;
constexpr int kExitIntegration = 3;
constexpr int kExitIo = 4;

std::pair<std::string, double> parse_assignment(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("expected KEY=VALUE, got '" + text + "'");
  }
  const std::string key = text.substr(0, eq);
  const std::string value = text.substr(eq + 1);
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end != value.c_str() + value.size() || value.empty()) {
    throw std::invalid_argument("bad numeric value in '" + text + "'");
  }
  return {key, v};
}

std::string override_hash(const std::vector<std::string>& overrides) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (const auto& o : overrides) {
    for (char c : o) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
    h ^= ';';
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h & 0xffffffffull));
  return buf;
}

fs::path default_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("BIOCHAR_OUT"); env && *env) return env;
  return ".";
}

Scenario build_scenario(int set, const std::string& config_path,
                        const std::vector<std::string>& overrides, double t_end) {
  Scenario sc;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw IoError("cannot open config " + config_path);
    auto [free, pinned] = load_config(in);
    sc.name = fs::path(config_path).stem().string();
    sc.free = free;
    sc.pinned = pinned;
    sc.params = build_params(sc.free, sc.pinned);
    sc.t_end = 10.0;
    sc.short_time_split = 0.01 * sc.t_end;
  } else {
    sc = scenario_for_set(set);
  }
  for (const auto& text : overrides) {
    auto [key, value] = parse_assignment(text);
    apply_override(sc, key, value);
  }
  if (!overrides.empty()) sc.name += "_" + override_hash(overrides);
  if (t_end > 0.0) {
    sc.t_end = t_end;
    if (sc.name.rfind("set1", 0) != 0 || t_end != 2000.0) {
      sc.short_time_split = std::min(sc.short_time_split, 0.01 * sc.t_end);
    }
  }
  return sc;
}

void print_summary(const ComparisonResult& r) {
  const auto& tr = r.with_charcoal;
  std::cout << "scenario " << r.scenario_name << ": " << tr.size() << " samples, "
            << tr.accepted_steps << " steps (" << tr.rejected_steps << " rejected)\n";
  if (r.charcoal_half_life) {
    std::cout << "  charcoal half-life: t~ = " << format_double(*r.charcoal_half_life)
              << "\n";
  } else {
    std::cout << "  charcoal half-life: not reached\n";
  }
  const double t_last = tr.times.back();
  std::cout << "  final state: u1 = " << format_double(tr.back()[0])
            << ", u2 = " << format_double(tr.back()[1])
            << ", u3 = " << format_double(tr.back()[2])
            << ", u4 = " << format_double(tr.back()[3]) << " at t~ = "
            << format_double(t_last) << "\n";
  std::cout << "  co2 difference vs baseline at t~ = " << format_double(t_last) << ": "
            << format_double(r.delta_co2.back()) << "\n";
}

std::vector<std::string> split_formats(const std::string& formats) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : formats + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

void write_outputs(const ComparisonResult& r, const Scenario& sc, const fs::path& dir,
                   const std::string& formats, const std::string& stem) {
  fs::create_directories(dir);
  for (const auto& fmt : split_formats(formats)) {
    if (fmt == "csv") {
      const fs::path path = dir / (stem + ".csv");
      export_csv(r, path);
      std::cout << "  wrote " << path.string() << "\n";
    } else if (fmt == "svg") {
      const fs::path path = dir / (stem + ".svg");
      export_svg(r, path, sc.short_time_split);
      std::cout << "  wrote " << path.string() << "\n";
    } else {
      throw std::invalid_argument("unknown format '" + fmt + "' (expected csv,svg)");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Charcoal-in-soil reaction-kinetics simulator"};
  app.require_subcommand(1);

  int set = 1;
  std::string config_path;
  std::vector<std::string> overrides;
  double t_end = -1.0;
  std::string out_flag;
  std::string formats = "csv,svg";
  std::string sweep;

  auto add_common = [&](CLI::App* cmd, bool with_outputs) {
    cmd->add_option("--set", set, "built-in parameter set")->check(CLI::Range(1, 3));
    cmd->add_option("--config", config_path, "parameter config file (key = value)");
    cmd->add_option("--override", overrides, "KEY=VALUE parameter change")
        ->take_all();
    if (with_outputs) {
      cmd->add_option("--t-end", t_end, "dimensionless horizon");
      cmd->add_option("--out", out_flag, "output directory (default $BIOCHAR_OUT or .)");
      cmd->add_option("--format", formats, "comma list of csv,svg");
    }
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a scenario against its baseline");
  add_common(simulate, true);

  CLI::App* equilibria_cmd = app.add_subcommand("equilibria", "report equilibria and stability");
  add_common(equilibria_cmd, false);

  CLI::App* sensitivity = app.add_subcommand("sensitivity", "charcoal-amount or K2 sweep");
  add_common(sensitivity, true);
  sensitivity->add_option("--sweep", sweep, "u3:FACTOR or k2:VALUE")->required();

  CLI::App* mechanism_cmd = app.add_subcommand("mechanism", "mechanism text utilities");
  CLI::App* mech_print = mechanism_cmd->add_subcommand("print", "emit the reaction network");
  mech_print->add_option("--set", set, "built-in parameter set")->check(CLI::Range(1, 3));
  mech_print->add_option("--out", out_flag, "write <setN>.rxn here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      const Scenario sc = build_scenario(set, config_path, overrides, t_end);
      const ComparisonResult r = run_scenario(sc);
      print_summary(r);
      write_outputs(r, sc, default_out_dir(out_flag), formats, sc.name);
    } else if (equilibria_cmd->parsed()) {
      const Scenario sc = build_scenario(set, config_path, overrides, t_end);
      std::cout << report_equilibria(sc);
    } else if (sensitivity->parsed()) {
      const Scenario sc = build_scenario(set, config_path, overrides, t_end);
      auto colon = sweep.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("expected --sweep u3:FACTOR or k2:VALUE");
      }
      const std::string what = sweep.substr(0, colon);
      const double value = std::strtod(sweep.c_str() + colon + 1, nullptr);

      const ComparisonResult base = run_scenario(sc);
      ComparisonResult varied;
      std::string suffix;
      if (what == "u3") {
        varied = sensitivity_u3(sc, value);
        suffix = "_u3x" + format_double(value);
      } else if (what == "k2") {
        varied = sensitivity_k2(sc, value);
        suffix = "_k2_" + format_double(value);
      } else {
        throw std::invalid_argument("unknown sweep '" + what + "' (expected u3 or k2)");
      }
      varied.scenario_name += suffix;

      print_summary(base);
      print_summary(varied);
      if (base.charcoal_half_life && varied.charcoal_half_life) {
        std::cout << "  half-life ratio (varied/base): "
                  << format_double(*varied.charcoal_half_life / *base.charcoal_half_life)
                  << "\n";
      }
      const fs::path dir = default_out_dir(out_flag);
      write_outputs(base, sc, dir, formats, sc.name);
      write_outputs(varied, sc, dir, formats, sc.name + suffix);
    } else if (mechanism_cmd->parsed()) {
      if (!mech_print->parsed()) {
        std::cerr << "mechanism: expected the 'print' subcommand\n";
        return 1;
      }
      const Scenario sc = scenario_for_set(set);
      const std::string text = print_mechanism(model_mechanism(sc.params));
      if (out_flag.empty()) {
        std::cout << text;
      } else {
        fs::create_directories(out_flag);
        const fs::path path = fs::path(out_flag) / (sc.name + ".rxn");
        std::ofstream out(path);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << text;
        std::cout << "wrote " << path.string() << "\n";
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation failed:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const SimulationError& e) {
    std::cerr << "integration failed: " << e.what() << "\n";
    return kExitIntegration;
  } catch (const IoError& e) {
    std::cerr << "i/o failed: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
