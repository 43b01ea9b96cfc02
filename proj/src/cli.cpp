#include "semithermo/cli.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "semithermo/branches.hpp"
#include "semithermo/errors.hpp"
#include "semithermo/io.hpp"
#include "semithermo/measures.hpp"
#include "semithermo/potential.hpp"
#include "semithermo/semigroup.hpp"
#include "semithermo/transfer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace semithermo {
namespace {

json parse_json(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("invalid JSON in " + what);
  return j;
}

const json& subsection(const json& root, const char* key) {
  static const json empty = json::object();
  if (!root.contains(key)) return empty;
  if (!root.at(key).is_object()) {
    throw ConfigError(std::string("field '") + key + "' must be an object");
  }
  return root.at(key);
}

double get_number(const json& j, const char* key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_number()) {
    throw ConfigError(std::string("field '") + key + "' must be a number");
  }
  return j.at(key).get<double>();
}

long long get_int(const json& j, const char* key, long long dflt, long long minimum) {
  if (!j.contains(key)) {
    if (dflt < minimum) throw ConfigError(std::string("field '") + key + "' is required");
    return dflt;
  }
  if (!j.at(key).is_number_integer()) {
    throw ConfigError(std::string("field '") + key + "' must be an integer");
  }
  const long long v = j.at(key).get<long long>();
  if (v < minimum) {
    std::ostringstream msg;
    msg << "field '" << key << "' must be at least " << minimum;
    throw ConfigError(msg.str());
  }
  return v;
}

std::string get_string(const json& j, const char* key, const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j.at(key).is_string()) {
    throw ConfigError(std::string("field '") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

Complex get_point(const json& j, const char* key, Complex dflt, bool required = false) {
  if (!j.contains(key)) {
    if (required) throw ConfigError(std::string("field '") + key + "' is required");
    return dflt;
  }
  const json& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(std::string("field '") + key + "' must be a [re, im] pair");
  }
  return Complex(v[0].get<double>(), v[1].get<double>());
}

struct LoadedConfig {
  json root;
  fs::path base_dir;  // config file's directory, resolves relative refs
  GeneratorSet gens;
  Potential psi;
  std::uint64_t seed = 1;
  fs::path out_dir;
};

// Inline JSON object, or a path (relative to the config file) of a file
// holding one.
std::string source_text(const json& root, const char* key, const fs::path& base_dir) {
  if (!root.contains(key)) throw ConfigError(std::string("field '") + key + "' is required");
  const json& v = root.at(key);
  if (v.is_object()) return v.dump();
  if (v.is_string()) {
    fs::path p(v.get<std::string>());
    if (p.is_relative()) p = base_dir / p;
    return read_text_file(p.string());
  }
  throw ConfigError(std::string("field '") + key + "' must be an object or a file path");
}

LoadedConfig load_config(const std::string& config_path, const std::string& out_override,
                         bool has_seed_override, std::uint64_t seed_override) {
  const std::string text = read_text_file(config_path);
  json root = parse_json(text, config_path);
  if (!root.is_object()) throw ConfigError("config root must be a JSON object: " + config_path);
  const fs::path base_dir = fs::path(config_path).parent_path();

  GeneratorSet gens = GeneratorSet::from_json_string(source_text(root, "semigroup", base_dir));

  Potential psi = Potential::constant(0.0, gens.count());
  if (root.contains("potential")) {
    psi = Potential::from_json_string(source_text(root, "potential", base_dir), gens.count());
  }

  std::uint64_t seed = 1;
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer()) {
      throw ConfigError("field 'seed' must be an integer");
    }
    seed = root.at("seed").get<std::uint64_t>();
  }
  if (has_seed_override) seed = seed_override;

  fs::path out_dir = out_override.empty() ? fs::path(get_string(root, "out", ".")) : fs::path(out_override);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + out_dir.string());

  return LoadedConfig{std::move(root), base_dir, std::move(gens), std::move(psi), seed, out_dir};
}

JuliaCloud sample_cloud(const LoadedConfig& cfg, const json& sub, long long default_points,
                        int default_burn) {
  const auto points = static_cast<std::size_t>(get_int(sub, "cloud_points", default_points, 1));
  const int burn = static_cast<int>(get_int(sub, "burn_in", default_burn, 0));
  const Complex sp = get_point(sub, "seed_point", Complex(0.5, 0.5));
  return julia_backward_sample(cfg.gens, ExtComplex(sp), points, burn, cfg.seed);
}

PressureMode get_mode(const json& sub) {
  const std::string mode = get_string(sub, "mode", "exact");
  if (mode == "exact") return PressureMode::kExact;
  if (mode == "montecarlo") return PressureMode::kMonteCarlo;
  throw ConfigError("field 'mode' must be \"exact\" or \"montecarlo\"");
}

int cmd_julia(const LoadedConfig& cfg, std::ostream& out) {
  const json& sub = subsection(cfg.root, "julia");
  const auto points = static_cast<std::size_t>(get_int(sub, "points", 10000, 1));
  const int burn = static_cast<int>(get_int(sub, "burn_in", 100, 0));
  const Complex sp = get_point(sub, "seed_point", Complex(0.5, 0.5));
  const int size = static_cast<int>(get_int(sub, "image_size", 512, 1));
  double cx = 0.0, cy = 0.0, hw = 2.0;
  if (sub.contains("viewport")) {
    const json& v = sub.at("viewport");
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
      throw ConfigError("field 'viewport' must be [center_re, center_im, half_width]");
    }
    cx = v[0].get<double>();
    cy = v[1].get<double>();
    hw = v[2].get<double>();
  }

  const JuliaCloud cloud = julia_backward_sample(cfg.gens, ExtComplex(sp), points, burn, cfg.seed);

  std::ostringstream csv;
  csv << output_header("julia", cfg.seed) << "re,im\n";
  for (const ExtComplex& p : cloud.points) {
    if (p.is_infinity()) {
      csv << "inf,inf\n";
    } else {
      csv << format_double(p.value().real()) << "," << format_double(p.value().imag()) << "\n";
    }
  }
  const fs::path csv_path = cfg.out_dir / "cloud.csv";
  write_text_file(csv_path.string(), csv.str());
  const fs::path ppm_path = cfg.out_dir / "julia.ppm";
  write_cloud_ppm(ppm_path.string(), cloud, size, cx, cy, hw);
  out << "wrote " << csv_path.string() << " (" << cloud.points.size() << " points) and "
      << ppm_path.string() << "\n";
  return kExitOk;
}

int cmd_pressure(const LoadedConfig& cfg, std::ostream& out) {
  const json& sub = subsection(cfg.root, "pressure");
  const int n_max = static_cast<int>(get_int(sub, "n_max", 12, 1));
  const int points = static_cast<int>(get_int(sub, "points", 5, 1));
  const PressureMode mode = get_mode(sub);
  const auto mc_paths = static_cast<std::size_t>(get_int(sub, "mc_paths", 20000, 2));
  const double budget = get_number(sub, "node_budget", kDefaultNodeBudget);

  const JuliaCloud cloud = sample_cloud(cfg, sub, 2000, 100);
  const GlobalPressure gp = pressure_global(cfg.gens, cfg.psi, cloud, points, n_max, mode, budget,
                                            mc_paths, cfg.seed);

  std::ostringstream csv;
  csv << output_header("pressure", cfg.seed) << "point,n,a_n,b_n\n";
  for (std::size_t i = 0; i < gp.per_point.size(); ++i) {
    const PressureEstimate& pe = gp.per_point[i];
    for (std::size_t k = 0; k < pe.a.size(); ++k) {
      csv << i << "," << (k + 1) << "," << format_double(pe.a[k]) << ","
          << format_double(pe.b[k]) << "\n";
    }
    csv << i << ",-1," << format_double(pe.estimate) << "," << format_double(pe.dispersion)
        << "\n";
  }
  csv << "-1,-1," << format_double(gp.value) << "," << format_double(gp.spread) << "\n";
  const fs::path csv_path = cfg.out_dir / "pressure.csv";
  write_text_file(csv_path.string(), csv.str());
  out << "pressure estimate " << format_double(gp.value) << " spread "
      << format_double(gp.spread) << " max dispersion " << format_double(gp.max_dispersion)
      << "\n";
  return kExitOk;
}

int cmd_spectrum(const LoadedConfig& cfg, std::ostream& out, std::ostream& err) {
  const json& sub = subsection(cfg.root, "spectrum");
  const auto cells = static_cast<std::size_t>(get_int(sub, "grid", 1024, 4));
  const double tol = get_number(sub, "tol", 1e-10);
  const int max_iters = static_cast<int>(get_int(sub, "max_iters", 100000, 1));
  const int jac_samples = static_cast<int>(get_int(sub, "jacobian_samples", 32, 1));
  const auto quanta = static_cast<std::size_t>(get_int(sub, "quanta", 0, 0));

  const JuliaCloud cloud = sample_cloud(cfg, sub, 20000, 100);
  const Grid grid = build_grid(cloud, cells);
  const UlamOperator op = build_ulam(cfg.gens, cfg.psi, grid);
  const EigenTriple triple = leading_triple(op, tol, max_iters, cfg.seed);
  const double jac = jacobian_residual(cfg.gens, cfg.psi, op, triple, jac_samples, cfg.seed);
  const double inv = invariance_residual(op, triple, quanta, cfg.seed);
  const std::vector<double> mu = equilibrium_from(triple);

  std::ostringstream tcsv;
  tcsv << output_header("spectrum", cfg.seed);
  tcsv << "lambda=" << format_double(triple.lambda) << ",leak=" << format_double(op.leak_fraction)
       << "\n";
  tcsv << "cell_index,center_re,center_im,m,h,mu\n";
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    tcsv << i << "," << format_double(grid.center(i).real()) << ","
         << format_double(grid.center(i).imag()) << "," << format_double(triple.m[i]) << ","
         << format_double(triple.h[i]) << "," << format_double(mu[i]) << "\n";
  }
  write_text_file((cfg.out_dir / "triple.csv").string(), tcsv.str());

  std::ostringstream rcsv;
  rcsv << output_header("spectrum", cfg.seed) << "metric,value\n";
  rcsv << "lambda," << format_double(triple.lambda) << "\n";
  rcsv << "log_lambda," << format_double(std::log(triple.lambda)) << "\n";
  rcsv << "leak_fraction," << format_double(op.leak_fraction) << "\n";
  rcsv << "residual_h," << format_double(triple.residual_h) << "\n";
  rcsv << "residual_m," << format_double(triple.residual_m) << "\n";
  rcsv << "iterations," << triple.iterations << "\n";
  rcsv << "jacobian_residual," << format_double(jac) << "\n";
  rcsv << "invariance_residual," << format_double(inv) << "\n";
  write_text_file((cfg.out_dir / "residuals.csv").string(), rcsv.str());

  out << "lambda " << format_double(triple.lambda) << " log " << format_double(std::log(triple.lambda))
      << " leak " << format_double(op.leak_fraction) << " jacobian " << format_double(jac)
      << " invariance " << format_double(inv) << "\n";
  if (triple.residual_h > 10.0 * tol || triple.residual_m > 10.0 * tol) {
    err << "residual error: eigen residuals " << format_double(triple.residual_h) << ", "
        << format_double(triple.residual_m) << " exceed " << format_double(10.0 * tol) << "\n";
    return kExitResidual;
  }
  return kExitOk;
}

const char* verdict_name(Verdict v) {
  return v == Verdict::kHolds ? "holds" : "inconclusive";
}

int cmd_check(const LoadedConfig& cfg, std::ostream& out) {
  const json& sub = subsection(cfg.root, "check");
  const int orbit_length = static_cast<int>(get_int(sub, "orbit_length", 3, 1));
  const double delta = get_number(sub, "delta", 0.0);
  const int n_max = static_cast<int>(get_int(sub, "n_max", 8, 1));
  const PressureMode mode = get_mode(sub);
  const auto mc_paths = static_cast<std::size_t>(get_int(sub, "mc_paths", 20000, 2));
  const double budget = get_number(sub, "node_budget", kDefaultNodeBudget);

  const JuliaCloud cloud = sample_cloud(cfg, sub, 4000, 100);
  const ConditionReport report = check_conditions(cfg.gens, cloud, orbit_length, delta);
  const PressureEstimate pe = pressure_pointwise(cfg.gens, cfg.psi, cloud.points.front(), n_max,
                                                 mode, budget, mc_paths, cfg.seed);
  const GapReport gap = gap_check(cfg.psi, cfg.gens, pe.estimate, cloud);

  std::ostringstream csv;
  csv << output_header("check", cfg.seed) << "metric,value\n";
  csv << "degree_condition," << verdict_name(report.degree_condition) << "\n";
  csv << "critical_values_clear," << verdict_name(report.critical_values_clear) << "\n";
  csv << "no_superattracting_cycles," << verdict_name(report.no_superattracting_cycles) << "\n";
  csv << "delta," << format_double(report.delta) << "\n";
  csv << "min_cv_distance," << format_double(report.min_cv_distance) << "\n";
  csv << "witness," << csv_quote(report.witness) << "\n";
  csv << "pressure," << format_double(gap.pressure) << "\n";
  csv << "sup," << format_double(gap.sup) << "\n";
  csv << "inf," << format_double(gap.inf) << "\n";
  csv << "log_generator_count," << format_double(gap.log_generator_count) << "\n";
  csv << "log_degree_sum," << format_double(gap.log_degree_sum) << "\n";
  csv << "gap," << format_double(gap.gap) << "\n";
  csv << "slack," << format_double(gap.slack) << "\n";
  write_text_file((cfg.out_dir / "check.csv").string(), csv.str());

  out << "conditions " << (report.all_hold() ? "hold" : "inconclusive") << ", gap "
      << format_double(gap.gap) << ", slack " << format_double(gap.slack) << "\n";
  return kExitOk;
}

int cmd_branches(const LoadedConfig& cfg, std::ostream& out) {
  const json& sub = subsection(cfg.root, "branches");
  const Complex z = get_point(sub, "z", Complex(0.0, 0.0), true);
  const double inner_radius = get_number(sub, "R", 0.1);
  const double lambda = get_number(sub, "lambda", 0.5);
  const int q = static_cast<int>(get_int(sub, "q", 1, 1));
  const int n_max = static_cast<int>(get_int(sub, "n_max", 8, 0));
  const int spokes = static_cast<int>(get_int(sub, "spokes", 16, 4));
  const int steps = static_cast<int>(get_int(sub, "steps", 64, 2));
  const auto max_branches = static_cast<std::size_t>(get_int(sub, "max_branches", 4096, 1));

  SymbolStream stream;
  stream.seed = cfg.seed;
  if (sub.contains("pattern")) {
    const json& pat = sub.at("pattern");
    if (!pat.is_array() || pat.empty()) {
      throw ConfigError("field 'pattern' must be a nonempty array of generator indices");
    }
    for (const json& v : pat) {
      if (!v.is_number_integer()) {
        throw ConfigError("field 'pattern' must be a nonempty array of generator indices");
      }
      stream.pattern.push_back(v.get<int>());
    }
  }

  // Families track the doubled ball; diameters are read off the inner one.
  const std::vector<FamilyLevel> levels =
      build_family(cfg.gens, stream, z, 2.0 * inner_radius, lambda, q, n_max, spokes, steps,
                   max_branches);

  std::ostringstream csv;
  csv << output_header("branches", cfg.seed);
  csv << "n,candidates,survivors,pruned_area,pruned_cv,max_diam,distortion_ratio_t50\n";
  for (const FamilyLevel& lvl : levels) {
    csv << lvl.level << "," << lvl.candidates << "," << lvl.survivors << "," << lvl.pruned_area
        << "," << lvl.pruned_cv << "," << format_double(lvl.max_diameter) << ","
        << format_double(lvl.distortion_t50) << "\n";
  }
  write_text_file((cfg.out_dir / "family.csv").string(), csv.str());
  out << "levels " << levels.size() << ", final survivors " << levels.back().survivors << "\n";
  return kExitOk;
}

}  // namespace

int run_command(const std::string& command, const std::string& config_path,
                const std::string& out_override, bool has_seed_override,
                std::uint64_t seed_override, std::ostream& out, std::ostream& err) {
  try {
    const LoadedConfig cfg =
        load_config(config_path, out_override, has_seed_override, seed_override);
    if (command == "julia") return cmd_julia(cfg, out);
    if (command == "pressure") return cmd_pressure(cfg, out);
    if (command == "spectrum") return cmd_spectrum(cfg, out, err);
    if (command == "check") return cmd_check(cfg, out);
    if (command == "branches") return cmd_branches(cfg, out);
    throw ConfigError("unknown command: " + command);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ResidualError& e) {
    err << "residual error: " << e.what() << "\n";
    return kExitResidual;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace semithermo
