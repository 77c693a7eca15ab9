#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdlab/bracket.hpp"
#include "mdlab/config.hpp"
#include "mdlab/errors.hpp"
#include "mdlab/family.hpp"
#include "mdlab/io.hpp"
#include "mdlab/schur.hpp"

using namespace mdlab;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kResource = 3;
constexpr int kNonConverged = 4;

struct Common {
  std::string group_file;
  std::string out_dir;
  std::string config_file;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<long long> d;
};

Config load_config(const Common& c) {
  Config cfg;
  if (!c.config_file.empty()) cfg.apply_json(json::parse(read_file(c.config_file)));
  cfg.apply_env();
  if (c.tol) {
    if (!(*c.tol > 0.0)) throw ValidationError("--tol must be positive");
    cfg.tol = *c.tol;
  }
  if (c.seed) cfg.seed = *c.seed;
  if (c.d) {
    if (*c.d < 1) throw ValidationError("d must be at least 1");
    cfg.d = static_cast<std::size_t>(*c.d);
  }
  return cfg;
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

GroupPtr load_group(const Common& c, const Config& cfg) {
  if (c.group_file.empty()) throw ValidationError("--group FILE is required");
  return group_from_json(parse_json_file(c.group_file), cfg.limits());
}

std::size_t nonnegative(long long v, const char* what) {
  if (v < 0) throw ValidationError(std::string(what) + " must be nonnegative");
  return static_cast<std::size_t>(v);
}

// Writes DIR/name atomically when --out is set, stdout otherwise.
void emit(const Common& c, const std::string& name, const std::string& content) {
  if (c.out_dir.empty()) {
    std::cout << content;
    return;
  }
  const std::string path = c.out_dir + "/" + name;
  atomic_write(path, content);
  std::cout << path << "\n";
}

std::string command_header(const std::string& cmd, const Config& cfg) {
  return "# mdlab " + cmd + "\n" + cfg.header();
}

int run_ball(const Common& c, long long radius) {
  const Config cfg = load_config(c);
  const std::size_t r = nonnegative(radius, "radius");
  const GroupPtr g = load_group(c, cfg);
  const Ball b = g->ball(r);
  emit(c, "ball.csv", command_header("ball", cfg) + "# group = " + g->name() + "\n# R = " + std::to_string(r) + "\n" +
                          ball_csv(b));
  return kOk;
}

int run_schur(const Common& c, const std::string& matrix_file) {
  const Config cfg = load_config(c);
  const Eigen::MatrixXcd a = read_matrix(matrix_file);
  SchurOptions o;
  o.tol = cfg.tol;
  o.seed = cfg.seed;
  o.max_iterations = static_cast<int>(cfg.schur_max_iterations);
  const SchurSolution s = schur_norm(a, o);
  char value[64];
  std::snprintf(value, sizeof value, "%.6f", s.value);
  std::cout << value << "\n";
  if (!c.out_dir.empty()) {
    std::string summary = command_header("schur", cfg) + "value,lower,upper,iterations,converged,witness_residual\n";
    summary += format_number(s.value) + "," + format_number(s.lower) + "," + format_number(s.upper) + "," +
               std::to_string(s.iterations) + "," + (s.converged ? "true" : "false") + "," +
               format_number(s.witness_residual) + "\n";
    emit(c, "schur.csv", summary);
    emit(c, "witness_x.csv", matrix_csv(s.witness.x));
    emit(c, "witness_y.csv", matrix_csv(s.witness.y));
  }
  return s.converged ? kOk : kNonConverged;
}

int run_bracket(const Common& c, const std::string& multiplier_file, const std::vector<std::size_t>& ds,
                std::optional<long long> radius) {
  Config cfg = load_config(c);
  if (radius) cfg.radius = nonnegative(*radius, "radius");
  const GroupPtr g = load_group(c, cfg);
  const Multiplier phi = multiplier_from_json(parse_json_file(multiplier_file), g);
  std::vector<std::size_t> degrees = ds.empty() ? std::vector<std::size_t>{cfg.d} : ds;
  std::vector<NormBracket> rows;
  bool converged = true;
  for (std::size_t d : degrees) {
    if (d < 1) throw ValidationError("d must be at least 1");
    rows.push_back(bracket(phi, d, cfg.bracket_options()));
    if (rows.back().has_flag("NONCONVERGED")) converged = false;
  }
  emit(c, "bracket.csv", command_header("bracket", cfg) + "# group = " + g->name() + "\n" + bracket_csv(rows));
  return converged ? kOk : kNonConverged;
}

bool any_nonconverged(const ConvergenceReport& rep) {
  for (const auto& r : rep.rows) {
    if (r.bracket.has_flag("NONCONVERGED")) return true;
  }
  return false;
}

int run_fejer(const Common& c, const std::vector<std::size_t>& Ns, const std::vector<double>& rs,
              std::optional<long long> radius, std::optional<long long> window, bool empirical, double C) {
  Config cfg = load_config(c);
  if (radius) cfg.radius = nonnegative(*radius, "radius");
  if (window) cfg.window_radius = nonnegative(*window, "window");
  FejerJob job;
  job.group = load_group(c, cfg);
  job.Ns = Ns;
  job.rs = rs;
  job.d = cfg.d;
  job.bracket = cfg.bracket_options();
  job.window_radius = cfg.window_radius;
  job.empirical = empirical;
  job.family_radius = cfg.family_radius;
  job.C = C;
  const ConvergenceReport rep = run_fejer(job);
  emit(c, "convergence.csv",
       command_header("fejer", cfg) + "# group = " + job.group->name() + "\n" + convergence_header(rep) +
           convergence_csv(rep));
  return any_nonconverged(rep) ? kNonConverged : kOk;
}

int run_extension_cmd(const Common& c, const std::vector<std::size_t>& ks, long long window,
                      std::optional<long long> radius) {
  Config cfg = load_config(c);
  if (radius) cfg.radius = nonnegative(*radius, "radius");
  const GroupPtr g = c.group_file.empty() ? make_sl2z_semidirect(cfg.limits()) : load_group(c, cfg);
  if (g->kind() != GroupKind::SL2ZSemidirect || g->quotient() == nullptr) {
    throw ValidationError("extension needs SL(2,Z) x| Z^2 with its quotient structure, got " + g->name());
  }
  ExtensionJob job;
  job.ks = ks;
  job.window_radius = nonnegative(window, "R");
  job.d = cfg.d;
  job.bracket = cfg.bracket_options();
  const ConvergenceReport rep = run_extension(g, job);
  emit(c, "convergence.csv",
       command_header("extension", cfg) + "# group = " + g->name() + "\n# window_R = " +
           std::to_string(job.window_radius) + "\n" + convergence_header(rep) + convergence_csv(rep));
  return any_nonconverged(rep) ? kNonConverged : kOk;
}

cd parse_z(const std::string& s) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) return {std::stod(s), 0.0};
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("bad z value '" + s + "', expected re or re:im");
  }
}

int run_report(const Common& c, const std::vector<std::string>& zs, const std::string& element) {
  const Config cfg = load_config(c);
  std::vector<cd> grid;
  if (zs.empty()) {
    for (double m : {0.3, 0.6, 0.9}) {
      for (cd u : {cd(1.0, 0.0), std::polar(1.0, std::acos(-1.0) / 4.0), cd(0.0, 1.0)}) grid.push_back(m * u);
    }
  } else {
    for (const auto& s : zs) grid.push_back(parse_z(s));
  }
  const std::size_t R = cfg.family_radius;
  if (R < 3) throw ValidationError("family_radius must be at least 3");
  const GroupPtr g = make_free_group(cfg.family_rank, cfg.limits());
  Element t;
  if (element.empty()) {
    const Ball b = g->ball(R - 2);
    t = b.elements.back();
  } else {
    t = g->parse(element);
  }
  json out = json::array();
  for (cd z : grid) {
    FamilyPoint fp = tree_family_point(z, R, cfg.family_rank);
    FamilyRecord rec;
    rec.z = z;
    rec.radius = R;
    rec.unitarity_residual = fp.unitarity_residual;
    rec.coefficient_residual = fp.coefficient_residual;
    rec.cr_residual = holomorphy_check(t, z, cfg.cr_step, R, cfg.family_rank).residual;
    rec.empirical_bound = empirical_bound(fp);
    out.push_back(family_json(rec));
  }
  json doc;
  doc["config"] = json::object();
  for (const auto& [k, v] : cfg.entries()) doc["config"][k] = v;
  doc["cr_element"] = g->to_string(t);
  doc["points"] = std::move(out);
  emit(c, "family.json", doc.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified brackets for Herz-Schur multiplier norms"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--group", common.group_file, "group JSON file");
  app.add_option("--out", common.out_dir, "output directory (stdout when absent)");
  app.add_option("--config", common.config_file, "JSON file overriding defaults");
  app.add_option("--tol", common.tol, "solver and bracket tolerance");
  app.add_option("--seed", common.seed, "seed for sampling and the solver");

  long long ball_radius = 0;
  auto* ball = app.add_subcommand("ball", "enumerate a ball");
  ball->add_option("-R,--radius", ball_radius, "radius")->required();

  std::string matrix_file;
  auto* schur = app.add_subcommand("schur", "Schur multiplier norm of a matrix");
  schur->add_option("--matrix", matrix_file, "CSV or SCHR1 binary matrix")->required();

  std::string multiplier_file;
  std::vector<std::size_t> ds;
  std::optional<long long> radius;
  auto* br = app.add_subcommand("bracket", "norm bracket of a multiplier");
  br->add_option("--multiplier", multiplier_file, "multiplier JSON")->required();
  br->add_option("-d", ds, "degrees")->delimiter(',');
  br->add_option("-R,--radius", radius, "ball radius");

  std::vector<std::size_t> Ns;
  std::vector<double> rs;
  std::optional<long long> fejer_radius, window;
  bool empirical = false;
  double C = 1.0;
  auto* fe = app.add_subcommand("fejer", "Fejer-averaged radial multipliers");
  fe->add_option("--N", Ns, "kernel degrees")->delimiter(',')->required();
  fe->add_option("--r", rs, "radii (zipped with --N, or one value)")->delimiter(',')->required();
  fe->add_option("-R,--radius", fejer_radius, "bracket radius");
  fe->add_option("--window", window, "pointwise residual window radius");
  fe->add_option("--C", C, "uniform bound checked by the report");
  fe->add_flag("--empirical", empirical, "add the tree-family empirical upper (free groups)");

  std::vector<std::size_t> ks;
  long long ext_window = 3;
  std::optional<long long> ext_radius;
  auto* ex = app.add_subcommand("extension", "amenable extension pipeline on SL(2,Z) x| Z^2");
  ex->add_option("--k", ks, "Folner indices")->delimiter(',')->required();
  ex->add_option("-R,--window", ext_window, "pointwise residual window radius");
  ex->add_option("--radius", ext_radius, "bracket radius");

  std::vector<std::string> zs;
  std::string element;
  auto* rep = app.add_subcommand("report", "tree family contract report");
  rep->add_option("--z", zs, "points re or re:im")->delimiter(',');
  rep->add_option("--element", element, "element for the holomorphy residual");

  fe->add_option("-d", common.d, "degree");
  ex->add_option("-d", common.d, "degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*ball) return run_ball(common, ball_radius);
    if (*schur) return run_schur(common, matrix_file);
    if (*br) return run_bracket(common, multiplier_file, ds, radius);
    if (*fe) return run_fejer(common, Ns, rs, fejer_radius, window, empirical, C);
    if (*ex) return run_extension_cmd(common, ks, ext_window, ext_radius);
    if (*rep) return run_report(common, zs, element);
  } catch (const ResourceError& e) {
    std::cerr << "mdlab: resource cap: " << e.what() << "\n";
    return kResource;
  } catch (const OverflowError& e) {
    std::cerr << "mdlab: overflow: " << e.what() << "\n";
    return kResource;
  } catch (const ValidationError& e) {
    std::cerr << "mdlab: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const EvaluationError& e) {
    std::cerr << "mdlab: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "mdlab: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "mdlab: " << e.what() << "\n";
    return 1;
  }
  return kValidation;
}
