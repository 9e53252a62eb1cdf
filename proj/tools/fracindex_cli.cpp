// fracindex: negative definiteness of geodesic distance powers on model
// spaces, fractional index estimation, nonexistence witnesses, and
// fractional Brownian field sampling.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fracindex/configurations.hpp"
#include "fracindex/definiteness.hpp"
#include "fracindex/discrete_geodesics.hpp"
#include "fracindex/index_estimate.hpp"
#include "fracindex/json_io.hpp"
#include "fracindex/rng.hpp"
#include "fracindex/sampler.hpp"
#include "fracindex/spaces.hpp"

namespace {

using fracindex::json;

enum LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("FRACINDEX_LOG");
    if (!env) return kError;
    const std::string v(env);
    if (v == "debug") return kDebug;
    if (v == "info") return kInfo;
    return kError;
  }();
  return level;
}

void log_info(const std::string& msg) {
  if (log_level() >= kInfo) std::cerr << "[info] " << msg << "\n";
}

constexpr int kExitOk = 0;
constexpr int kExitDomainNegative = 2;
constexpr int kExitSearchExhausted = 3;
constexpr int kExitUsage = 64;
constexpr int kExitFailure = 1;

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

fracindex::SpaceDescriptor space_from_config(const json& cfg) {
  json j;
  j["space"] = cfg.at("space").get<std::string>();
  if (cfg.contains("L")) j["L"] = cfg.at("L");
  if (cfg.contains("dim")) j["dim"] = cfg.at("dim");
  if (cfg.contains("radius")) j["radius"] = cfg.at("radius");
  if (cfg.contains("warp_a")) j["warp"] = {{"kind", "quadratic"}, {"a", cfg.at("warp_a")}};
  if (cfg.contains("z0")) j["z0"] = cfg.at("z0");
  return fracindex::space_from_json(j);
}

// Default point sets per space: equispaced on circle factors, a Fibonacci
// lattice on spheres, seeded uniform draws elsewhere.
std::vector<fracindex::PointCoord> default_points(const fracindex::SpaceDescriptor& space, int n,
                                                  std::uint64_t seed) {
  using namespace fracindex;
  std::vector<PointCoord> pts;
  if (std::holds_alternative<Circle>(space)) {
    for (int i = 0; i < n; ++i) pts.push_back(circle_point(kTwoPi * i / n));
  } else if (std::holds_alternative<Cylinder>(space)) {
    for (int i = 0; i < n; ++i) pts.push_back(cylinder_point(kTwoPi * i / n, 0.0));
  } else if (const auto* torus = std::get_if<FlatTorus>(&space)) {
    for (int i = 0; i < n; ++i) {
      std::vector<double> ang(torus->circumferences.size(), 0.0);
      ang[0] = kTwoPi * i / n;
      pts.push_back(torus_point(std::move(ang)));
    }
  } else if (std::holds_alternative<Sphere>(space)) {
    const auto& s = std::get<Sphere>(space);
    if (s.dim != 2) throw Error(Errc::precondition, "default sphere lattice needs dim 2");
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * i + 1.0) / n;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * i;
      pts.push_back(sphere_point({r * std::cos(phi), r * std::sin(phi), z}));
    }
  } else if (const auto* hyp = std::get_if<Hyperbolic>(&space)) {
    const CounterRng rng(seed);
    std::uint64_t c = 0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> x(hyp->dim);
      double n2 = 0.0;
      for (auto& v : x) {
        v = 2.0 * rng.uniform(c++) - 1.0;
        n2 += v * v;
      }
      const double r = 0.8 * std::pow(rng.uniform(c++), 1.0 / hyp->dim);
      const double sc = n2 > 0 ? r / std::sqrt(n2) : 0.0;
      for (auto& v : x) v *= sc;
      pts.push_back(PointCoord{std::move(x)});
    }
  } else if (const auto* euc = std::get_if<Euclidean>(&space)) {
    const CounterRng rng(seed);
    std::uint64_t c = 0;
    for (int i = 0; i < n; ++i) {
      std::vector<double> x(euc->dim);
      for (auto& v : x) v = 3.0 * rng.uniform(c++);
      pts.push_back(PointCoord{std::move(x)});
    }
  } else {
    throw Error(Errc::precondition, "no default point set for this space");
  }
  return pts;
}

struct RunResult {
  int exit_code = kExitOk;
  json report;          // null when the primary output is tabular
  std::string tabular;  // CSV payload when format == csv
  std::string binary;   // FFLD payload when format == ffld
};

fracindex::PointCoord parse_point(const json& cfg, const char* key) {
  return fracindex::PointCoord{parse_csv_doubles(cfg.at(key).get<std::string>())};
}

fracindex::PointCoord default_origin(const fracindex::SpaceDescriptor& space) {
  using namespace fracindex;
  if (std::holds_alternative<Sphere>(space)) {
    std::vector<double> x(coord_size(space), 0.0);
    x.back() = 1.0;  // north pole
    return {std::move(x)};
  }
  return {std::vector<double>(coord_size(space), 0.0)};
}

// --- subcommand bodies ----------------------------------------------------

RunResult run_distance(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  const PointCoord p = parse_point(cfg, "p");
  const PointCoord q = parse_point(cfg, "q");
  const double d = distance(space, p, q);
  RunResult r;
  r.report["distance"] = d;
  if (cfg.contains("H")) {
    const double H = cfg.at("H").get<double>();
    r.report["H"] = H;
    r.report["power_distance"] = power_distance(d, 2.0 * H);
  }
  return r;
}

RunResult run_check_nd(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  const double H = cfg.at("H").get<double>();
  if (!(H > 0.0) || H > 1.0) throw Error(Errc::precondition, "H must lie in (0, 1]");
  const int n = cfg.value("n", 50);
  const auto pts = default_points(space, n, cfg.at("seed").get<std::uint64_t>());
  const auto report = centered_gram(space, pts, H, cfg.value("tol_scale", kDefaultTolScale));
  RunResult r;
  r.report = gram_report_to_json(report);
  if (cfg.contains("dump_distances")) {
    std::ofstream os(cfg.at("dump_distances").get<std::string>());
    if (!os) throw Error(Errc::precondition, "cannot open distance dump path");
    write_distance_csv(os, space, pts, H);
    r.report["dump_distances"] = cfg.at("dump_distances");
  }
  if (cfg.value("format", "json") == "csv") {
    std::ostringstream os;
    write_spectrum_csv(os, report.spectrum);
    r.tabular = os.str();
  }
  return r;
}

RunResult run_covariance(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  const double H = cfg.at("H").get<double>();
  const PointCoord origin =
      cfg.contains("origin") ? parse_point(cfg, "origin") : default_origin(space);
  const int n = cfg.value("n", 10);
  const auto pts = default_points(space, n, cfg.at("seed").get<std::uint64_t>());
  const auto cov = covariance_matrix(space, origin, pts, H);
  RunResult r;
  r.report["min_eigenvalue"] = cov.min_eigenvalue;
  r.report["positive_semidefinite"] = cov.positive_semidefinite;
  r.report["n"] = n;
  if (cfg.value("format", "json") == "csv") {
    std::ostringstream os;
    write_matrix_csv(os, cov.entries);
    r.tabular = os.str();
  } else {
    json rows = json::array();
    for (int i = 0; i < cov.entries.rows(); ++i) {
      json row = json::array();
      for (int j = 0; j < cov.entries.cols(); ++j) row.push_back(cov.entries(i, j));
      rows.push_back(row);
    }
    r.report["matrix"] = rows;
  }
  return r;
}

RunResult run_index(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  IndexSamplerSpec sampler;
  sampler.points_per_set = cfg.value("n", 50);
  sampler.random_sets = cfg.value("sets", 4);
  sampler.seed = cfg.at("seed").get<std::uint64_t>();
  HGrid grid;
  grid.h_min = cfg.value("h_min", 0.3);
  grid.h_max = cfg.value("h_max", 1.0);
  grid.step = cfg.value("step", 0.05);
  const auto bracket = estimate_fractional_index(space, sampler, grid, cfg.value("budget", 32),
                                                 cfg.value("tol_scale", kDefaultTolScale));
  RunResult r;
  r.report = bracket_to_json(bracket);
  return r;
}

RunResult run_critical(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  const auto result = search_critical(space, cfg.value("n", 4), cfg.at("H").get<double>(),
                                      cfg.value("budget", 32), cfg.at("seed").get<std::uint64_t>());
  RunResult r;
  r.report["configuration"] = configuration_to_json(result.config);
  r.report["form"] = result.form;
  r.report["critical"] = result.critical;
  r.report["restarts_used"] = result.restarts_used;
  if (!result.critical) r.exit_code = kExitSearchExhausted;
  return r;
}

RunResult run_condition_g(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  Configuration config;
  if (cfg.contains("config_file")) {
    std::ifstream in(cfg.at("config_file").get<std::string>());
    if (!in) throw Error(Errc::precondition, "cannot open configuration file");
    json j;
    in >> j;
    config = configuration_from_json(j);
  } else {
    config = antipodal_quadruple(space, cfg.value("base", 0.0), cfg.value("offset", kPi / 2));
  }
  const auto report = check_condition_g(space, config);
  RunResult r;
  r.report = condition_g_to_json(report);
  r.report["configuration"] = configuration_to_json(config);
  return r;
}

RunResult run_witness(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  WitnessOptions opts;
  opts.base_angle = cfg.value("base", 0.0);
  opts.offset_a = cfg.value("offset", kPi / 2);
  if (cfg.contains("eps_schedule"))
    opts.perturb.eps_schedule = parse_csv_doubles(cfg.at("eps_schedule").get<std::string>());
  const auto report = witness_pipeline(space, cfg.at("H").get<double>(), opts);
  RunResult r;
  r.report["condition_g"] = condition_g_to_json(report.condition_g);
  switch (report.status) {
    case WitnessStatus::certified:
      r.report["status"] = "certified";
      r.report["certificate"] = certificate_to_json(space, *report.certificate);
      r.report["certificate"]["span_dims"] = report.condition_g.span_dims;
      break;
    case WitnessStatus::g_not_failing:
      r.report["status"] = "g-not-failing";
      r.exit_code = kExitDomainNegative;
      break;
    case WitnessStatus::no_positivity_found:
      r.report["status"] = "no-positivity-found";
      r.exit_code = kExitSearchExhausted;
      break;
  }
  return r;
}

RunResult run_sample(const json& cfg, bool stationary) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  const double H = cfg.at("H").get<double>();
  const int n_samples = cfg.value("n_samples", 1000);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
  SampleOptions opts;
  opts.threads = cfg.value("threads", 1);

  std::vector<PointCoord> pts;
  if (cfg.contains("points_file")) {
    std::ifstream in(cfg.at("points_file").get<std::string>());
    if (!in) throw Error(Errc::precondition, "cannot open points file");
    json j;
    in >> j;
    for (const auto& p : j.at("points")) pts.push_back(point_from_json(p));
  } else {
    pts = default_points(space, cfg.value("n", 8), CounterRng::derive(seed, 0x9e1));
  }

  FieldSample sample;
  if (stationary) {
    sample = sample_stationary(space, pts, H, cfg.value("lambda", 1.0), n_samples, seed, opts);
  } else {
    const PointCoord origin =
        cfg.contains("origin") ? parse_point(cfg, "origin") : default_origin(space);
    pts.insert(pts.begin(), origin);
    sample = sample_fbm(space, origin, pts, H, n_samples, seed, opts);
  }

  RunResult r;
  r.report["clipped_mass"] = sample.clipped_mass;
  r.report["covariance_trace"] = sample.covariance_trace;
  r.report["n_samples"] = n_samples;
  r.report["n_points"] = (int)sample.points.size();
  const std::string format = cfg.value("format", "json");
  if (format == "csv") {
    std::ostringstream os;
    write_realizations_csv(os, sample.realizations);
    r.tabular = os.str();
  } else if (format == "ffld") {
    std::ostringstream os(std::ios::binary);
    write_ffld(os, sample.realizations);
    r.binary = os.str();
  } else {
    json pts_json = json::array();
    for (const auto& p : sample.points) pts_json.push_back(point_to_json(p));
    r.report["points"] = pts_json;
  }
  return r;
}

RunResult run_variogram(const json& cfg) {
  using namespace fracindex;
  const auto space = space_from_config(cfg);
  const double H = cfg.at("H").get<double>();
  const int n_samples = cfg.value("n_samples", 20000);
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  auto pts = default_points(space, cfg.value("n", 8), CounterRng::derive(seed, 0x9e1));
  const PointCoord origin =
      cfg.contains("origin") ? parse_point(cfg, "origin") : default_origin(space);
  const auto sample = sample_fbm(space, origin, pts, H, n_samples, seed);
  const auto entries = variogram_check(sample);

  RunResult r;
  if (cfg.value("format", "json") == "csv") {
    std::ostringstream os;
    write_variogram_csv(os, entries);
    r.tabular = os.str();
  } else {
    r.report["pairs"] = variogram_to_json(entries);
  }
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, std::abs(e.z_score));
  r.report["max_abs_z"] = worst;
  return r;
}

RunResult run_mesh_geodesic(const json& cfg) {
  using namespace fracindex;
  json chart_json;
  chart_json["chart"] = cfg.value("chart", "hyperboloid");
  chart_json["z_min"] = cfg.value("z_min", -1.0);
  chart_json["z_max"] = cfg.value("z_max", 1.0);
  if (chart_json["chart"] == "flat") {
    chart_json["chart"] = "warped";
    chart_json["warp"] = {{"kind", "quadratic"}, {"a", 0.0}};
  } else if (cfg.contains("warp_a")) {
    chart_json["warp"] = {{"kind", "quadratic"}, {"a", cfg.at("warp_a")}};
  }
  const ParametricChart chart = chart_from_json(chart_json);

  const auto from = parse_csv_doubles(cfg.at("from").get<std::string>());
  const auto to = parse_csv_doubles(cfg.at("to").get<std::string>());
  if (from.size() != 2 || to.size() != 2)
    throw Error(Errc::precondition, "--from/--to need theta,z pairs");

  RunResult r;
  r.report["chart"] = chart_to_json(chart);
  if (cfg.contains("refine")) {
    const double d = refine_distance(chart, {from[0], from[1]}, {to[0], to[1]},
                                     cfg.at("refine").get<double>());
    r.report["distance"] = d;
    r.report["refined"] = true;
    return r;
  }

  const auto graph =
      build_graph(chart, cfg.value("n_theta", 128), cfg.value("n_z", 33), cfg.value("stencil", 3));
  const int u = graph.nearest_vertex(from[0], from[1]);
  const int v = graph.nearest_vertex(to[0], to[1]);
  const auto path = graph_distance(graph, u, v);
  r.report["distance"] = path.length;
  json jpath = json::array();
  for (int vertex : path.vertices)
    jpath.push_back({{"theta", graph.theta_of(vertex)}, {"z", graph.z_of(vertex)}});
  r.report["path"] = jpath;
  if (cfg.contains("field_out")) {
    const auto field = graph_distance_field(graph, u);
    std::ofstream os(cfg.at("field_out").get<std::string>());
    write_field_csv(os, graph, field);
    r.report["field_out"] = cfg.at("field_out");
  }
  return r;
}

RunResult dispatch(const json& cfg) {
  const std::string command = cfg.at("command").get<std::string>();
  log_info("running " + command);
  if (command == "distance") return run_distance(cfg);
  if (command == "check-nd") return run_check_nd(cfg);
  if (command == "covariance") return run_covariance(cfg);
  if (command == "index") return run_index(cfg);
  if (command == "critical") return run_critical(cfg);
  if (command == "condition-g") return run_condition_g(cfg);
  if (command == "witness") return run_witness(cfg);
  if (command == "sample") return run_sample(cfg, false);
  if (command == "sample-stationary") return run_sample(cfg, true);
  if (command == "variogram") return run_variogram(cfg);
  if (command == "mesh-geodesic") return run_mesh_geodesic(cfg);
  throw fracindex::Error(fracindex::Errc::precondition, "unknown command: " + command);
}

int execute(const json& cfg) {
  RunResult result;
  try {
    result = dispatch(cfg);
  } catch (const fracindex::Error& e) {
    std::cerr << e.what() << "\n";
    switch (e.code()) {
      case fracindex::Errc::excess_clipping:
        return kExitDomainNegative;
      case fracindex::Errc::no_positivity_found:
      case fracindex::Errc::budget_exhausted:
        return kExitSearchExhausted;
      case fracindex::Errc::eigen_failure:
      case fracindex::Errc::no_convergence:
      case fracindex::Errc::disconnected:
        return kExitFailure;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  const json manifest = cfg;
  if (!result.report.is_null()) result.report["manifest"] = manifest;

  const std::string out = cfg.value("out", "");
  const std::string format = cfg.value("format", "json");
  std::string payload;
  if (!result.binary.empty()) {
    payload = result.binary;
  } else if (format == "csv" && !result.tabular.empty()) {
    payload = result.tabular;
  } else {
    payload = result.report.dump(2);
    payload += '\n';
  }

  if (out.empty()) {
    std::cout << payload;
    if (format != "json" && log_level() >= kInfo)
      std::cerr << "[info] manifest: " << manifest.dump() << "\n";
  } else {
    {
      std::ofstream os(out, std::ios::binary);
      if (!os) {
        std::cerr << "cannot open output file: " << out << "\n";
        return kExitFailure;
      }
      os << payload;
    }
    std::ofstream ms(out + ".manifest.json");
    ms << manifest.dump(2) << '\n';
    log_info("wrote " + out);
  }
  return result.exit_code;
}

void add_space_options(CLI::App* cmd, json& cfg) {
  cmd->add_option_function<std::string>(
         "--space", [&cfg](const std::string& v) { cfg["space"] = v; },
         "circle|sphere|hyperbolic|euclidean|cylinder|flat_torus|warped")
      ->required();
  cmd->add_option_function<std::string>(
      "--L",
      [&cfg](const std::string& v) {
        const auto vals = parse_csv_doubles(v);
        if (vals.size() == 1)
          cfg["L"] = vals[0];
        else
          cfg["L"] = vals;
      },
      "circumference (comma list for flat_torus)");
  cmd->add_option_function<int>(
      "--dim", [&cfg](int v) { cfg["dim"] = v; }, "dimension");
  cmd->add_option_function<double>(
      "--radius", [&cfg](double v) { cfg["radius"] = v; }, "sphere radius");
  cmd->add_option_function<double>(
      "--warp-a", [&cfg](double v) { cfg["warp_a"] = v; },
      "quadratic warp coefficient, f(z) = 1 + a z^2");
}

void add_common_options(CLI::App* cmd, json& cfg) {
  cmd->add_option_function<std::string>(
      "--out", [&cfg](const std::string& v) { cfg["out"] = v; }, "output path (default: stdout)");
  cmd->add_option_function<std::string>(
         "--format", [&cfg](const std::string& v) { cfg["format"] = v; },
         "json|csv (sample also accepts ffld)")
      ->check(CLI::IsMember({"json", "csv", "ffld"}));
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&cfg](std::uint64_t v) { cfg["seed"] = v; },
      "master seed (auto-generated and recorded if absent)");
  cmd->add_option_function<double>(
      "--tol-scale", [&cfg](double v) { cfg["tol_scale"] = v; },
      "spectral tolerance scale (default 1e-9)");
  cmd->add_option_function<int>(
      "--threads", [&cfg](int v) { cfg["threads"] = v; },
      "worker threads (default 1, deterministic)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracindex: fractional index and Brownian field toolkit for model spaces"};
  app.require_subcommand(1);

  json cfg;

  auto* distance_cmd = app.add_subcommand("distance", "geodesic distance between two points");
  add_space_options(distance_cmd, cfg);
  add_common_options(distance_cmd, cfg);
  distance_cmd
      ->add_option_function<std::string>(
          "--p", [&cfg](const std::string& v) { cfg["p"] = v; }, "first point, comma list")
      ->required();
  distance_cmd
      ->add_option_function<std::string>(
          "--q", [&cfg](const std::string& v) { cfg["q"] = v; }, "second point")
      ->required();
  distance_cmd->add_option_function<double>(
      "--H", [&cfg](double v) { cfg["H"] = v; }, "also report d^{2H}");

  auto* check_cmd = app.add_subcommand("check-nd", "centered-Gram negative definiteness test");
  add_space_options(check_cmd, cfg);
  add_common_options(check_cmd, cfg);
  check_cmd->add_option_function<double>("--H", [&cfg](double v) { cfg["H"] = v; }, "Hurst H")
      ->required();
  check_cmd->add_option_function<int>(
      "--n", [&cfg](int v) { cfg["n"] = v; }, "point count");

  auto* cov_cmd = app.add_subcommand("covariance", "pinned fBm covariance matrix");
  add_space_options(cov_cmd, cfg);
  add_common_options(cov_cmd, cfg);
  cov_cmd->add_option_function<double>("--H", [&cfg](double v) { cfg["H"] = v; }, "Hurst H")
      ->required();
  cov_cmd->add_option_function<std::string>(
      "--origin", [&cfg](const std::string& v) { cfg["origin"] = v; }, "origin point");
  cov_cmd->add_option_function<int>(
      "--n", [&cfg](int v) { cfg["n"] = v; }, "point count");

  auto* index_cmd = app.add_subcommand("index", "fractional index bracket over an H grid");
  add_space_options(index_cmd, cfg);
  add_common_options(index_cmd, cfg);
  index_cmd->add_option_function<double>(
      "--h-min", [&cfg](double v) { cfg["h_min"] = v; }, "grid start (default 0.3)");
  index_cmd->add_option_function<double>(
      "--h-max", [&cfg](double v) { cfg["h_max"] = v; }, "grid end (default 1.0)");
  index_cmd->add_option_function<double>(
      "--step", [&cfg](double v) { cfg["step"] = v; }, "grid step (default 0.05)");
  index_cmd->add_option_function<int>(
      "--n", [&cfg](int v) { cfg["n"] = v; }, "points per test set");
  index_cmd->add_option_function<int>(
      "--sets", [&cfg](int v) { cfg["sets"] = v; }, "random sets per H");
  index_cmd->add_option_function<int>(
      "--budget", [&cfg](int v) { cfg["budget"] = v; }, "per-H search budget");

  auto* crit_cmd = app.add_subcommand("critical", "search for a critical configuration");
  add_space_options(crit_cmd, cfg);
  add_common_options(crit_cmd, cfg);
  crit_cmd->add_option_function<double>("--H", [&cfg](double v) { cfg["H"] = v; }, "Hurst H")
      ->required();
  crit_cmd->add_option_function<int>(
      "--n", [&cfg](int v) { cfg["n"] = v; }, "point count");
  crit_cmd->add_option_function<int>(
      "--budget", [&cfg](int v) { cfg["budget"] = v; }, "multistart budget");

  auto* cg_cmd = app.add_subcommand("condition-g", "spanning condition per configuration point");
  add_space_options(cg_cmd, cfg);
  add_common_options(cg_cmd, cfg);
  cg_cmd->add_option_function<std::string>(
      "--config", [&cfg](const std::string& v) { cfg["config_file"] = v; },
      "configuration JSON file {points, coeffs}");
  cg_cmd->add_option_function<double>(
      "--base", [&cfg](double v) { cfg["base"] = v; }, "quadruple base angle");
  cg_cmd->add_option_function<double>(
      "--offset", [&cfg](double v) { cfg["offset"] = v; }, "quadruple offset in (0, pi)");

  auto* wit_cmd = app.add_subcommand("witness", "antipodal quadruple perturbation witness");
  add_space_options(wit_cmd, cfg);
  add_common_options(wit_cmd, cfg);
  wit_cmd->add_option_function<double>("--H", [&cfg](double v) { cfg["H"] = v; }, "must be 0.5")
      ->required();
  wit_cmd->add_option_function<double>(
      "--base", [&cfg](double v) { cfg["base"] = v; }, "quadruple base angle");
  wit_cmd->add_option_function<double>(
      "--offset", [&cfg](double v) { cfg["offset"] = v; }, "quadruple offset in (0, pi)");
  wit_cmd->add_option_function<std::string>(
      "--eps-schedule", [&cfg](const std::string& v) { cfg["eps_schedule"] = v; },
      "comma list of perturbation sizes");

  auto* sample_cmd = app.add_subcommand("sample", "draw pinned fBm realizations");
  add_space_options(sample_cmd, cfg);
  add_common_options(sample_cmd, cfg);
  sample_cmd->add_option_function<double>("--H", [&cfg](double v) { cfg["H"] = v; }, "Hurst H")
      ->required();
  sample_cmd->add_option_function<std::string>(
      "--origin", [&cfg](const std::string& v) { cfg["origin"] = v; }, "pinned origin");
  sample_cmd->add_option_function<int>(
      "--n", [&cfg](int v) { cfg["n"] = v; }, "point count");
  sample_cmd->add_option_function<std::string>(
      "--points-file", [&cfg](const std::string& v) { cfg["points_file"] = v; },
      "JSON {points: [[...]]}");
  sample_cmd->add_option_function<int>(
      "--n-samples", [&cfg](int v) { cfg["n_samples"] = v; }, "realization count");

  auto* stat_cmd = app.add_subcommand("sample-stationary", "draw stationary kernel realizations");
  add_space_options(stat_cmd, cfg);
  add_common_options(stat_cmd, cfg);
  stat_cmd->add_option_function<double>("--H", [&cfg](double v) { cfg["H"] = v; }, "Hurst H")
      ->required();
  stat_cmd->add_option_function<double>(
      "--lambda", [&cfg](double v) { cfg["lambda"] = v; }, "kernel decay rate");
  stat_cmd->add_option_function<int>(
      "--n", [&cfg](int v) { cfg["n"] = v; }, "point count");
  stat_cmd->add_option_function<int>(
      "--n-samples", [&cfg](int v) { cfg["n_samples"] = v; }, "realization count");

  auto* vario_cmd = app.add_subcommand("variogram", "empirical variogram against d^{2H}");
  add_space_options(vario_cmd, cfg);
  add_common_options(vario_cmd, cfg);
  vario_cmd->add_option_function<double>("--H", [&cfg](double v) { cfg["H"] = v; }, "Hurst H")
      ->required();
  vario_cmd->add_option_function<std::string>(
      "--origin", [&cfg](const std::string& v) { cfg["origin"] = v; }, "pinned origin");
  vario_cmd->add_option_function<int>(
      "--n", [&cfg](int v) { cfg["n"] = v; }, "point count");
  vario_cmd->add_option_function<int>(
      "--n-samples", [&cfg](int v) { cfg["n_samples"] = v; }, "realization count");

  auto* mesh_cmd = app.add_subcommand("mesh-geodesic", "shortest paths on a discretized chart");
  add_common_options(mesh_cmd, cfg);
  mesh_cmd->add_option_function<std::string>(
      "--chart", [&cfg](const std::string& v) { cfg["chart"] = v; }, "hyperboloid|warped|flat");
  mesh_cmd->add_option_function<double>(
      "--warp-a", [&cfg](double v) { cfg["warp_a"] = v; }, "quadratic warp coefficient");
  mesh_cmd->add_option_function<double>(
      "--z-min", [&cfg](double v) { cfg["z_min"] = v; }, "lower z bound");
  mesh_cmd->add_option_function<double>(
      "--z-max", [&cfg](double v) { cfg["z_max"] = v; }, "upper z bound");
  mesh_cmd->add_option_function<int>(
      "--n-theta", [&cfg](int v) { cfg["n_theta"] = v; }, "grid size in theta");
  mesh_cmd->add_option_function<int>(
      "--n-z", [&cfg](int v) { cfg["n_z"] = v; }, "grid size in z");
  mesh_cmd->add_option_function<int>(
      "--stencil", [&cfg](int v) { cfg["stencil"] = v; }, "stencil radius 1..3");
  mesh_cmd
      ->add_option_function<std::string>(
          "--from", [&cfg](const std::string& v) { cfg["from"] = v; }, "theta,z")
      ->required();
  mesh_cmd
      ->add_option_function<std::string>(
          "--to", [&cfg](const std::string& v) { cfg["to"] = v; }, "theta,z")
      ->required();
  mesh_cmd->add_option_function<double>(
      "--refine", [&cfg](double v) { cfg["refine"] = v; },
      "refine until this relative tolerance");
  mesh_cmd->add_option_function<std::string>(
      "--field-out", [&cfg](const std::string& v) { cfg["field_out"] = v; },
      "CSV of (theta, z, distance-from-source)");

  auto* rerun_cmd = app.add_subcommand("rerun", "replay a recorded manifest");
  std::string manifest_path;
  rerun_cmd->add_option("manifest", manifest_path, "manifest JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (rerun_cmd->parsed()) {
    std::ifstream in(manifest_path);
    if (!in) {
      std::cerr << "cannot open manifest: " << manifest_path << "\n";
      return kExitUsage;
    }
    json manifest;
    try {
      in >> manifest;
    } catch (const std::exception& e) {
      std::cerr << "bad manifest: " << e.what() << "\n";
      return kExitUsage;
    }
    return execute(manifest);
  }

  cfg["command"] = app.get_subcommands().front()->get_name();
  if (!cfg.contains("seed")) {
    std::random_device rd;
    cfg["seed"] = ((std::uint64_t)rd() << 32) ^ rd();
    log_info("auto-generated seed " + std::to_string(cfg["seed"].get<std::uint64_t>()));
  }
  return execute(cfg);
}
