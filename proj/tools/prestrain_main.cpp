// Command-line front end: classify, q2, bend, scale, nematic. Reads a JSON
// config (inline flags override individual fields), writes CSV tables plus a
// JSON run report, and prints the report to stdout. Exit codes: 0 success,
// 2 configuration/validation error, 3 numerical failure.

#include "prestrain/density3d.hpp"
#include "prestrain/diffgeo.hpp"
#include "prestrain/io.hpp"
#include "prestrain/minimize.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

namespace prestrain {
namespace {

int effective_threads(const Json& cfg, int flag_threads, const std::string& context) {
  int cfg_threads = int_or(cfg, "threads", 0, context);
  return resolve_thread_count(flag_threads > 0 ? flag_threads : cfg_threads);
}

Grid2 config_grid(const Json& cfg, const Rect& box, int default_n, const std::string& context) {
  Json spec = cfg.value("grid", Json::object());
  require_keys(spec, context, {"nx", "ny"});
  Grid2 grid;
  grid.box = box;
  grid.nx = int_or(spec, "nx", default_n, context);
  grid.ny = int_or(spec, "ny", default_n, context);
  grid.validate();
  return grid;
}

Immersion seed_immersion(const std::string& name, const Grid2& grid) {
  if (name == "flat") return make_immersion(grid, flat_immersion_point);
  if (name == "cylinder") return make_immersion(grid, cylinder_immersion_point);
  if (name == "paraboloid") return make_immersion(grid, paraboloid_immersion_point);
  throw ValidationError("unknown seed immersion \"" + name + "\" (flat, cylinder, paraboloid)");
}

struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;  // name -> body
  Json results;
};

Outputs run_classify(const Json& cfg, int flag_threads) {
  require_keys(cfg, "classify config", {"metric", "grid", "threads"});
  if (!cfg.contains("metric")) throw ValidationError("classify config: missing metric");
  MetricField M = metric_from_json(cfg.at("metric"));
  Grid2 grid = config_grid(cfg, M.domain, 65, "classify.grid");
  int threads = effective_threads(cfg, flag_threads, "classify config");

  CurvatureReport rep = curvature_report(M, grid, threads);
  ClassifyResult cls = classify(rep, M);

  CsvWriter csv({"x1", "x2", "R3_112", "R3_221", "R_1212", "S", "kappa"});
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      int idx = grid.index(i, j);
      Point2 p = grid.node(i, j);
      csv.add_row({p[0], p[1], rep.triple[idx].r3_112, rep.triple[idx].r3_221,
                   rep.triple[idx].r_1212, rep.scalar[idx], rep.kappa2d[idx]});
    }

  Outputs out;
  out.files.emplace_back("classify_nodes.csv", csv.str());
  out.results = Json{{"metric", M.label},
                     {"grid", Json{{"nx", grid.nx}, {"ny", grid.ny}}},
                     {"verdict", to_string(cls.verdict)},
                     {"riemann_sup", cls.riemann_sup},
                     {"triple_sup", cls.triple_sup},
                     {"scalar_sup", rep.scalar_sup},
                     {"kappa2d_sup", rep.kappa_sup},
                     {"thresholds", Json{{"riemann", cls.threshold}, {"triple", cls.triple_threshold}}}};
  return out;
}

Outputs run_q2(const Json& cfg) {
  require_keys(cfg, "q2 config", {"metric", "moduli", "point", "F"});
  if (!cfg.contains("metric")) throw ValidationError("q2 config: missing metric");
  MetricField M = metric_from_json(cfg.at("metric"));
  IsotropicModuli m = moduli_from_json(cfg.value("moduli", Json::object()), "q2.moduli");

  Point2 p(0.5 * (M.domain.x1_min + M.domain.x1_max), 0.5 * (M.domain.x2_min + M.domain.x2_max));
  if (cfg.contains("point")) {
    const Json& pt = cfg.at("point");
    if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
      throw ValidationError("q2 config: point must be [x1, x2]");
    p = Point2(pt[0].get<double>(), pt[1].get<double>());
  }
  Mat2 F = Mat2::Identity();
  if (cfg.contains("F")) {
    const Json& f = cfg.at("F");
    if (!f.is_array() || f.size() != 4)
      throw ValidationError("q2 config: F must be [f11, f12, f21, f22]");
    for (int k = 0; k < 4; ++k) {
      if (!f[k].is_number()) throw ValidationError("q2 config: F entries must be numbers");
      F(k / 2, k % 2) = f[k].get<double>();
    }
  }

  Mat3 G = M.at(p);
  IsoQ2Routes routes = q2_isotropic_routes(m, G, F);
  EffectiveDensityContext ctx =
      EffectiveDensityContext::from_metric(QuadraticForm3::isotropic(m), G);
  double oracle = q2_general(ctx, F);
  double value = q2_isotropic_closed(m, G, F);  // throws if the routes drift apart

  Outputs out;
  out.results = Json{{"metric", M.label},
                     {"point", Json::array({p[0], p[1]})},
                     {"prestrain_route", routes.prestrain},
                     {"invariant_route", routes.invariant},
                     {"sqrt_minor_route", routes.sqrt_minor},
                     {"general_reduction", oracle},
                     {"value", value}};
  return out;
}

Outputs run_bend(const Json& cfg, int flag_threads) {
  require_keys(cfg, "bend config",
               {"metric", "grid", "moduli", "seed_immersion", "noise", "seed", "eps_schedule",
                "max_iterations", "threads"});
  if (!cfg.contains("metric")) throw ValidationError("bend config: missing metric");
  MetricField M = metric_from_json(cfg.at("metric"));
  Grid2 grid = config_grid(cfg, M.domain, 33, "bend.grid");
  IsotropicModuli m = moduli_from_json(cfg.value("moduli", Json::object()), "bend.moduli");

  Immersion seed = seed_immersion(cfg.value("seed_immersion", std::string("flat")), grid);
  double noise = number_or(cfg, "noise", 0.0, "bend config");
  if (noise < 0.0) throw ValidationError("bend config: noise amplitude must be nonnegative");
  unsigned rng_seed = static_cast<unsigned>(int_or(cfg, "seed", 7, "bend config"));
  if (noise > 0.0) seed = add_noise(std::move(seed), noise, rng_seed);

  MinimizeBendingOptions opts;
  opts.threads = effective_threads(cfg, flag_threads, "bend config");
  opts.lbfgs.max_iterations = int_or(cfg, "max_iterations", opts.lbfgs.max_iterations,
                                     "bend config");
  if (cfg.contains("eps_schedule")) {
    const Json& sched = cfg.at("eps_schedule");
    if (!sched.is_array() || sched.empty())
      throw ValidationError("bend config: eps_schedule must be a nonempty array");
    opts.eps_schedule.clear();
    for (const Json& e : sched) {
      if (!e.is_number() || !(e.get<double>() > 0.0))
        throw ValidationError("bend config: eps_schedule entries must be positive numbers");
      opts.eps_schedule.push_back(e.get<double>());
    }
  }

  BendingResult res = minimize_bending(M, QuadraticForm3::isotropic(m), std::move(seed), opts);

  CsvWriter csv({"x1", "x2", "y1", "y2", "y3"});
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      Point2 p = grid.node(i, j);
      const Vec3& y = res.immersion.y[grid.index(i, j)];
      csv.add_row({p[0], p[1], y[0], y[1], y[2]});
    }

  Outputs out;
  out.files.emplace_back("bend_immersion.csv", csv.str());
  out.results = Json{{"metric", M.label},
                     {"grid", Json{{"nx", grid.nx}, {"ny", grid.ny}}},
                     {"energy", res.energy},
                     {"isometry_residual", res.isometry_residual},
                     {"objective", res.objective},
                     {"iterations", res.iterations},
                     {"converged", res.converged},
                     {"monotone", res.monotone},
                     {"degenerate_nodes", res.degenerate_nodes}};
  return out;
}

Outputs run_scale(const Json& cfg, int flag_threads) {
  require_keys(cfg, "scale config",
               {"metric", "ansatz", "density", "moduli", "h", "quadrature", "grid", "immersion",
                "threads"});
  if (!cfg.contains("metric")) throw ValidationError("scale config: missing metric");
  MetricConfig mc = metric_config_from_json(cfg.at("metric"));
  MetricField M = mc.build();
  IsotropicModuli m = moduli_from_json(cfg.value("moduli", Json::object()), "scale.moduli");

  std::string ansatz = cfg.value("ansatz", std::string());
  if (ansatz.empty())
    throw ValidationError("scale config: choose an ansatz (parabolic, conformal, kirchhoff)");

  std::string density_name = cfg.value("density", std::string("green-quadratic"));
  DensityW W;
  W.m = m;
  if (density_name == "green-quadratic")
    W.kind = DensityKind::GreenQuadratic;
  else if (density_name == "dist-sq-so3")
    W.kind = DensityKind::DistSqSo3;
  else
    throw ValidationError("scale config: unknown density \"" + density_name + "\"");

  std::vector<double> hs;
  if (cfg.contains("h")) {
    const Json& hlist = cfg.at("h");
    if (!hlist.is_array() || hlist.size() < 2)
      throw ValidationError("scale config: h must list at least two thicknesses");
    for (const Json& e : hlist) {
      if (!e.is_number() || !(e.get<double>() > 0.0))
        throw ValidationError("scale config: thickness entries must be positive");
      hs.push_back(e.get<double>());
    }
  } else {
    for (int k = 3; k <= 8; ++k) hs.push_back(std::pow(2.0, -k));
  }

  QuadratureSpec quad;
  Json qspec = cfg.value("quadrature", Json::object());
  require_keys(qspec, "scale.quadrature", {"cells1", "cells2", "q_plane", "q_thick"});
  quad.cells1 = int_or(qspec, "cells1", quad.cells1, "scale.quadrature");
  quad.cells2 = int_or(qspec, "cells2", quad.cells2, "scale.quadrature");
  quad.q_plane = int_or(qspec, "q_plane", quad.q_plane, "scale.quadrature");
  quad.q_thick = int_or(qspec, "q_thick", quad.q_thick, "scale.quadrature");

  Deformation3 def;
  if (ansatz == "parabolic") {
    if (mc.family != MetricConfig::Family::BlockDiag)
      throw ValidationError("parabolic ansatz needs the block-diag metric family");
    def = recovery_parabolic(mc.block_diag);
  } else if (ansatz == "conformal") {
    if (mc.family != MetricConfig::Family::Conformal)
      throw ValidationError("conformal ansatz needs the conformal metric family");
    def = recovery_conformal(mc.conformal);
  } else if (ansatz == "kirchhoff") {
    Grid2 grid = config_grid(cfg, mc.domain(), 65, "scale.grid");
    Immersion im = seed_immersion(cfg.value("immersion", std::string("flat")), grid);
    def = recovery_kirchhoff(M, QuadraticForm3::isotropic(m), im);
  } else {
    throw ValidationError("scale config: unknown ansatz \"" + ansatz + "\"");
  }

  int threads = effective_threads(cfg, flag_threads, "scale config");
  std::vector<double> energies;
  energies.reserve(hs.size());
  for (double h : hs) energies.push_back(energy_3d(W, M, def, h, quad, threads));
  ScalingFit fit = fit_scaling(hs, energies);

  CsvWriter csv({"h", "E_h", "E_h_over_h2", "E_h_over_h4"});
  for (size_t k = 0; k < hs.size(); ++k) {
    double h = hs[k], E = energies[k];
    csv.add_row({h, E, E / (h * h), E / (h * h * h * h)});
  }

  Outputs out;
  out.files.emplace_back("scale_sweep.csv", csv.str());
  out.results = Json{{"metric", M.label},
                     {"ansatz", ansatz},
                     {"density", density_name},
                     {"h", hs},
                     {"energy", energies},
                     {"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"max_log_residual", fit.max_log_residual},
                     {"samples_used", fit.samples_used},
                     {"all_below_floor", fit.all_below_floor}};
  return out;
}

Outputs run_nematic(const Json& cfg) {
  require_keys(cfg, "nematic config", {"director", "grid", "threads"});
  DirectorField dir = director_from_json(cfg.value("director", Json::object()),
                                         "nematic.director");
  Grid2 grid = config_grid(cfg, dir.domain, 33, "nematic.grid");

  NematicClassification cls = nematic_classify(dir, grid);

  MetricField M = nematic_metric(dir);
  SymField2 minor_field = nematic_minor_field(dir);
  CsvWriter csv({"x1", "x2", "curlcurl", "kappa", "R3_112", "R3_221", "R_1212"});
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j) {
      Point2 p = grid.node(i, j);
      CurvatureTriple triple = curvature_triple(M, p);
      csv.add_row({p[0], p[1], curl_t_curl(minor_field, p), nematic_kappa_unscaled(dir, p),
                   triple.r3_112, triple.r3_221, triple.r_1212});
    }

  Outputs out;
  out.files.emplace_back("nematic_nodes.csv", csv.str());
  out.results = Json{{"pattern", dir.label},
                     {"r", dir.r},
                     {"delta", dir.delta},
                     {"grid", Json{{"nx", grid.nx}, {"ny", grid.ny}}},
                     {"verdict", cls.immersible ? "immersible" : "non-immersible"},
                     {"immersible", cls.immersible},
                     {"conditions_consistent", cls.conditions_consistent},
                     {"riemann_sup", cls.riemann_sup},
                     {"kappa_sup", cls.kappa_sup},
                     {"curlcurl_sup", cls.curlcurl_sup},
                     {"triple_sup", cls.triple_sup},
                     {"threshold", cls.threshold},
                     {"subunit_r", cls.subunit_r}};
  return out;
}

// Merge `value` into config at a dotted path like "director.r".
void set_path(Json& cfg, const std::string& path, const Json& value) {
  Json* node = &cfg;
  size_t start = 0;
  while (true) {
    size_t dot = path.find('.', start);
    std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = Json::object();
    node = &(*node)[key];
    start = dot + 1;
  }
}

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  std::string catalog;
  int nx = 0, ny = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_grid) {
  cmd->add_option("--config", flags.config_path, "JSON config file");
  cmd->add_option("--out-dir", flags.out_dir, "Output directory (created if missing)");
  cmd->add_option("--threads", flags.threads, "Worker thread count (overrides config)");
  cmd->add_option("--catalog", flags.catalog, "Catalog metric family with default parameters");
  if (with_grid) {
    cmd->add_option("--nx", flags.nx, "Grid nodes along x1");
    cmd->add_option("--ny", flags.ny, "Grid nodes along x2");
  }
}

Json load_config(const CommonFlags& flags) {
  Json cfg = Json::object();
  if (!flags.config_path.empty()) {
    cfg = read_json_file(flags.config_path);
    require_object(cfg, flags.config_path);
  }
  if (!flags.catalog.empty()) set_path(cfg, "metric", Json{{"catalog", flags.catalog}});
  if (flags.nx > 0) set_path(cfg, "grid.nx", flags.nx);
  if (flags.ny > 0) set_path(cfg, "grid.ny", flags.ny);
  return cfg;
}

int run(int argc, char** argv) {
  CLI::App app{"Prestrained-plate toolkit: curvature classification, effective quadratic forms, "
               "bending minimization, thin-body energy scaling, nematic director analysis"};
  app.require_subcommand(1);

  CommonFlags classify_flags;
  CLI::App* classify_cmd =
      app.add_subcommand("classify", "Curvature obstructions and kinematic class of a metric");
  add_common(classify_cmd, classify_flags, true);

  CommonFlags q2_flags;
  std::vector<double> q2_point, q2_f;
  double q2_mu = 0.0, q2_lambda = -1.0;
  CLI::App* q2_cmd =
      app.add_subcommand("q2", "Effective quadratic form at a point, all routes plus oracle");
  add_common(q2_cmd, q2_flags, false);
  q2_cmd->add_option("--point", q2_point, "Evaluation point x1 x2")->expected(2);
  q2_cmd->add_option("--f", q2_f, "Input matrix entries f11 f12 f21 f22")->expected(4);
  q2_cmd->add_option("--mu", q2_mu, "Shear modulus");
  q2_cmd->add_option("--lambda", q2_lambda, "First Lame modulus");

  CommonFlags bend_flags;
  double bend_noise = -1.0;
  int bend_seed = -1;
  std::string bend_start;
  CLI::App* bend_cmd =
      app.add_subcommand("bend", "Minimize the bending energy over penalized immersions");
  add_common(bend_cmd, bend_flags, true);
  bend_cmd->add_option("--seed-immersion", bend_start, "Starting surface: flat, cylinder, paraboloid");
  bend_cmd->add_option("--noise", bend_noise, "Uniform nodal noise amplitude on the seed");
  bend_cmd->add_option("--seed", bend_seed, "RNG seed for the noise");

  CommonFlags scale_flags;
  std::string scale_ansatz, scale_density;
  std::vector<double> scale_h;
  CLI::App* scale_cmd =
      app.add_subcommand("scale", "Thin-body energy of a recovery family across thicknesses");
  add_common(scale_cmd, scale_flags, true);
  scale_cmd->add_option("--ansatz", scale_ansatz, "Recovery family: parabolic, conformal, kirchhoff");
  scale_cmd->add_option("--density", scale_density, "Density: green-quadratic, dist-sq-so3");
  scale_cmd->add_option("--thickness", scale_h, "Thickness list");

  CommonFlags nem_flags;
  std::string nem_pattern;
  double nem_psi = 0.0, nem_r = 0.0, nem_nu = -10.0;
  CLI::App* nem_cmd =
      app.add_subcommand("nematic", "Flatness diagnostics of a director-induced metric");
  add_common(nem_cmd, nem_flags, true);
  nem_cmd->add_option("--pattern", nem_pattern, "Director pattern: radial, azimuthal, spiral, custom");
  nem_cmd->add_option("--psi", nem_psi, "Spiral offset angle");
  nem_cmd->add_option("--r", nem_r, "Order parameter r");
  nem_cmd->add_option("--nu", nem_nu, "Poisson ratio for the exponent delta");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string subcommand;
  CommonFlags* flags = nullptr;
  if (app.got_subcommand(classify_cmd)) {
    subcommand = "classify";
    flags = &classify_flags;
  } else if (app.got_subcommand(q2_cmd)) {
    subcommand = "q2";
    flags = &q2_flags;
  } else if (app.got_subcommand(bend_cmd)) {
    subcommand = "bend";
    flags = &bend_flags;
  } else if (app.got_subcommand(scale_cmd)) {
    subcommand = "scale";
    flags = &scale_flags;
  } else {
    subcommand = "nematic";
    flags = &nem_flags;
  }

  Json cfg = load_config(*flags);
  if (subcommand == "q2") {
    if (!q2_point.empty()) set_path(cfg, "point", q2_point);
    if (!q2_f.empty()) set_path(cfg, "F", q2_f);
    if (q2_mu > 0.0) set_path(cfg, "moduli.mu", q2_mu);
    if (q2_lambda >= 0.0) set_path(cfg, "moduli.lambda", q2_lambda);
  } else if (subcommand == "bend") {
    if (!bend_start.empty()) set_path(cfg, "seed_immersion", bend_start);
    if (bend_noise >= 0.0) set_path(cfg, "noise", bend_noise);
    if (bend_seed >= 0) set_path(cfg, "seed", bend_seed);
  } else if (subcommand == "scale") {
    if (!scale_ansatz.empty()) set_path(cfg, "ansatz", scale_ansatz);
    if (!scale_density.empty()) set_path(cfg, "density", scale_density);
    if (!scale_h.empty()) set_path(cfg, "h", scale_h);
  } else if (subcommand == "nematic") {
    if (!nem_pattern.empty()) set_path(cfg, "director.pattern", nem_pattern);
    if (nem_cmd->count("--psi") > 0) set_path(cfg, "director.psi", nem_psi);
    if (nem_r > 0.0) set_path(cfg, "director.r", nem_r);
    if (nem_nu > -10.0) set_path(cfg, "director.nu", nem_nu);
  }

  auto t0 = std::chrono::steady_clock::now();
  Outputs outputs;
  if (subcommand == "classify")
    outputs = run_classify(cfg, flags->threads);
  else if (subcommand == "q2")
    outputs = run_q2(cfg);
  else if (subcommand == "bend")
    outputs = run_bend(cfg, flags->threads);
  else if (subcommand == "scale")
    outputs = run_scale(cfg, flags->threads);
  else
    outputs = run_nematic(cfg);
  auto t1 = std::chrono::steady_clock::now();

  RunReport report;
  report.subcommand = subcommand;
  report.config_hash = fnv1a_hex(cfg.dump());
  report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  report.results = outputs.results;
  Json report_json = report.to_json();
  validate_report_json(report_json);

  std::filesystem::path dir(flags->out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create output directory " + flags->out_dir);
  for (const auto& [name, body] : outputs.files)
    write_text_file((dir / name).string(), body);
  write_text_file((dir / (subcommand + "_report.json")).string(), report_json.dump(2) + "\n");

  std::cout << report_json.dump(2) << std::endl;
  return 0;
}

}  // namespace
}  // namespace prestrain

int main(int argc, char** argv) {
  try {
    return prestrain::run(argc, argv);
  } catch (const prestrain::ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const prestrain::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << std::endl;
    return 3;
  }
}
