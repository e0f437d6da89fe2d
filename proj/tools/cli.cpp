#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "trl/analytic.hpp"
#include "trl/errors.hpp"
#include "trl/fea_io.hpp"
#include "trl/geometry.hpp"
#include "trl/grasp.hpp"
#include "trl/material.hpp"
#include "trl/mesh_io.hpp"
#include "trl/report.hpp"
#include "trl/stl.hpp"
#include "trl/sweep.hpp"
#include "trl/units.hpp"

namespace fs = std::filesystem;

namespace trl::cli {

namespace {

constexpr const char* kOutputDirEnv = "TRLKIT_OUTPUT_DIR";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InvalidInput("not a number: '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw InvalidInput("not a number: '" + text + "'");
  return v;
}

// ------------------------------------------------------------------ config

template <typename T>
void take(const nlohmann::json& j, const char* key, std::optional<T>& dst) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(fmt::format("config key '{}' has the wrong type", key));
  }
}

void take_grid(const nlohmann::json& j, const char* key, std::optional<std::vector<double>>& dst) {
  if (!j.contains(key)) return;
  const auto& v = j.at(key);
  if (v.is_string()) {
    dst = parse_range(v.get<std::string>());
  } else if (v.is_number()) {
    dst = std::vector<double>{v.get<double>()};
  } else if (v.is_array()) {
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw InvalidInput(fmt::format("config key '{}' must hold numbers", key));
      out.push_back(e.get<double>());
    }
    dst = out;
  } else {
    throw InvalidInput(fmt::format("config key '{}' must be a number, list or range string", key));
  }
}

// ----------------------------------------------------------------- helpers

struct Context {
  std::ostream& out;
  std::ostream& err;
};

material::Material resolve_material(const RunConfig& c) {
  material::Material m = material::builtin(c.material.value_or("PA6"));
  if (c.youngs_modulus_mpa) m.youngs_modulus = units::mpa_to_pa(*c.youngs_modulus_mpa);
  if (c.poisson_ratio) m.poisson_ratio = *c.poisson_ratio;
  material::validate(m);
  return m;
}

fs::path resolve_output_dir(const RunConfig& c) {
  fs::path dir = ".";
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) dir = env;
  if (c.output_dir) dir = *c.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
  return dir;
}

bool wants(const RunConfig& c, const std::string& format) {
  if (!c.formats) return true;
  return std::find(c.formats->begin(), c.formats->end(), format) != c.formats->end();
}

void check_formats(const RunConfig& c) {
  if (!c.formats) return;
  static const std::set<std::string> known{"csv", "json", "svg", "vtk"};
  for (const auto& f : *c.formats) {
    if (!known.count(f)) throw InvalidInput("unknown output format '" + f + "'");
  }
}

fea::ConvergeOptions converge_options(const RunConfig& c, fea::ConvergeOptions base) {
  if (c.tolerance) base.tolerance = *c.tolerance;
  if (c.initial_edge_mm) {
    if (!(*c.initial_edge_mm > 0.0)) throw InvalidInput("initial edge must be > 0");
    base.initial_edge_mm = *c.initial_edge_mm;
  }
  if (c.dof_budget) {
    if (!(*c.dof_budget >= 1.0)) throw InvalidInput("dof budget must be >= 1");
    base.dof_budget = static_cast<std::size_t>(*c.dof_budget);
  }
  if (!(base.tolerance > 0.0 && base.tolerance <= 0.1)) {
    throw InvalidInput("tolerance must lie in (0, 0.1]");
  }
  return base;
}

int jobs(const RunConfig& c) {
  if (!c.jobs) return 0;
  if (*c.jobs < 0 || std::abs(*c.jobs - std::round(*c.jobs)) > 0) {
    throw InvalidInput("jobs must be a non-negative integer");
  }
  return static_cast<int>(*c.jobs);
}

geometry::TrlSpec trl_spec(const RunConfig& c) {
  geometry::TrlSpec s;
  if (c.length_mm) s.length_mm = *c.length_mm;
  if (c.width_mm) s.width_mm = *c.width_mm;
  s.fin_height_mm = c.fin_height_mm;
  if (c.panel_thickness_mm) s.panel_thickness_mm = *c.panel_thickness_mm;
  s.flange_thickness_mm = c.flange_thickness_mm;
  s.apex_ridge_mm = c.apex_ridge_mm;
  return s;
}

geometry::SllSpec sll_spec(const RunConfig& c) {
  geometry::SllSpec s;
  if (c.length_mm) s.length_mm = *c.length_mm;
  if (c.width_mm) s.width_mm = *c.width_mm;
  return s;
}

std::string param_tag(double v) { return fmt::format("{:g}", v); }

void write_fields(const sweep::SweepPlan& plan, const sweep::SweepTable& table, const fs::path& dir,
                  const std::string& stem) {
  for (const auto& row : table.rows) {
    if (row.status == sweep::RowStatus::Failed) continue;
    geometry::MeshableSpec spec;
    if (plan.family == sweep::Family::Sll) {
      auto s = plan.sll_base;
      s.thickness_mm = row.param;
      spec = s;
    } else {
      auto s = plan.trl_base;
      s.triangle_count = static_cast<int>(std::lround(row.param));
      spec = s;
    }
    auto mesh = std::make_shared<const geometry::TriMesh>(geometry::build_mesh(spec, row.final_edge_mm));
    const auto system = fea::assemble(mesh, plan.material);
    const auto results = fea::solve(system, std::vector<fea::LoadCase>{
                                                fea::LoadCase::tip_force(plan.force_n),
                                                fea::LoadCase::torsion(plan.moment_nmm)});
    const char* names[] = {"bending", "torsion"};
    for (int k = 0; k < 2; ++k) {
      std::ostringstream os;
      fea::write_vtk(os, results[k], fmt::format("{} {} {}", stem, param_tag(row.param), names[k]));
      report::write_text(dir / fmt::format("{}_{}_{}.vtk", stem, param_tag(row.param), names[k]),
                         os.str());
    }
  }
}

void emit_sweep(const Context& ctx, const RunConfig& cfg, const sweep::SweepPlan& plan,
                const sweep::SweepTable& table, const fs::path& dir, const std::string& stem,
                nlohmann::json extra) {
  if (wants(cfg, "csv")) report::write_text(dir / (stem + ".csv"), report::sweep_csv(table));
  if (wants(cfg, "json")) {
    auto j = report::sweep_json(table);
    for (auto& [k, v] : extra.items()) j[k] = v;
    report::write_text(dir / (stem + ".json"), j.dump(2) + "\n");
  }
  if (wants(cfg, "svg")) {
    report::write_text(dir / (stem + "_in_plane.svg"), report::sweep_svg(table, sweep::Metric::InPlane));
    report::write_text(dir / (stem + "_angular.svg"), report::sweep_svg(table, sweep::Metric::Angular));
  }
  if (cfg.formats && wants(cfg, "vtk")) write_fields(plan, table, dir, stem);
  report::write_text(dir / (stem + ".meta.json"), report::timing_json(table).dump(2) + "\n");
  fmt::print(ctx.out, "wrote {} outputs to {}\n", stem, dir.string());
}

// ---------------------------------------------------------------- commands

int cmd_sll_analyze(const Context& ctx, const RunConfig& cfg) {
  check_formats(cfg);
  auto plan = sweep::default_sll_plan();
  plan.material = resolve_material(cfg);
  plan.sll_base = sll_spec(cfg);
  if (cfg.thickness_mm) plan.grid = *cfg.thickness_mm;
  if (cfg.force_n) plan.force_n = *cfg.force_n;
  if (cfg.moment_nmm) plan.moment_nmm = *cfg.moment_nmm;
  if (plan.force_n < 0.0 || plan.moment_nmm < 0.0) throw InvalidInput("loads must be >= 0");
  plan.converge = converge_options(cfg, plan.converge);
  plan.parallelism = jobs(cfg);
  sweep::validate(plan);
  for (double t : plan.grid) {
    analytic::validate(analytic::RectSection{plan.sll_base.width_mm, t});
  }
  const fs::path dir = resolve_output_dir(cfg);

  const auto table = sweep::run_sweep(plan);
  const double shear = material::shear_modulus(plan.material);
  const double length = plan.sll_base.length_mm;
  auto dev = [](double fea, double ref) {
    if (ref == 0.0) return fea == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    return (fea - ref) / ref * 100.0;
  };
  std::string csv =
      "thickness_mm,analytic_in_plane_mm,fea_in_plane_mm,in_plane_dev_pct,analytic_angular_deg,"
      "fea_angular_deg,angular_dev_pct,kappa_Nmm_per_rad,status\n";
  nlohmann::json analytic_rows = nlohmann::json::array();
  fmt::print(ctx.out, "{:>8} {:>12} {:>12} {:>8} {:>12} {:>12} {:>8}  {}\n", "t [mm]",
             "EB [mm]", "FEA [mm]", "dev %", "SV [deg]", "FEA [deg]", "dev %", "status");
  bool failed = false;
  for (const auto& row : table.rows) {
    const analytic::RectSection sec{plan.sll_base.width_mm, row.param};
    const double d_an = analytic::cantilever_tip_deflection(sec, length, plan.material.youngs_modulus,
                                                            plan.force_n);
    const double a_an = analytic::rect_torsion_angle(sec, length, shear, plan.moment_nmm);
    const double d_dev = dev(row.in_plane_mm, d_an), a_dev = dev(row.angular_deg, a_an);
    failed = failed || row.status == sweep::RowStatus::Failed;
    csv += fmt::format("{:g},{:.6g},{:.6g},{:.4g},{:.6g},{:.6g},{:.4g},{:.6g},{}\n", row.param, d_an,
                       row.in_plane_mm, d_dev, a_an, row.angular_deg, a_dev, row.kappa_nmm_per_rad,
                       sweep::to_string(row.status));
    analytic_rows.push_back({{"thickness_mm", row.param},
                             {"analytic_in_plane_mm", d_an},
                             {"analytic_angular_deg", a_an},
                             {"in_plane_dev_pct", std::isfinite(d_dev) ? nlohmann::json(d_dev) : nlohmann::json()},
                             {"angular_dev_pct", std::isfinite(a_dev) ? nlohmann::json(a_dev) : nlohmann::json()}});
    fmt::print(ctx.out, "{:>8g} {:>12.5g} {:>12.5g} {:>8.2f} {:>12.5g} {:>12.5g} {:>8.2f}  {}\n",
               row.param, d_an, row.in_plane_mm, d_dev, a_an, row.angular_deg, a_dev,
               sweep::to_string(row.status));
  }
  if (wants(cfg, "csv")) report::write_text(dir / "sll_analysis.csv", csv);
  emit_sweep(ctx, cfg, plan, table, dir, "sll_sweep", {{"analytic", analytic_rows}});
  return failed ? kSolverError : kOk;
}

int cmd_trl_sweep(const Context& ctx, const RunConfig& cfg, double threshold) {
  check_formats(cfg);
  auto plan = sweep::default_trl_plan();
  plan.material = resolve_material(cfg);
  plan.trl_base = trl_spec(cfg);
  if (cfg.triangles) plan.grid = *cfg.triangles;
  if (cfg.force_n) plan.force_n = *cfg.force_n;
  if (cfg.moment_nmm) plan.moment_nmm = *cfg.moment_nmm;
  if (plan.force_n < 0.0 || plan.moment_nmm < 0.0) throw InvalidInput("loads must be >= 0");
  plan.converge = converge_options(cfg, plan.converge);
  plan.parallelism = jobs(cfg);
  sweep::validate(plan);
  for (double n : plan.grid) {
    if (n < 2 || n > 30) {
      ctx.err << nlohmann::json{{"warning", fmt::format("triangle count {:g} is outside 2..30", n)}}.dump()
              << "\n";
    }
  }
  const fs::path dir = resolve_output_dir(cfg);
  const auto table = sweep::run_sweep(plan);

  nlohmann::json summary;
  for (auto metric : {sweep::Metric::InPlane, sweep::Metric::Angular}) {
    try {
      const auto shape = sweep::swoosh_check(table, metric);
      summary["shape"][sweep::to_string(metric)] = {
          {"swoosh", shape.swoosh()},
          {"left_end_is_local_max", shape.left_end_is_local_max},
          {"right_end_is_local_max", shape.right_end_is_local_max},
          {"interior_min_param", shape.interior_min_param ? nlohmann::json(*shape.interior_min_param) : nlohmann::json()},
          {"argmax_param", shape.argmax_param}};
      fmt::print(ctx.out, "{}\n", shape.summary());
    } catch (const InvalidInput& e) {
      summary["shape"][sweep::to_string(metric)] = {{"declined", e.what()}};
      fmt::print(ctx.out, "shape check declined: {}\n", e.what());
    }
  }
  for (auto obj : {sweep::Objective::MaxInPlane, sweep::Objective::MaxTorsionResistance,
                   sweep::Objective::CyclicLife}) {
    try {
      const auto sel = sweep::select_design(table, obj, threshold);
      summary["selection"][sweep::to_string(obj)] = {{"triangles", sel.param}, {"rationale", sel.rationale}};
      fmt::print(ctx.out, "{}: {:g} triangles ({})\n", sweep::to_string(obj), sel.param, sel.rationale);
    } catch (const InvalidInput& e) {
      summary["selection"][sweep::to_string(obj)] = {{"declined", e.what()}};
    }
  }
  summary["cyclic_life_threshold"] = threshold;

  fmt::print(ctx.out, "{:>4} {:>12} {:>12} {:>14} {:>8} {:>8}  {}\n", "T_n", "in-plane[mm]",
             "angle[deg]", "kappa[Nmm/rad]", "SCF", "dof", "status");
  bool failed = false;
  for (const auto& r : table.rows) {
    failed = failed || r.status == sweep::RowStatus::Failed;
    fmt::print(ctx.out, "{:>4g} {:>12.5g} {:>12.5g} {:>14.5g} {:>8.3g} {:>8}  {}\n", r.param,
               r.in_plane_mm, r.angular_deg, r.kappa_nmm_per_rad, r.scf, r.dof,
               sweep::to_string(r.status));
  }
  emit_sweep(ctx, cfg, plan, table, dir, "trl_sweep", {});
  if (wants(cfg, "json")) report::write_text(dir / "trl_summary.json", summary.dump(2) + "\n");
  return failed ? kSolverError : kOk;
}

int cmd_grasp_predict(const Context& ctx, const RunConfig& cfg, bool as_json) {
  grasp::GraspScenario s;
  std::optional<double> kappa = cfg.kappa_nmm_per_rad, r = cfg.contact_radius_mm,
                        mu = cfg.friction, fn = cfg.normal_force_n, x = cfg.allowed_sag_mm;
  if (cfg.preset) {
    const auto& presets = grasp_presets();
    const auto it = presets.find(*cfg.preset);
    if (it == presets.end()) throw InvalidInput("unknown preset '" + *cfg.preset + "'");
    kappa = kappa.value_or(it->second.kappa_nmm_per_rad);
    r = r.value_or(it->second.contact_radius_mm);
    mu = mu.value_or(it->second.friction);
    fn = fn.value_or(it->second.normal_force_n);
  }
  std::vector<std::string> missing;
  if (!fn) missing.push_back("normal_force_n (--normal-force)");
  if (!mu) missing.push_back("friction (--friction)");
  if (!r) missing.push_back("contact_radius_mm (--r)");
  if (!kappa) missing.push_back("kappa_nmm_per_rad (--kappa)");
  if (!x) missing.push_back("allowed_sag_mm (--x)");
  const bool scenario_complete = missing.empty();
  const bool scenario_started = fn || mu || r || kappa || x || cfg.preset;

  nlohmann::json j;
  if (scenario_started || !cfg.mass_g) {
    if (!scenario_complete) {
      std::string list;
      for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw InvalidInput("grasp scenario is missing: " + list);
    }
    s.normal_force_n = *fn;
    s.friction = *mu;
    s.contact_radius_mm = *r;
    s.torsional_stiffness_nmm = *kappa;
    s.allowed_sag_mm = *x;
    if (cfg.shear_stress_kpa) s.shear_stress_pa = units::kpa_to_pa(*cfg.shear_stress_kpa);
    if (cfg.shear_fracture_kpa) s.shear_fracture_pa = units::kpa_to_pa(*cfg.shear_fracture_kpa);
    const auto rep = grasp::payload_capacity(s);
    j["scenario"] = {{"normal_force_n", s.normal_force_n},
                     {"friction", s.friction},
                     {"contact_radius_mm", s.contact_radius_mm},
                     {"kappa_nmm_per_rad", s.torsional_stiffness_nmm},
                     {"allowed_sag_mm", s.allowed_sag_mm}};
    j["payload"] = {{"slip_limit_n", rep.slip_limit_n},
                    {"twist_limit_n", rep.twist_limit_n},
                    {"shear_ok", rep.shear_ok},
                    {"capacity_n", rep.capacity_n},
                    {"capacity_g", units::newtons_to_grams(rep.capacity_n)},
                    {"governing_mode", grasp::to_string(rep.governing_mode)},
                    {"effective_stiffness_n_per_m", rep.effective_stiffness_n_per_m}};
    if (!as_json) {
      fmt::print(ctx.out,
                 "slip limit {:.4g} N, twist limit {:.4g} N (effective stiffness {:.4g} N/m), shear {}\n",
                 rep.slip_limit_n, rep.twist_limit_n, rep.effective_stiffness_n_per_m,
                 rep.shear_ok ? "ok" : "FAILS");
      fmt::print(ctx.out, "capacity {:.4g} N ({:.4g} g at g0 = {} m/s^2), governed by {}\n",
                 rep.capacity_n, units::newtons_to_grams(rep.capacity_n), units::kStandardGravity,
                 grasp::to_string(rep.governing_mode));
    }
  }
  if (cfg.mass_g) {
    if (!cfg.gripper) throw InvalidInput("grasp scenario is missing: gripper (--gripper)");
    const auto gripper = grasp::parse_gripper(*cfg.gripper);
    const auto f = grasp::feasibility(*cfg.mass_g, gripper,
                                      scenario_complete ? std::optional(s) : std::nullopt);
    j["feasibility"] = {{"mass_g", *cfg.mass_g},
                        {"gripper", grasp::to_string(gripper)},
                        {"weight_n", f.weight_n},
                        {"capacity_n", f.capacity_n},
                        {"feasible", f.feasible},
                        {"margin_g", f.margin_g},
                        {"note", "masses converted to newtons with g0 = 9.81 m/s^2"}};
    if (!as_json) {
      fmt::print(ctx.out, "{} g on the {} gripper: {} (weight {:.4g} N vs capacity {:.4g} N, margin {:.4g} g)\n",
                 *cfg.mass_g, grasp::to_string(gripper), f.feasible ? "Feasible" : "Infeasible",
                 f.weight_n, f.capacity_n, f.margin_g);
    }
  }
  if (as_json) ctx.out << j.dump(2) << "\n";
  if (cfg.output_dir) report::write_text(resolve_output_dir(cfg) / "grasp_report.json", j.dump(2) + "\n");
  return kOk;
}

geometry::TriMesh build_from(const RunConfig& cfg, const std::string& family, double edge) {
  if (family == "sll") {
    auto s = sll_spec(cfg);
    if (cfg.thickness_mm) {
      if (cfg.thickness_mm->size() != 1) throw InvalidInput("give a single thickness");
      s.thickness_mm = cfg.thickness_mm->front();
    }
    return geometry::build_sll_mesh(s, edge);
  }
  if (family != "trl") throw InvalidInput("family must be trl or sll");
  auto s = trl_spec(cfg);
  if (cfg.triangles) {
    if (cfg.triangles->size() != 1) throw InvalidInput("give a single triangle count");
    const double n = cfg.triangles->front();
    if (std::abs(n - std::round(n)) > 0) throw InvalidInput("triangle count must be an integer");
    s.triangle_count = static_cast<int>(n);
  }
  return geometry::build_trl_mesh(s, edge);
}

int cmd_mesh_export(const Context& ctx, const RunConfig& cfg, const std::string& family, double edge,
                    std::optional<double> extrude, const std::string& out_path,
                    const std::string& json_path) {
  const auto mesh = build_from(cfg, family, edge);
  double thick = mesh.thickness.empty() ? 1.0 : mesh.thickness.front();
  const auto bytes = geometry::export_stl(mesh, extrude.value_or(thick));
  fs::path path = out_path;
  if (path.empty()) {
    path = resolve_output_dir(cfg) /
           (family == "trl" ? fmt::format("trl{}.stl", cfg.triangles ? cfg.triangles->front() : 30.0)
                            : std::string("sll.stl"));
  }
  geometry::write_file(path, bytes);
  if (!json_path.empty()) report::write_text(json_path, geometry::mesh_to_json(mesh).dump() + "\n");
  fmt::print(ctx.out, "wrote {}\nfacets {}\nbytes {}\nenclosed volume {:.6g} mm^3\n", path.string(),
             geometry::stl_facet_count(bytes), bytes.size(), geometry::stl_signed_volume(bytes));
  return kOk;
}

int cmd_validate(const Context& ctx, const RunConfig& cfg, const std::string& family, double edge,
                 const std::string& mesh_path) {
  geometry::TriMesh mesh;
  if (!mesh_path.empty()) {
    std::ifstream f(mesh_path);
    if (!f) throw IoError("cannot read '" + mesh_path + "'");
    nlohmann::json j;
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(std::string("mesh file is not valid JSON: ") + e.what());
    }
    mesh = geometry::mesh_from_json(j);
  } else {
    mesh = build_from(cfg, family, edge);
  }
  const auto defects = geometry::validate_mesh(mesh);
  fmt::print(ctx.out, "{} nodes, {} elements, {} defects\n", mesh.nodes.size(), mesh.elements.size(),
             defects.size());
  for (const auto& d : defects) fmt::print(ctx.out, "  {}\n", d.message);
  return defects.empty() ? kOk : kConfigError;
}

void error_json(std::ostream& err, int code, const char* kind, const std::string& message) {
  err << nlohmann::json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump()
      << "\n";
}

// Registers a numeric flag whose value lands in `dst` only when given.
CLI::Option* num_flag(CLI::App* app, const std::string& name, std::optional<double>& dst,
                      const std::string& help) {
  return app->add_option_function<std::string>(
                name, [&dst](const std::string& v) { dst = parse_number(v); }, help)
      ->type_name("NUM");
}

CLI::Option* grid_flag(CLI::App* app, const std::string& name,
                       std::optional<std::vector<double>>& dst, const std::string& help) {
  return app->add_option_function<std::string>(
                name, [&dst](const std::string& v) { dst = parse_range(v); }, help)
      ->type_name("RANGE");
}

void overlay(RunConfig& base, const RunConfig& top) {
  auto over = [](auto& b, const auto& t) {
    if (t) b = t;
  };
  over(base.material, top.material);
  over(base.youngs_modulus_mpa, top.youngs_modulus_mpa);
  over(base.poisson_ratio, top.poisson_ratio);
  over(base.length_mm, top.length_mm);
  over(base.width_mm, top.width_mm);
  over(base.thickness_mm, top.thickness_mm);
  over(base.triangles, top.triangles);
  over(base.fin_height_mm, top.fin_height_mm);
  over(base.panel_thickness_mm, top.panel_thickness_mm);
  over(base.flange_thickness_mm, top.flange_thickness_mm);
  over(base.apex_ridge_mm, top.apex_ridge_mm);
  over(base.force_n, top.force_n);
  over(base.moment_nmm, top.moment_nmm);
  over(base.tolerance, top.tolerance);
  over(base.initial_edge_mm, top.initial_edge_mm);
  over(base.dof_budget, top.dof_budget);
  over(base.jobs, top.jobs);
  over(base.output_dir, top.output_dir);
  over(base.formats, top.formats);
  over(base.preset, top.preset);
  over(base.normal_force_n, top.normal_force_n);
  over(base.friction, top.friction);
  over(base.contact_radius_mm, top.contact_radius_mm);
  over(base.kappa_nmm_per_rad, top.kappa_nmm_per_rad);
  over(base.allowed_sag_mm, top.allowed_sag_mm);
  over(base.shear_stress_kpa, top.shear_stress_kpa);
  over(base.shear_fracture_kpa, top.shear_fracture_kpa);
  over(base.mass_g, top.mass_g);
  over(base.gripper, top.gripper);
}

}  // namespace

std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (part.empty()) throw InvalidInput("empty item in list '" + text + "'");
    std::vector<std::string> fields;
    std::stringstream ps(part);
    std::string f;
    while (std::getline(ps, f, ':')) fields.push_back(f);
    if (fields.size() == 1) {
      out.push_back(parse_number(fields[0]));
      continue;
    }
    if (fields.size() > 3) throw InvalidInput("range '" + part + "' has too many fields");
    const double start = parse_number(fields[0]);
    const double stop = parse_number(fields[1]);
    const double step = fields.size() == 3 ? parse_number(fields[2]) : 1.0;
    if (!(step > 0.0)) throw InvalidInput("range step must be > 0 in '" + part + "'");
    if (stop < start) throw InvalidInput("range stop is below start in '" + part + "'");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    if (count > 100000) throw InvalidInput("range '" + part + "' is too long");
    for (long i = 0; i <= count; ++i) {
      // Round away accumulated binary noise so 0.3:1.0:0.1 yields 0.7, not 0.7000000000000001.
      const double v = start + static_cast<double>(i) * step;
      out.push_back(std::round(v * 1e9) / 1e9);
    }
  }
  if (out.empty()) throw InvalidInput("empty list");
  return out;
}

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("config must be a JSON object");
  static const std::set<std::string> known{
      "material", "youngs_modulus_mpa", "poisson_ratio", "length_mm", "width_mm", "thickness_mm",
      "triangles", "fin_height_mm", "panel_thickness_mm", "flange_thickness_mm", "apex_ridge_mm",
      "force_n", "moment_nmm", "tolerance", "initial_edge_mm", "dof_budget", "jobs", "output_dir",
      "formats", "preset", "normal_force_n", "friction", "contact_radius_mm", "kappa_nmm_per_rad",
      "allowed_sag_mm", "shear_stress_kpa", "shear_fracture_kpa", "mass_g", "gripper"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidInput("unknown config key '" + key + "'");
  }
  RunConfig c;
  take(j, "material", c.material);
  take(j, "youngs_modulus_mpa", c.youngs_modulus_mpa);
  take(j, "poisson_ratio", c.poisson_ratio);
  take(j, "length_mm", c.length_mm);
  take(j, "width_mm", c.width_mm);
  take_grid(j, "thickness_mm", c.thickness_mm);
  take_grid(j, "triangles", c.triangles);
  take(j, "fin_height_mm", c.fin_height_mm);
  take(j, "panel_thickness_mm", c.panel_thickness_mm);
  take(j, "flange_thickness_mm", c.flange_thickness_mm);
  take(j, "apex_ridge_mm", c.apex_ridge_mm);
  take(j, "force_n", c.force_n);
  take(j, "moment_nmm", c.moment_nmm);
  take(j, "tolerance", c.tolerance);
  take(j, "initial_edge_mm", c.initial_edge_mm);
  take(j, "dof_budget", c.dof_budget);
  take(j, "jobs", c.jobs);
  take(j, "output_dir", c.output_dir);
  take(j, "formats", c.formats);
  take(j, "preset", c.preset);
  take(j, "normal_force_n", c.normal_force_n);
  take(j, "friction", c.friction);
  take(j, "contact_radius_mm", c.contact_radius_mm);
  take(j, "kappa_nmm_per_rad", c.kappa_nmm_per_rad);
  take(j, "allowed_sag_mm", c.allowed_sag_mm);
  take(j, "shear_stress_kpa", c.shear_stress_kpa);
  take(j, "shear_fracture_kpa", c.shear_fracture_kpa);
  take(j, "mass_g", c.mass_g);
  take(j, "gripper", c.gripper);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read config file '" + path + "'");
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("config file is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

const std::map<std::string, GraspPreset>& grasp_presets() {
  // kappa of the 30-triangle layer and the radius that reproduces the
  // measured 1181 N/m grip stiffness; 3 N peak normal force; silicone mu = 1.
  static const GraspPreset trl{265.5, 15.0, 1.0, 3.0,
                               "TRL gripper: kappa 265.5 N*mm/rad, r 15 mm, mu 1, F_n 3 N"};
  // Benchmark strip: kappa 1.9 N*mm/rad with the radius fitted to 152 N/m.
  static const GraspPreset bench{1.9, 3.54, 1.0, 1.0,
                                 "benchmark gripper: kappa 1.9 N*mm/rad, r 3.54 mm, mu 1, F_n 1 N"};
  static const std::map<std::string, GraspPreset> presets{
      {"trl-grip-fit", trl}, {"paper-V.B-fit", trl}, {"benchmark-grip-fit", bench}};
  return presets;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Context ctx{out, err};
  CLI::App app{"trlkit: strain limiting layer design-space toolkit", "trlkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "trlkit 0.1.0");

  std::string config_path;
  RunConfig flags;
  std::string formats_text;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config with unit-suffixed keys; flags override it");
    sub->add_option_function<std::string>(
        "--out-dir", [&](const std::string& v) { flags.output_dir = v; },
        "output directory (default $" + std::string(kOutputDirEnv) + " or .)");
  };
  auto material_flags = [&](CLI::App* sub) {
    sub->add_option_function<std::string>(
        "--material", [&](const std::string& v) { flags.material = v; },
        "built-in material: PA6, PLA or Ecoflex00-30 (default PA6)");
    num_flag(sub, "--youngs", flags.youngs_modulus_mpa, "[MPa] override Young's modulus");
    num_flag(sub, "--poisson", flags.poisson_ratio, "[-] override Poisson ratio");
  };
  auto solver_flags = [&](CLI::App* sub) {
    num_flag(sub, "--tol", flags.tolerance, "[-] relative mesh-convergence tolerance in (0, 0.1]");
    num_flag(sub, "--edge", flags.initial_edge_mm, "[mm] initial target element edge");
    num_flag(sub, "--dof-budget", flags.dof_budget, "[dof] largest mesh converge may build");
    num_flag(sub, "--jobs", flags.jobs, "[count] design points solved at once (0 = all threads)");
    sub->add_option_function<std::string>(
        "--formats",
        [&](const std::string& v) {
          std::vector<std::string> list;
          std::stringstream ss(v);
          std::string f;
          while (std::getline(ss, f, ',')) list.push_back(trim(f));
          flags.formats = list;
        },
        "comma list of csv,json,svg,vtk (default csv,json,svg)");
  };
  auto trl_geometry = [&](CLI::App* sub) {
    num_flag(sub, "--fin-height", flags.fin_height_mm, "[mm] triangle height (default 0.1 L + 2)");
    num_flag(sub, "--panel-thickness", flags.panel_thickness_mm, "[mm] panel wall thickness (default 1)");
    num_flag(sub, "--flange-thickness", flags.flange_thickness_mm, "[mm] top flange thickness (default panel)");
    num_flag(sub, "--apex-ridge", flags.apex_ridge_mm, "[mm] fused length at each apex (default panel)");
  };
  auto strip_geometry = [&](CLI::App* sub) {
    num_flag(sub, "--length", flags.length_mm, "[mm] layer length (default 100)");
    num_flag(sub, "--width", flags.width_mm, "[mm] layer width (default 20)");
  };

  auto* sll = app.add_subcommand("sll-analyze", "plain strip thickness study: beam formulas beside shell FEA");
  common(sll);
  material_flags(sll);
  solver_flags(sll);
  strip_geometry(sll);
  grid_flag(sll, "--thickness", flags.thickness_mm, "[mm] thickness list or start:stop:step (default 0.3:1.0:0.1)");
  num_flag(sll, "--force", flags.force_n, "[N] in-plane tip force (default 0.01)");
  num_flag(sll, "--moment", flags.moment_nmm, "[N*mm] tip torsion moment (default 0.5)");

  double threshold = sweep::kDefaultCyclicLifeThreshold;
  auto* trl = app.add_subcommand("trl-sweep", "triangulated layer sweep over triangle count");
  common(trl);
  material_flags(trl);
  solver_flags(trl);
  strip_geometry(trl);
  trl_geometry(trl);
  grid_flag(trl, "--triangles", flags.triangles, "[count] triangle counts, list or start:stop[:step] (default 2:30)");
  num_flag(trl, "--force", flags.force_n, "[N] in-plane tip force (default 0.01)");
  num_flag(trl, "--moment", flags.moment_nmm, "[N*mm] tip torsion moment (default 5)");
  trl->add_option("--threshold", threshold,
                  "[-] CyclicLife: allowed relative excess over the best twist (default 0.15)")
      ->type_name("NUM");

  bool as_json = false;
  auto* gp = app.add_subcommand("grasp-predict", "payload capacity and mass feasibility of a grasp");
  common(gp);
  gp->add_option_function<std::string>(
      "--preset", [&](const std::string& v) { flags.preset = v; },
      "named scenario: trl-grip-fit or benchmark-grip-fit");
  num_flag(gp, "--normal-force", flags.normal_force_n, "[N] grip normal force F_n");
  num_flag(gp, "--friction", flags.friction, "[-] static friction coefficient mu");
  num_flag(gp, "--r", flags.contact_radius_mm, "[mm] neutral axis to object distance");
  num_flag(gp, "--kappa", flags.kappa_nmm_per_rad, "[N*mm/rad] torsional stiffness of the finger");
  num_flag(gp, "--x", flags.allowed_sag_mm, "[mm] allowed vertical sag of the object");
  num_flag(gp, "--tau", flags.shear_stress_kpa, "[kPa] shear stress in the layer (optional)");
  num_flag(gp, "--tau-f", flags.shear_fracture_kpa, "[kPa] shear fracture stress (optional)");
  num_flag(gp, "--mass", flags.mass_g, "[g] object mass for the feasibility check");
  gp->add_option_function<std::string>(
      "--gripper", [&](const std::string& v) { flags.gripper = v; }, "trl or benchmark");
  gp->add_flag("--json", as_json, "print the report as JSON instead of text");

  std::string family = "trl";
  double edge = geometry::kDefaultTargetEdgeMm;
  std::optional<double> extrude;
  std::string out_path, json_path, mesh_path;
  auto* me = app.add_subcommand("mesh-export", "write a printable binary STL of a layer");
  common(me);
  strip_geometry(me);
  trl_geometry(me);
  me->add_option("--family", family, "trl or sll (default trl)");
  grid_flag(me, "--triangles", flags.triangles, "[count] triangle count (default 30)");
  grid_flag(me, "--thickness", flags.thickness_mm, "[mm] strip thickness for --family sll (default 1)");
  me->add_option("--edge", edge, "[mm] target element edge (default 2)")->type_name("NUM");
  num_flag(me, "--extrude", extrude, "[mm] solid thickness of each panel (default wall thickness)");
  me->add_option("--out", out_path, "STL path (default <out-dir>/trl<N>.stl)");
  me->add_option("--mesh-json", json_path, "also dump the shell mesh as JSON to this path");

  auto* va = app.add_subcommand("validate", "lint a generated or stored shell mesh");
  common(va);
  strip_geometry(va);
  trl_geometry(va);
  va->add_option("--family", family, "trl or sll (default trl)");
  grid_flag(va, "--triangles", flags.triangles, "[count] triangle count (default 30)");
  grid_flag(va, "--thickness", flags.thickness_mm, "[mm] strip thickness for --family sll (default 1)");
  va->add_option("--edge", edge, "[mm] target element edge (default 2)")->type_name("NUM");
  va->add_option("--mesh", mesh_path, "mesh JSON file to lint instead of generating one");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kOk;
    } catch (const CLI::CallForVersion&) {
      out << "trlkit 0.1.0\n";
      return kOk;
    } catch (const CLI::ParseError& e) {
      // Help on a subcommand is raised with the subcommand as context.
      if (e.get_exit_code() == 0) {
        for (auto* sub : app.get_subcommands()) out << sub->help();
        return kOk;
      }
      throw InvalidInput(e.what());
    }
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    overlay(cfg, flags);
    if (*sll) return cmd_sll_analyze(ctx, cfg);
    if (*trl) return cmd_trl_sweep(ctx, cfg, threshold);
    if (*gp) return cmd_grasp_predict(ctx, cfg, as_json);
    if (*me) return cmd_mesh_export(ctx, cfg, family, edge, extrude, out_path, json_path);
    if (*va) return cmd_validate(ctx, cfg, family, edge, mesh_path);
    throw InvalidInput("no command given");
  } catch (const InvalidInput& e) {
    error_json(err, kConfigError, "config", e.what());
    return kConfigError;
  } catch (const MeshingError& e) {
    error_json(err, kConfigError, "config", e.what());
    return kConfigError;
  } catch (const IoError& e) {
    error_json(err, kIoError, "io", e.what());
    return kIoError;
  } catch (const SolverError& e) {
    error_json(err, kSolverError, "solver", e.what());
    return kSolverError;
  } catch (const std::exception& e) {
    error_json(err, kSolverError, "internal", e.what());
    return kSolverError;
  }
}

}  // namespace trl::cli
