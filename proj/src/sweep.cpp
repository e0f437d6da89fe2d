#include "trl/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <omp.h>

#include "trl/errors.hpp"

namespace trl::sweep {

namespace {

bool usable(const SweepRow& r) {
  return r.status != RowStatus::Failed && std::isfinite(r.in_plane_mm) &&
         std::isfinite(r.angular_deg);
}

std::vector<const SweepRow*> usable_rows(const SweepTable& t) {
  std::vector<const SweepRow*> rows;
  for (const auto& r : t.rows) {
    if (usable(r)) rows.push_back(&r);
  }
  return rows;
}

geometry::MeshableSpec spec_for(const SweepPlan& plan, double param) {
  if (plan.family == Family::Sll) {
    geometry::SllSpec s = plan.sll_base;
    s.thickness_mm = param;
    return s;
  }
  geometry::TrlSpec s = plan.trl_base;
  s.triangle_count = static_cast<int>(std::lround(param));
  return s;
}

void fill_from_results(SweepRow& row, const std::vector<fea::FeaResult>& res) {
  const auto& bend = res.at(0);
  const auto& twist = res.at(1);
  const auto& twist_small = res.at(2);
  row.in_plane_mm = bend.tip_inplane_displacement_mm;
  row.angular_deg = twist.angular_displacement_deg;
  row.kappa_nmm_per_rad = twist.rotational_stiffness_nmm_per_rad.value_or(0.0);
  row.kappa_check_nmm_per_rad = twist_small.rotational_stiffness_nmm_per_rad.value_or(0.0);
  row.scf = twist.stress_concentration_factor;
  row.dof = twist.diagnostics.dof_count;
  const auto& hist = twist.refinement_history;
  if (!hist.empty()) {
    row.final_edge_mm = hist.back().target_edge_mm;
    row.levels = static_cast<int>(hist.size());
    row.last_relative_change = hist.back().relative_change;
  }
}

}  // namespace

const char* to_string(Family f) { return f == Family::Sll ? "SLL" : "TRL"; }

Family parse_family(const std::string& s) {
  if (s == "SLL" || s == "sll") return Family::Sll;
  if (s == "TRL" || s == "trl") return Family::Trl;
  throw InvalidInput("unknown family '" + s + "'");
}

const char* to_string(RowStatus s) {
  switch (s) {
    case RowStatus::Ok: return "ok";
    case RowStatus::Unconverged: return "unconverged";
    case RowStatus::Failed: return "failed";
  }
  return "?";
}

const char* to_string(Metric m) { return m == Metric::InPlane ? "in_plane_mm" : "angular_deg"; }

double metric_value(const SweepRow& row, Metric m) {
  return m == Metric::InPlane ? row.in_plane_mm : row.angular_deg;
}

const char* to_string(Objective o) {
  switch (o) {
    case Objective::MaxInPlane: return "MaxInPlane";
    case Objective::MaxTorsionResistance: return "MaxTorsionResistance";
    case Objective::CyclicLife: return "CyclicLife";
  }
  return "?";
}

Objective parse_objective(const std::string& s) {
  for (auto o : {Objective::MaxInPlane, Objective::MaxTorsionResistance, Objective::CyclicLife}) {
    if (s == to_string(o)) return o;
  }
  throw InvalidInput("unknown objective '" + s + "'");
}

SweepPlan default_sll_plan() {
  SweepPlan p;
  p.family = Family::Sll;
  for (int i = 3; i <= 10; ++i) p.grid.push_back(i / 10.0);
  p.moment_nmm = fea::kDefaultSllMomentNmm;
  p.material = material::pa6();
  p.converge.tolerance = 0.02;
  return p;
}

SweepPlan default_trl_plan() {
  SweepPlan p;
  p.family = Family::Trl;
  for (int n = 2; n <= 30; ++n) p.grid.push_back(n);
  p.moment_nmm = fea::kDefaultTrlMomentNmm;
  p.material = material::pa6();
  // Panel junction corners slow the convergence of the twist angle; a
  // tighter tolerance would need meshes far beyond the dof budget.
  p.converge.tolerance = 0.05;
  p.converge.dof_budget = 450'000;
  return p;
}

void validate(const SweepPlan& plan) {
  if (plan.grid.empty()) throw InvalidInput("sweep grid is empty");
  for (std::size_t i = 0; i < plan.grid.size(); ++i) {
    const double v = plan.grid[i];
    if (!std::isfinite(v) || !(v > 0.0)) throw InvalidInput("sweep grid values must be positive");
    if (i > 0 && !(v > plan.grid[i - 1])) {
      throw InvalidInput("sweep grid must be strictly increasing");
    }
    if (plan.family == Family::Trl && (std::abs(v - std::round(v)) > 1e-9 || v < 1.0)) {
      throw InvalidInput("TRL triangle counts must be integers >= 1");
    }
  }
  material::validate(plan.material);
  if (!std::isfinite(plan.force_n) || !std::isfinite(plan.moment_nmm)) {
    throw InvalidInput("sweep loads must be finite");
  }
  if (plan.parallelism < 0) throw InvalidInput("parallelism must be >= 0");
  // Surface spec errors before any solve.
  for (double v : plan.grid) {
    const auto spec = spec_for(plan, v);
    if (const auto* s = std::get_if<geometry::SllSpec>(&spec)) geometry::validate(*s);
    if (const auto* s = std::get_if<geometry::TrlSpec>(&spec)) geometry::validate(*s);
  }
}

SweepRow evaluate_point(const SweepPlan& plan, double param) {
  SweepRow row;
  row.family = plan.family;
  row.param = param;
  row.tolerance = plan.converge.tolerance;
  row.material = plan.material.name;
  const auto start = std::chrono::steady_clock::now();
  const std::vector<fea::LoadCase> loads{fea::LoadCase::tip_force(plan.force_n),
                                         fea::LoadCase::torsion(plan.moment_nmm),
                                         fea::LoadCase::torsion(0.1 * plan.moment_nmm)};
  try {
    fill_from_results(row, fea::converge(spec_for(plan, param), plan.material, loads, plan.converge));
    row.status = RowStatus::Ok;
  } catch (const fea::ConvergenceError& e) {
    if (e.last_results().size() == loads.size()) {
      fill_from_results(row, e.last_results());
      row.status = RowStatus::Unconverged;
    } else {
      row.status = RowStatus::Failed;
      row.in_plane_mm = row.angular_deg = std::numeric_limits<double>::quiet_NaN();
    }
    row.message = e.what();
  } catch (const std::exception& e) {
    row.status = RowStatus::Failed;
    row.in_plane_mm = row.angular_deg = std::numeric_limits<double>::quiet_NaN();
    row.message = e.what();
  }
  row.solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

SweepTable run_sweep(const SweepPlan& plan) {
  validate(plan);
  SweepTable table;
  table.family = plan.family;
  table.force_n = plan.force_n;
  table.moment_nmm = plan.moment_nmm;
  table.material = plan.material.name;
  table.youngs_modulus_pa = plan.material.youngs_modulus;
  table.poisson_ratio = plan.material.poisson_ratio;
  table.tolerance = plan.converge.tolerance;
  table.initial_edge_mm = plan.converge.initial_edge_mm;
  table.dof_budget = plan.converge.dof_budget;
  table.rows.resize(plan.grid.size());

  const int n = static_cast<int>(plan.grid.size());
  const int threads = plan.parallelism > 0 ? plan.parallelism : omp_get_max_threads();
  // Largest designs first so stragglers do not serialise the tail.
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int k = 0; k < n; ++k) {
    const int i = n - 1 - k;
    table.rows[i] = evaluate_point(plan, plan.grid[i]);
  }
  std::sort(table.rows.begin(), table.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
  return table;
}

std::string ShapeReport::summary() const {
  std::string s = fmt::format("{}: left end {} local max, right end {} local max", to_string(metric),
                              left_end_is_local_max ? "is" : "is not",
                              right_end_is_local_max ? "is" : "is not");
  if (interior_min_param) {
    s += fmt::format(", interior minimum {:.4g} at {:g}", *interior_min_value, *interior_min_param);
  } else {
    s += ", no interior minimum";
  }
  s += fmt::format(", global max at {:g}", argmax_param);
  s += swoosh() ? " (swoosh)" : " (not a swoosh)";
  return s;
}

ShapeReport swoosh_check(const SweepTable& table, Metric metric) {
  const auto rows = usable_rows(table);
  if (rows.size() < 3) throw InvalidInput("swoosh_check needs at least three usable grid points");
  std::vector<double> v;
  for (const auto* r : rows) v.push_back(metric_value(*r, metric));
  const std::size_t n = v.size();
  ShapeReport rep;
  rep.metric = metric;
  rep.left_end_is_local_max = v[0] > v[1];
  rep.right_end_is_local_max = v[n - 1] > v[n - 2];
  // First occurrence for the minimum, last for the maximum.
  std::size_t kmin = 0, kmax = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (v[i] < v[kmin]) kmin = i;
    if (v[i] >= v[kmax]) kmax = i;
  }
  rep.argmax_param = rows[kmax]->param;
  rep.global_max_at_endpoint = kmax == 0 || kmax == n - 1;
  if (kmin != 0 && kmin != n - 1) {
    rep.interior_min_param = rows[kmin]->param;
    rep.interior_min_value = v[kmin];
  }
  return rep;
}

Selection select_design(const SweepTable& table, Objective objective, double threshold) {
  const auto rows = usable_rows(table);
  if (rows.empty()) throw InvalidInput("select_design: no usable rows");
  if (!(threshold >= 0.0)) throw InvalidInput("select_design: threshold must be >= 0");
  // Rows are sorted ascending, so ">=" / "<=" comparisons favour larger params.
  auto pick = [&](auto better, const std::vector<const SweepRow*>& pool) {
    const SweepRow* best = pool.front();
    for (const auto* r : pool) {
      if (better(*r, *best)) best = r;
    }
    return best;
  };
  Selection sel;
  sel.objective = objective;
  switch (objective) {
    case Objective::MaxInPlane: {
      const auto* r = pick([](const SweepRow& a, const SweepRow& b) { return a.in_plane_mm >= b.in_plane_mm; }, rows);
      sel.param = r->param;
      sel.rationale = fmt::format("largest in-plane displacement {:.4g} mm at {:g}", r->in_plane_mm, r->param);
      break;
    }
    case Objective::MaxTorsionResistance: {
      const auto* r = pick([](const SweepRow& a, const SweepRow& b) { return a.angular_deg <= b.angular_deg; }, rows);
      sel.param = r->param;
      sel.rationale = fmt::format("smallest angular displacement {:.4g} deg at {:g}", r->angular_deg, r->param);
      break;
    }
    case Objective::CyclicLife: {
      const auto* best_t = pick([](const SweepRow& a, const SweepRow& b) { return a.angular_deg <= b.angular_deg; }, rows);
      const double limit = best_t->angular_deg * (1.0 + threshold);
      std::vector<const SweepRow*> pool;
      for (const auto* r : rows) {
        if (r->angular_deg <= limit && std::isfinite(r->scf)) pool.push_back(r);
      }
      if (pool.empty()) pool.push_back(best_t);
      const auto* r = pick([](const SweepRow& a, const SweepRow& b) { return a.scf <= b.scf; }, pool);
      sel.param = r->param;
      sel.rationale = fmt::format(
          "lowest stress concentration {:.4g} at {:g} among {} designs within {:.0f}% of the best "
          "twist {:.4g} deg (this design {:.4g} deg)",
          r->scf, r->param, pool.size(), threshold * 100.0, best_t->angular_deg, r->angular_deg);
      break;
    }
  }
  return sel;
}

FamilyComparison compare_families(double kappa_sll, double kappa_trl) {
  if (!(kappa_sll > 0.0) || !(kappa_trl > 0.0)) {
    throw InvalidInput("compare_families: stiffnesses must be > 0");
  }
  return {kappa_trl / kappa_sll, (1.0 - kappa_sll / kappa_trl) * 100.0};
}

FamilyComparison compare_families(const SweepRow& sll, const SweepRow& trl) {
  return compare_families(sll.kappa_nmm_per_rad, trl.kappa_nmm_per_rad);
}

}  // namespace trl::sweep
