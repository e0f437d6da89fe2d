#include <doctest.h>

#include <cmath>
#include <sstream>

#include "trl/analytic.hpp"
#include "trl/fea.hpp"
#include "trl/fea_io.hpp"
#include "trl/material.hpp"

using namespace trl;
using namespace trl::fea;

namespace {

material::Material pa6_nu(double nu) {
  const auto base = material::pa6();
  return material::make_material("PA6", base.youngs_modulus, nu);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

StiffnessSystem sll_system(double t, double edge, const material::Material& mat = material::pa6(),
                           ExecutionPolicy policy = ExecutionPolicy::Parallel) {
  geometry::SllSpec spec;
  spec.thickness_mm = t;
  return assemble(std::make_shared<const geometry::TriMesh>(geometry::build_sll_mesh(spec, edge)),
                  mat, {1e-3, policy});
}

// Euler-Bernoulli tip deflection in mm, written out from first principles.
double eb_tip_mm(double t_mm, double e_pa) {
  const double w = 0.020, t = t_mm * 1e-3, l = 0.100, f = 0.01;
  return 1e3 * f * l * l * l / (3.0 * e_pa * w * t * t * t / 12.0);
}

}  // namespace

TEST_CASE("zero load gives zero displacement") {
  const auto sys = sll_system(0.5, 4.0);
  for (const auto& load : {LoadCase::tip_force(0.0), LoadCase::torsion(0.0)}) {
    const FeaResult r = solve(sys, load);
    for (const auto& d : r.displacements)
      for (double v : d) CHECK(v == 0.0);
    CHECK(r.strain_energy_j == 0.0);
  }
}

TEST_CASE("SLL tip deflection and twist near the reference values") {
  ConvergeOptions opt;
  opt.tolerance = 0.02;
  geometry::SllSpec s;
  s.thickness_mm = 0.5;
  const FeaResult bend = converge(s, material::pa6(), LoadCase::tip_force(0.01), opt);
  CHECK(rel(bend.tip_inplane_displacement_mm, 14.02) < 0.10);

  s.thickness_mm = 1.0;
  const FeaResult twist = converge(s, material::pa6(), LoadCase::torsion(0.5), opt);
  CHECK(rel(twist.angular_displacement_deg, 1.03) < 0.10);
  REQUIRE(twist.rotational_stiffness_nmm_per_rad.has_value());
  CHECK(*twist.rotational_stiffness_nmm_per_rad > 0.0);
}

TEST_CASE("SLL bending matches beam theory without Poisson coupling") {
  // With nu = 0 the clamped plate strip carries no anticlastic restraint.
  const auto mat = pa6_nu(0.0);
  ConvergeOptions opt;
  opt.tolerance = 0.01;
  geometry::SllSpec s;
  s.thickness_mm = 1.0;
  const FeaResult r = converge(s, mat, LoadCase::tip_force(0.01), opt);
  CHECK(r.refinement_history.back().relative_change < 0.01);
  CHECK(rel(r.tip_inplane_displacement_mm, 1.75) < 0.01);

  opt.tolerance = 0.02;
  for (double t : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) {
    s.thickness_mm = t;
    const FeaResult rt = converge(s, mat, LoadCase::tip_force(0.01), opt);
    CHECK(rel(rt.tip_inplane_displacement_mm, eb_tip_mm(t, mat.youngs_modulus)) < 0.02);
  }
}

TEST_CASE("SLL bending with Poisson coupling is slightly stiffer than beam theory") {
  ConvergeOptions opt;
  geometry::SllSpec s;
  for (double t : {0.5, 1.0}) {
    s.thickness_mm = t;
    const FeaResult r = converge(s, material::pa6(), LoadCase::tip_force(0.01), opt);
    const double eb = eb_tip_mm(t, material::pa6().youngs_modulus);
    CHECK(r.tip_inplane_displacement_mm < eb);
    CHECK(r.tip_inplane_displacement_mm > 0.95 * eb);
  }
}

TEST_CASE("in-plane displacement scales with the inverse cube of thickness") {
  const auto a = solve(sll_system(0.3, 1.0), LoadCase::tip_force(0.01));
  const auto b = solve(sll_system(0.4, 1.0), LoadCase::tip_force(0.01));
  CHECK(rel(a.tip_inplane_displacement_mm / b.tip_inplane_displacement_mm,
            std::pow(4.0 / 3.0, 3.0)) < 0.02);
}

TEST_CASE("extract_beta and the stiffness estimator") {
  CHECK(beta_from_lengths(10, 0) == 0.0);
  CHECK(beta_from_lengths(10, 10) == doctest::Approx(45.0).epsilon(1e-12));
  CHECK(beta_from_lengths(10, 1.745) == doctest::Approx(9.90).epsilon(5e-4));
  CHECK_THROWS_AS(beta_from_lengths(0, 1), InvalidInput);

  const auto r = solve(sll_system(1.0, 4.0), LoadCase::torsion(0.5));
  const int a = r.mesh->node_of(geometry::kTipCenterA);
  CHECK_THROWS_AS(extract_beta(r, a, a), InvalidInput);

  CHECK(rotational_stiffness(0.5, 15.36) == doctest::Approx(1.865).epsilon(1e-3));
  CHECK(rotational_stiffness(5, 0.7816) == doctest::Approx(366.6).epsilon(1e-3));
  CHECK(rotational_stiffness(5, 90) == doctest::Approx(10.0 / M_PI).epsilon(1e-12));
  CHECK_THROWS_AS(rotational_stiffness(5, 0), InvalidInput);
  CHECK_THROWS_AS(rotational_stiffness(5, -1), InvalidInput);
}

TEST_CASE("stress concentration factor") {
  const double f[] = {1, 1, 1, 10};
  CHECK(stress_concentration(std::span<const double>(f)) == doctest::Approx(10.0));
  CHECK_THROWS_AS(stress_concentration(std::span<const double>()), InvalidInput);

  FeaResult empty;
  CHECK_THROWS_AS(stress_concentration(empty), InvalidInput);

  // Elements flagged load_adjacent are excluded.
  auto mesh = std::make_shared<geometry::TriMesh>();
  mesh->element_sets[geometry::kLoadAdjacent] = {3};
  FeaResult r;
  r.mesh = mesh;
  r.von_mises_pa = {2, 2, 4, 1000};
  CHECK(stress_concentration(r) == doctest::Approx(2.0));
}

TEST_CASE("fewer triangles concentrate more stress") {
  geometry::TrlSpec s;
  s.triangle_count = 2;
  const auto r2 = solve(assemble(geometry::build_trl_mesh(s, 2.0), material::pa6()),
                        LoadCase::torsion(5.0));
  s.triangle_count = 30;
  const auto r30 = solve(assemble(geometry::build_trl_mesh(s, 2.0), material::pa6()),
                         LoadCase::torsion(5.0));
  CHECK(r2.stress_concentration_factor > r30.stress_concentration_factor);
}

TEST_CASE("solutions are linear in the load") {
  const auto sys = sll_system(0.6, 2.0);
  for (auto kind : {LoadKind::InPlaneTipForce, LoadKind::TipTorsionMoment}) {
    const auto rs = solve(sys, std::vector<LoadCase>{{kind, 0.5}, {kind, 0.5 * 7.25}});
    double worst = 0.0, scale = 0.0;
    for (std::size_t n = 0; n < rs[0].displacements.size(); ++n)
      for (int k = 0; k < 6; ++k) {
        worst = std::max(worst, std::abs(7.25 * rs[0].displacements[n][k] - rs[1].displacements[n][k]));
        scale = std::max(scale, std::abs(rs[1].displacements[n][k]));
      }
    CHECK(worst <= 1e-12 * scale);
  }
}

TEST_CASE("stiffness estimate at two moment levels") {
  // The twist angle is atan(BC/AB) of a linear BC, so kappa is load
  // independent only to first order. The exact ratio follows from BC.
  geometry::TrlSpec spec;
  spec.triangle_count = 4;
  const auto trl = assemble(geometry::build_trl_mesh(spec, 2.0), material::pa6());
  {
    const auto rs = solve(trl, std::vector<LoadCase>{LoadCase::torsion(0.5), LoadCase::torsion(5.0)});
    const int a = rs[0].mesh->node_of(geometry::kTipCenterA);
    const int b = rs[0].mesh->node_of(geometry::kTipEdgeB);
    const double ab = (rs[0].mesh->nodes[b] - rs[0].mesh->nodes[a]).norm();
    const double bc1 = std::abs(rs[0].displacements[b][2] - rs[0].displacements[a][2]);
    const double bc2 = std::abs(rs[1].displacements[b][2] - rs[1].displacements[a][2]);
    CHECK(rel(bc2, 10.0 * bc1) < 1e-9);
    const double k1 = rs[0].rotational_stiffness_nmm_per_rad.value();
    const double k2 = rs[1].rotational_stiffness_nmm_per_rad.value();
    const double oracle = (5.0 / std::atan(bc2 / ab)) / (0.5 / std::atan(bc1 / ab));
    CHECK(rel(k2 / k1, oracle) < 1e-9);
    // At sub-degree twist the two estimates agree to well under 0.1%.
    CHECK(rel(k1, k2) < 1e-3);
  }
}

TEST_CASE("Maxwell-Betti reciprocity") {
  const auto sys = sll_system(0.8, 2.0);
  const StaticSolver solver(sys, sys.mesh->node_set(geometry::kFixedEdge));
  REQUIRE(sys.mesh->nodes.size() > 540);
  const Eigen::Index n = static_cast<Eigen::Index>(sys.dof_count());
  // Pairs of (node, dof) picked across the strip and across dof types.
  const std::pair<int, int> pts[][2] = {
      {{100, 2}, {500, 2}}, {{250, 1}, {540, 0}}, {{400, 2}, {60, 4}}, {{300, 5}, {320, 1}}};
  for (const auto& pq : pts) {
    const Eigen::Index dp = 6 * pq[0].first + pq[0].second;
    const Eigen::Index dq = 6 * pq[1].first + pq[1].second;
    Eigen::VectorXd fp = Eigen::VectorXd::Zero(n), fq = Eigen::VectorXd::Zero(n);
    fp[dp] = 1.0;
    fq[dq] = 1.0;
    const Eigen::VectorXd up = solver.solve(fp);
    const Eigen::VectorXd uq = solver.solve(fq);
    CHECK(std::abs(up[dq] - uq[dp]) <= 1e-9 * std::max(std::abs(up[dq]), std::abs(uq[dp])));
  }
}

TEST_CASE("strain energy is non-negative") {
  const auto sys = sll_system(0.7, 2.0);
  for (double m : {-3.0, -0.1, 0.2, 4.0}) {
    CHECK(solve(sys, LoadCase::torsion(m)).strain_energy_j > 0.0);
    CHECK(solve(sys, LoadCase::tip_force(m * 0.01)).strain_energy_j > 0.0);
  }
}

TEST_CASE("serial and parallel paths give identical results") {
  const auto a = sll_system(0.5, 2.0, material::pa6(), ExecutionPolicy::Serial);
  const auto b = sll_system(0.5, 2.0, material::pa6(), ExecutionPolicy::Parallel);
  CHECK(Eigen::MatrixXd(a.stiffness) == Eigen::MatrixXd(b.stiffness));
  SolverOptions so;
  so.policy = ExecutionPolicy::Serial;
  const auto ra = solve(a, LoadCase::torsion(0.5), so);
  so.policy = ExecutionPolicy::Parallel;
  const auto rb = solve(b, LoadCase::torsion(0.5), so);
  CHECK(ra.displacements == rb.displacements);
  CHECK(ra.von_mises_pa == rb.von_mises_pa);
}

TEST_CASE("conjugate-gradient path agrees with the direct solve") {
  const auto sys = sll_system(1.0, 4.0);
  SolverOptions cg;
  cg.cg_threshold_dofs = 0;
  const auto direct = solve(sys, LoadCase::tip_force(0.01));
  const auto iter = solve(sys, LoadCase::tip_force(0.01), cg);
  CHECK(direct.diagnostics.method == "ldlt");
  CHECK(iter.diagnostics.method == "cg");
  CHECK(iter.diagnostics.iterations > 0);
  CHECK(rel(iter.tip_inplane_displacement_mm, direct.tip_inplane_displacement_mm) < 1e-6);
}

TEST_CASE("solver errors") {
  const auto sys = sll_system(1.0, 5.0);
  CHECK_THROWS_AS(StaticSolver(sys, {}), InvalidInput);

  // A node no element touches leaves its dof unrestrained.
  geometry::SllSpec s;
  auto mesh = geometry::build_sll_mesh(s, 5.0);
  mesh.nodes.push_back(geometry::Vec3(50, 50, 0));
  const auto loose = assemble(mesh, material::pa6());
  CHECK_THROWS_AS(solve(loose, LoadCase::tip_force(0.01)), SolverError);

  CHECK_THROWS_AS(solve(sys, LoadCase::tip_force(std::nan(""))), InvalidInput);
}

TEST_CASE("mesh convergence driver") {
  const auto mat = pa6_nu(0.0);
  geometry::SllSpec s;
  ConvergeOptions opt;

  SUBCASE("tolerance bounds") {
    for (double tol : {0.0, -0.01, 0.11}) {
      opt.tolerance = tol;
      CHECK_THROWS_AS(converge(s, mat, LoadCase::tip_force(0.01), opt), InvalidInput);
    }
  }
  SUBCASE("loose tolerance stops early") {
    opt.tolerance = 0.10;
    opt.initial_edge_mm = 5.0;
    const auto r = converge(s, mat, LoadCase::tip_force(0.01), opt);
    CHECK(r.refinement_history.size() >= 2);
    CHECK(r.refinement_history.size() <= 3);
  }
  SUBCASE("converged start refines once") {
    opt.tolerance = 0.05;
    opt.initial_edge_mm = 1.0;
    const auto r = converge(s, mat, LoadCase::tip_force(0.01), opt);
    REQUIRE(r.refinement_history.size() == 2);
    CHECK(r.refinement_history[1].target_edge_mm == 0.5);
    CHECK(std::isnan(r.refinement_history[0].relative_change));
  }
  SUBCASE("budget exhaustion carries the history") {
    opt.tolerance = 1e-4;
    opt.initial_edge_mm = 2.0;
    opt.dof_budget = 5000;
    try {
      converge(s, mat, LoadCase::tip_force(0.01), opt);
      FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
      CHECK(e.history().size() == 1);
      REQUIRE(e.last_results().size() == 1);
      CHECK(e.last_results()[0].refinement_history.size() == 1);
    }
  }
  SUBCASE("level limit") {
    opt.tolerance = 1e-9;
    opt.initial_edge_mm = 10.0;
    opt.max_levels = 2;
    CHECK_THROWS_AS(converge(s, mat, LoadCase::tip_force(0.01), opt), ConvergenceError);
  }
}

TEST_CASE("result export") {
  const auto r = solve(sll_system(1.0, 5.0), LoadCase::torsion(0.5));
  const auto j = result_to_json(r);
  CHECK(j["load"]["kind"] == to_string(LoadKind::TipTorsionMoment));
  CHECK(j["angular_displacement_deg"].get<double>() == r.angular_displacement_deg);
  CHECK(j["node_displacements"].size() == r.mesh->nodes.size());
  CHECK(j["element_von_mises_pa"].size() == r.mesh->elements.size());
  CHECK(j["diagnostics"]["dof_count"].get<std::size_t>() == 6 * r.mesh->nodes.size());
  CHECK_FALSE(result_to_json(r, false).contains("node_displacements"));

  std::ostringstream vtk;
  write_vtk(vtk, r);
  const std::string text = vtk.str();
  CHECK(text.rfind("# vtk DataFile Version", 0) == 0);
  CHECK(text.find("POINTS " + std::to_string(r.mesh->nodes.size())) != std::string::npos);
  CHECK(text.find("CELL_TYPES " + std::to_string(r.mesh->elements.size())) != std::string::npos);
  CHECK(text.find("von_mises_pa") != std::string::npos);
}
