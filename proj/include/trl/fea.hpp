#pragma once

#include <array>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "trl/assembly.hpp"
#include "trl/errors.hpp"
#include "trl/geometry.hpp"

namespace trl::fea {

enum class LoadKind { InPlaneTipForce, TipTorsionMoment };

inline constexpr double kDefaultTipForceN = 0.01;
inline constexpr double kDefaultTrlMomentNmm = 5.0;
inline constexpr double kDefaultSllMomentNmm = 0.5;

/// magnitude: N for a tip force, N*mm for a torsion moment.
struct LoadCase {
  LoadKind kind = LoadKind::InPlaneTipForce;
  double magnitude = kDefaultTipForceN;

  static LoadCase tip_force(double newtons) { return {LoadKind::InPlaneTipForce, newtons}; }
  static LoadCase torsion(double newton_mm) { return {LoadKind::TipTorsionMoment, newton_mm}; }
};

const char* to_string(LoadKind kind);

struct SolveDiagnostics {
  std::size_t dof_count = 0;
  std::size_t free_dof_count = 0;
  double residual_norm = 0.0;  // ||K u - f|| / ||f||
  std::string method;          // "ldlt" or "cg"
  int iterations = 0;
};

struct RefinementLevel {
  int level = 0;
  double target_edge_mm = 0.0;
  std::size_t dof_count = 0;
  std::vector<double> monitored;  // one scalar per load case
  double relative_change = std::numeric_limits<double>::quiet_NaN();
};

struct FeaResult {
  LoadCase load;
  std::shared_ptr<const geometry::TriMesh> mesh;
  /// Per node: ux, uy, uz in mm; rx, ry, rz in rad.
  std::vector<std::array<double, 6>> displacements;
  double tip_inplane_displacement_mm = 0.0;
  double angular_displacement_deg = 0.0;
  std::optional<double> rotational_stiffness_nmm_per_rad;
  std::vector<double> von_mises_pa;
  double stress_concentration_factor = std::numeric_limits<double>::quiet_NaN();
  double strain_energy_j = 0.0;
  SolveDiagnostics diagnostics;
  std::vector<RefinementLevel> refinement_history;
};

struct SolverOptions {
  /// Above this many free dof the conjugate-gradient path is used.
  std::size_t cg_threshold_dofs = 1'500'000;
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 50'000;
  /// LDLT pivots below this fraction of the largest pivot flag a mechanism.
  double pivot_tolerance = 1e-14;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
};

/// Factorises the clamped system once; repeated solves reuse it.
class StaticSolver {
 public:
  StaticSolver(const StiffnessSystem& system, const std::vector<int>& fixed_nodes,
               SolverOptions options = {});
  ~StaticSolver();
  StaticSolver(StaticSolver&&) noexcept;
  StaticSolver& operator=(StaticSolver&&) noexcept;

  /// Full-length SI displacement vector for a full-length SI load vector.
  Eigen::VectorXd solve(const Eigen::VectorXd& load, SolveDiagnostics* diag = nullptr) const;

  std::size_t free_dof_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Nodal load vector (SI) for a load case on the mesh's load_edge.
Eigen::VectorXd load_vector(const geometry::TriMesh& mesh, const LoadCase& load);

/// Solves one load case with the fixed_edge clamped.
FeaResult solve(const StiffnessSystem& system, const LoadCase& load, SolverOptions options = {});

/// Several load cases through one factorisation.
std::vector<FeaResult> solve(const StiffnessSystem& system, const std::vector<LoadCase>& loads,
                             SolverOptions options = {});

/// Builds a FeaResult from a solved displacement field.
FeaResult postprocess(const StiffnessSystem& system, const LoadCase& load,
                      const Eigen::VectorXd& u, const Eigen::VectorXd& f,
                      const SolveDiagnostics& diag, ExecutionPolicy policy);

/// beta = asin(BC / sqrt(AB^2 + BC^2)) in degrees.
double beta_from_lengths(double ab_mm, double bc_mm);

/// Angle between the undeformed line AB and the deformed line AC, degrees.
double extract_beta(const FeaResult& result, int node_a, int node_b);

/// kappa = M / beta, N*mm/rad. beta in degrees, must be > 0.
double rotational_stiffness(double moment_nmm, double beta_deg);

/// max / median of a stress field.
double stress_concentration(std::span<const double> field);

/// SCF of a solved result, excluding load_adjacent elements.
double stress_concentration(const FeaResult& result);

struct ConvergeOptions {
  double tolerance = 0.02;
  double initial_edge_mm = geometry::kDefaultTargetEdgeMm;
  int max_levels = 6;
  std::size_t dof_budget = 400'000;
  AssemblyOptions assembly;
  SolverOptions solver;
};

/// Raised when the dof budget or level limit is hit before convergence.
class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, std::vector<RefinementLevel> history,
                   std::vector<FeaResult> last);
  const std::vector<RefinementLevel>& history() const { return history_; }
  /// Finest results obtained, may be empty.
  const std::vector<FeaResult>& last_results() const { return last_; }

 private:
  std::vector<RefinementLevel> history_;
  std::vector<FeaResult> last_;
};

/// Halves the target edge until every monitored scalar (tip displacement
/// for forces, beta for moments) changes by less than `tolerance` between
/// successive levels. Always solves at least two levels.
std::vector<FeaResult> converge(const geometry::MeshableSpec& spec, const material::Material& mat,
                                const std::vector<LoadCase>& loads, const ConvergeOptions& options);
FeaResult converge(const geometry::MeshableSpec& spec, const material::Material& mat,
                   const LoadCase& load, const ConvergeOptions& options);

/// The scalar converge() watches for a result.
double monitored_scalar(const FeaResult& r);

}  // namespace trl::fea
