#include "trl/fea.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "trl/units.hpp"

namespace trl::fea {

using geometry::TriMesh;

const char* to_string(LoadKind kind) {
  return kind == LoadKind::InPlaneTipForce ? "in_plane_tip_force" : "tip_torsion_moment";
}

// ---------------------------------------------------------------- solver

struct StaticSolver::Impl {
  SolverOptions options;
  const SparseMatrix* full = nullptr;
  std::vector<Eigen::Index> free_dofs;  // reduced index -> full index
  SparseMatrix reduced;
  bool use_cg = false;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
};

StaticSolver::StaticSolver(const StiffnessSystem& system, const std::vector<int>& fixed_nodes,
                           SolverOptions options)
    : impl_(std::make_unique<Impl>()) {
  if (fixed_nodes.empty()) throw InvalidInput("solve requires a non-empty fixed node set");
  auto& im = *impl_;
  im.options = options;
  im.full = &system.stiffness;
  const Eigen::Index n = system.stiffness.rows();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (int v : fixed_nodes) {
    if (v < 0 || 6 * static_cast<Eigen::Index>(v) >= n) throw InvalidInput("fixed node out of range");
    for (int c = 0; c < 6; ++c) fixed[6 * v + c] = 1;
  }
  std::vector<Eigen::Index> to_reduced(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!fixed[i]) {
      to_reduced[i] = static_cast<Eigen::Index>(im.free_dofs.size());
      im.free_dofs.push_back(i);
    }
  }
  const Eigen::Index nf = static_cast<Eigen::Index>(im.free_dofs.size());
  if (nf == 0) throw InvalidInput("every dof is fixed");

  im.use_cg = static_cast<std::size_t>(nf) > options.cg_threshold_dofs;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(system.stiffness.nonZeros()));
  for (Eigen::Index col = 0; col < n; ++col) {
    const Eigen::Index rc = to_reduced[col];
    if (rc < 0) continue;
    for (SparseMatrix::InnerIterator it(system.stiffness, col); it; ++it) {
      const Eigen::Index rr = to_reduced[it.row()];
      if (rr < 0) continue;
      if (!im.use_cg && rr < rc) continue;  // LDLT reads the lower triangle
      trips.emplace_back(rr, rc, it.value());
    }
  }
  im.reduced.resize(nf, nf);
  im.reduced.setFromTriplets(trips.begin(), trips.end());

  if (im.use_cg) {
    im.cg.setTolerance(options.cg_tolerance);
    im.cg.setMaxIterations(options.cg_max_iterations);
    im.cg.compute(im.reduced);
    if (im.cg.info() != Eigen::Success) throw SolverError("conjugate-gradient setup failed");
    return;
  }
  im.ldlt.compute(im.reduced);
  if (im.ldlt.info() != Eigen::Success) {
    throw SolverError("structural mechanism: stiffness factorisation failed");
  }
  const auto& d = im.ldlt.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  Eigen::Index worst = 0;
  const double dmin = d.minCoeff(&worst);
  if (!(dmin > options.pivot_tolerance * dmax)) {
    const Eigen::Index full_dof = im.free_dofs[static_cast<std::size_t>(
        im.ldlt.permutationPinv().indices()(worst))];
    throw SolverError("structural mechanism: reduced stiffness is not positive definite (pivot " +
                      std::to_string(dmin / dmax) + " near node " + std::to_string(full_dof / 6) +
                      ")");
  }
}

StaticSolver::~StaticSolver() = default;
StaticSolver::StaticSolver(StaticSolver&&) noexcept = default;
StaticSolver& StaticSolver::operator=(StaticSolver&&) noexcept = default;

std::size_t StaticSolver::free_dof_count() const { return impl_->free_dofs.size(); }

Eigen::VectorXd StaticSolver::solve(const Eigen::VectorXd& load, SolveDiagnostics* diag) const {
  const auto& im = *impl_;
  const Eigen::Index n = im.full->rows();
  if (load.size() != n) throw InvalidInput("load vector length does not match the system");
  const Eigen::Index nf = static_cast<Eigen::Index>(im.free_dofs.size());
  Eigen::VectorXd fr(nf);
  for (Eigen::Index i = 0; i < nf; ++i) fr[i] = load[im.free_dofs[i]];

  Eigen::VectorXd ur;
  int iterations = 0;
  if (im.use_cg) {
    ur = im.cg.solve(fr);
    iterations = static_cast<int>(im.cg.iterations());
    if (im.cg.info() != Eigen::Success) {
      throw SolverError("conjugate gradient did not converge: " + std::to_string(iterations) +
                        " iterations, estimated error " + std::to_string(im.cg.error()));
    }
  } else {
    ur = im.ldlt.solve(fr);
  }
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < nf; ++i) u[im.free_dofs[i]] = ur[i];

  if (diag) {
    diag->dof_count = static_cast<std::size_t>(n);
    diag->free_dof_count = static_cast<std::size_t>(nf);
    diag->method = im.use_cg ? "cg" : "ldlt";
    diag->iterations = iterations;
    const Eigen::VectorXd res = (*im.full * u - load);
    double rsq = 0.0;
    for (Eigen::Index i = 0; i < nf; ++i) rsq += res[im.free_dofs[i]] * res[im.free_dofs[i]];
    const double fn = fr.norm();
    diag->residual_norm = fn > 0.0 ? std::sqrt(rsq) / fn : std::sqrt(rsq);
  }
  return u;
}

// ----------------------------------------------------------------- loads

namespace {

/// Tributary length of each load-edge node along load-edge element edges.
std::vector<double> edge_weights(const TriMesh& mesh, const std::vector<int>& edge_nodes) {
  std::vector<int> slot(mesh.nodes.size(), -1);
  for (std::size_t i = 0; i < edge_nodes.size(); ++i) slot[edge_nodes[i]] = static_cast<int>(i);
  std::set<std::pair<int, int>> edges;
  for (const auto& el : mesh.elements) {
    for (int k = 0; k < 3; ++k) {
      const int a = el[k], b = el[(k + 1) % 3];
      if (slot[a] >= 0 && slot[b] >= 0) edges.insert({std::min(a, b), std::max(a, b)});
    }
  }
  std::vector<double> w(edge_nodes.size(), 0.0);
  for (const auto& [a, b] : edges) {
    const double half = 0.5 * (mesh.nodes[a] - mesh.nodes[b]).norm();
    w[slot[a]] += half;
    w[slot[b]] += half;
  }
  const bool any = std::any_of(w.begin(), w.end(), [](double x) { return x > 0.0; });
  if (!any) std::fill(w.begin(), w.end(), 1.0);
  return w;
}

}  // namespace

Eigen::VectorXd load_vector(const TriMesh& mesh, const LoadCase& load) {
  if (!std::isfinite(load.magnitude)) throw InvalidInput("load magnitude must be finite");
  const auto& nodes = mesh.node_set(geometry::kLoadEdge);
  if (nodes.empty()) throw InvalidInput("load_edge is empty");
  const auto w = edge_weights(mesh, nodes);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(6 * static_cast<Eigen::Index>(mesh.nodes.size()));
  if (load.kind == LoadKind::InPlaneTipForce) {
    double wsum = 0.0;
    for (double x : w) wsum += x;
    for (std::size_t i = 0; i < nodes.size(); ++i) f[6 * nodes[i] + 2] = load.magnitude * w[i] / wsum;
    return f;
  }
  // Linear couple of z-forces across the edge, statically equivalent to M
  // about the longitudinal axis with zero net force.
  const double moment = units::nmm_to_nm(load.magnitude);
  double wsum = 0.0, wy = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    wsum += w[i];
    wy += w[i] * units::mm_to_m(mesh.nodes[nodes[i]].y());
  }
  const double ybar = wy / wsum;
  double denom = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double y = units::mm_to_m(mesh.nodes[nodes[i]].y());
    denom += w[i] * y * (y - ybar);
  }
  if (!(denom > 0.0)) throw InvalidInput("load_edge has no lever arm for a torsion couple");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double y = units::mm_to_m(mesh.nodes[nodes[i]].y());
    f[6 * nodes[i] + 2] = moment * w[i] * (y - ybar) / denom;
  }
  return f;
}

// ----------------------------------------------------------- post-process

double beta_from_lengths(double ab_mm, double bc_mm) {
  if (!(ab_mm > 0.0)) throw InvalidInput("extract_beta: AB must be > 0");
  const double bc = std::abs(bc_mm);
  return units::rad_to_deg(std::asin(bc / std::sqrt(ab_mm * ab_mm + bc * bc)));
}

double extract_beta(const FeaResult& result, int node_a, int node_b) {
  if (!result.mesh) throw InvalidInput("extract_beta: result carries no mesh");
  const auto& nodes = result.mesh->nodes;
  const int n = static_cast<int>(nodes.size());
  if (node_a < 0 || node_b < 0 || node_a >= n || node_b >= n) {
    throw InvalidInput("extract_beta: node out of range");
  }
  if (node_a == node_b) throw InvalidInput("extract_beta: A and B coincide");
  const double ab = (nodes[node_b] - nodes[node_a]).norm();
  const double bc = result.displacements[node_b][2] - result.displacements[node_a][2];
  return beta_from_lengths(ab, bc);
}

double rotational_stiffness(double moment_nmm, double beta_deg) {
  if (!(beta_deg > 0.0)) throw InvalidInput("rotational_stiffness: beta must be > 0");
  return moment_nmm / units::deg_to_rad(beta_deg);
}

double stress_concentration(std::span<const double> field) {
  if (field.empty()) throw InvalidInput("stress_concentration: empty stress field");
  std::vector<double> v(field.begin(), field.end());
  const double peak = *std::max_element(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double median = v[mid];
  if (v.size() % 2 == 0) {
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + lower);
  }
  if (!(median > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return peak / median;
}

double stress_concentration(const FeaResult& result) {
  if (result.von_mises_pa.empty()) throw InvalidInput("stress_concentration: empty stress field");
  std::vector<char> skip(result.von_mises_pa.size(), 0);
  if (result.mesh) {
    auto it = result.mesh->element_sets.find(geometry::kLoadAdjacent);
    if (it != result.mesh->element_sets.end())
      for (int e : it->second) skip[e] = 1;
  }
  std::vector<double> kept;
  for (std::size_t e = 0; e < skip.size(); ++e)
    if (!skip[e]) kept.push_back(result.von_mises_pa[e]);
  return stress_concentration(kept);
}

FeaResult postprocess(const StiffnessSystem& system, const LoadCase& load, const Eigen::VectorXd& u,
                      const Eigen::VectorXd& f, const SolveDiagnostics& diag,
                      ExecutionPolicy policy) {
  const TriMesh& mesh = *system.mesh;
  FeaResult r;
  r.load = load;
  r.mesh = system.mesh;
  r.diagnostics = diag;
  r.displacements.resize(mesh.nodes.size());
  for (std::size_t v = 0; v < mesh.nodes.size(); ++v) {
    for (int c = 0; c < 3; ++c) r.displacements[v][c] = units::m_to_mm(u[6 * v + c]);
    for (int c = 3; c < 6; ++c) r.displacements[v][c] = u[6 * v + c];
  }
  const int a = mesh.node_of(geometry::kTipCenterA);
  const int b = mesh.node_of(geometry::kTipEdgeB);
  r.tip_inplane_displacement_mm = std::abs(r.displacements[a][2]);
  r.angular_displacement_deg = extract_beta(r, a, b);
  if (load.kind == LoadKind::TipTorsionMoment && r.angular_displacement_deg > 0.0) {
    r.rotational_stiffness_nmm_per_rad =
        rotational_stiffness(std::abs(load.magnitude), r.angular_displacement_deg);
  }
  const auto stresses = recover_stresses(mesh, system.material, u, policy);
  r.von_mises_pa.reserve(stresses.size());
  for (const auto& s : stresses) r.von_mises_pa.push_back(s.von_mises);
  r.stress_concentration_factor = stress_concentration(r);
  r.strain_energy_j = 0.5 * u.dot(f);
  return r;
}

std::vector<FeaResult> solve(const StiffnessSystem& system, const std::vector<LoadCase>& loads,
                             SolverOptions options) {
  const StaticSolver solver(system, system.mesh->node_set(geometry::kFixedEdge), options);
  std::vector<FeaResult> out;
  for (const auto& load : loads) {
    const Eigen::VectorXd f = load_vector(*system.mesh, load);
    SolveDiagnostics diag;
    const Eigen::VectorXd u = solver.solve(f, &diag);
    out.push_back(postprocess(system, load, u, f, diag, options.policy));
  }
  return out;
}

FeaResult solve(const StiffnessSystem& system, const LoadCase& load, SolverOptions options) {
  return std::move(solve(system, std::vector<LoadCase>{load}, options).front());
}

// ------------------------------------------------------------ convergence

ConvergenceError::ConvergenceError(const std::string& what, std::vector<RefinementLevel> history,
                                   std::vector<FeaResult> last)
    : SolverError(what), history_(std::move(history)), last_(std::move(last)) {}

double monitored_scalar(const FeaResult& r) {
  return r.load.kind == LoadKind::InPlaneTipForce ? r.tip_inplane_displacement_mm
                                                  : r.angular_displacement_deg;
}

std::vector<FeaResult> converge(const geometry::MeshableSpec& spec, const material::Material& mat,
                                const std::vector<LoadCase>& loads,
                                const ConvergeOptions& options) {
  if (!(options.tolerance > 0.0 && options.tolerance <= 0.1)) {
    throw InvalidInput("converge: tolerance must lie in (0, 0.1]");
  }
  if (loads.empty()) throw InvalidInput("converge: no load cases");
  std::vector<RefinementLevel> history;
  std::vector<FeaResult> previous;
  for (int level = 0; level < options.max_levels; ++level) {
    const double edge = options.initial_edge_mm / std::pow(2.0, level);
    auto mesh = std::make_shared<const TriMesh>(geometry::build_mesh(spec, edge));
    const std::size_t dofs = 6 * mesh->nodes.size();
    if (dofs > options.dof_budget) {
      for (auto& r : previous) r.refinement_history = history;
      throw ConvergenceError("dof budget exceeded before convergence (" + std::to_string(dofs) +
                                 " > " + std::to_string(options.dof_budget) + ")",
                             std::move(history), std::move(previous));
    }
    auto asm_opts = options.assembly;
    asm_opts.policy = options.solver.policy;
    const StiffnessSystem system = assemble(mesh, mat, asm_opts);
    std::vector<FeaResult> current = solve(system, loads, options.solver);

    RefinementLevel rec{level, edge, dofs, {}, std::numeric_limits<double>::quiet_NaN()};
    for (const auto& r : current) rec.monitored.push_back(monitored_scalar(r));
    if (level > 0) {
      double change = 0.0;
      for (std::size_t i = 0; i < current.size(); ++i) {
        const double now = rec.monitored[i];
        const double before = history.back().monitored[i];
        const double scale = std::max(std::abs(now), std::abs(before));
        if (scale > 0.0) change = std::max(change, std::abs(now - before) / scale);
      }
      rec.relative_change = change;
    }
    history.push_back(rec);
    if (level > 0 && rec.relative_change < options.tolerance) {
      for (auto& r : current) r.refinement_history = history;
      return current;
    }
    previous = std::move(current);
  }
  for (auto& r : previous) r.refinement_history = history;
  throw ConvergenceError("no convergence within " + std::to_string(options.max_levels) + " levels",
                         std::move(history), std::move(previous));
}

FeaResult converge(const geometry::MeshableSpec& spec, const material::Material& mat,
                   const LoadCase& load, const ConvergeOptions& options) {
  return std::move(converge(spec, mat, std::vector<LoadCase>{load}, options).front());
}

}  // namespace trl::fea
