#pragma once

#include <memory>
#include <vector>

#include <Eigen/SparseCore>

#include "trl/material.hpp"
#include "trl/mesh.hpp"
#include "trl/shell_element.hpp"

namespace trl::fea {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Serial is the reference path; Parallel runs the element kernels under
/// OpenMP and must produce bit-identical results.
enum class ExecutionPolicy { Serial, Parallel };

struct AssemblyOptions {
  /// Drilling penalty as a fraction of E * t * A.
  double drilling_factor = 1.0e-3;
  ExecutionPolicy policy = ExecutionPolicy::Parallel;
};

/// Global stiffness over 6 dof per node, full symmetric storage, SI units.
/// The mesh is kept in mm; conversion happens per element.
struct StiffnessSystem {
  std::shared_ptr<const geometry::TriMesh> mesh;
  material::Material material;
  AssemblyOptions options;
  SparseMatrix stiffness;

  std::size_t dof_count() const { return static_cast<std::size_t>(stiffness.rows()); }
};

StiffnessSystem assemble(std::shared_ptr<const geometry::TriMesh> mesh,
                         const material::Material& mat, AssemblyOptions options = {});
StiffnessSystem assemble(const geometry::TriMesh& mesh, const material::Material& mat,
                         AssemblyOptions options = {});

/// Element matrix of element `e`, global frame, SI.
Matrix18 element_matrix(const geometry::TriMesh& mesh, const material::Material& mat,
                        std::size_t e, double drilling_factor);

/// Gathers the 18 global displacements of element `e`.
Vector18 gather(const geometry::TriMesh& mesh, const Eigen::VectorXd& u, std::size_t e);

/// Centroid stresses for every element; `u` in SI.
std::vector<ElementStress> recover_stresses(const geometry::TriMesh& mesh,
                                            const material::Material& mat,
                                            const Eigen::VectorXd& u, ExecutionPolicy policy);

}  // namespace trl::fea
