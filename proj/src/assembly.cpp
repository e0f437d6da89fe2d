#include "trl/assembly.hpp"

#include <algorithm>
#include <atomic>

#include "trl/errors.hpp"
#include "trl/units.hpp"

namespace trl::fea {

namespace {

// Element kernels are evaluated in chunks so the parallel path never holds
// more than this many 18x18 matrices at once.
constexpr std::size_t kChunk = 2048;

Vec3 node_m(const geometry::TriMesh& mesh, int v) { return mesh.nodes[v] * (1.0 / units::kMmPerM); }

/// Column-compressed pattern built from node adjacency; every node couples
/// to itself and to each node it shares an element with, in 6x6 blocks.
struct BlockPattern {
  std::vector<std::vector<int>> neighbours;  // sorted, per node

  explicit BlockPattern(const geometry::TriMesh& mesh) : neighbours(mesh.nodes.size()) {
    for (std::size_t v = 0; v < mesh.nodes.size(); ++v) neighbours[v].push_back(static_cast<int>(v));
    for (const auto& el : mesh.elements)
      for (int a : el)
        for (int b : el) neighbours[a].push_back(b);
    for (auto& n : neighbours) {
      std::sort(n.begin(), n.end());
      n.erase(std::unique(n.begin(), n.end()), n.end());
    }
  }

  SparseMatrix empty_matrix() const {
    const Eigen::Index n_dof = 6 * static_cast<Eigen::Index>(neighbours.size());
    SparseMatrix k(n_dof, n_dof);
    std::size_t nnz = 0;
    for (const auto& n : neighbours) nnz += 36 * n.size();
    k.resizeNonZeros(static_cast<Eigen::Index>(nnz));
    auto* outer = k.outerIndexPtr();
    auto* inner = k.innerIndexPtr();
    std::size_t pos = 0;
    for (std::size_t node = 0; node < neighbours.size(); ++node) {
      for (int c = 0; c < 6; ++c) {
        outer[6 * node + c] = static_cast<int>(pos);
        for (int nb : neighbours[node])
          for (int r = 0; r < 6; ++r) inner[pos++] = 6 * nb + r;
      }
    }
    outer[n_dof] = static_cast<int>(pos);
    std::fill(k.valuePtr(), k.valuePtr() + nnz, 0.0);
    return k;
  }

  void scatter(SparseMatrix& k, const std::array<int, 3>& el, const Matrix18& ke) const {
    auto* outer = k.outerIndexPtr();
    auto* values = k.valuePtr();
    for (int b = 0; b < 3; ++b) {
      const auto& nb = neighbours[el[b]];
      for (int a = 0; a < 3; ++a) {
        const auto slot = std::lower_bound(nb.begin(), nb.end(), el[a]) - nb.begin();
        for (int c = 0; c < 6; ++c) {
          double* col = values + outer[6 * el[b] + c] + 6 * slot;
          for (int r = 0; r < 6; ++r) col[r] += ke(6 * a + r, 6 * b + c);
        }
      }
    }
  }
};

[[noreturn]] void throw_bad_element(std::size_t e, const char* what) {
  throw SolverError("singular element geometry in element " + std::to_string(e) + ": " + what);
}

}  // namespace

Matrix18 element_matrix(const geometry::TriMesh& mesh, const material::Material& mat,
                        std::size_t e, double drilling_factor) {
  const auto& el = mesh.elements[e];
  try {
    return element_stiffness(node_m(mesh, el[0]), node_m(mesh, el[1]), node_m(mesh, el[2]),
                             mat.youngs_modulus, mat.poisson_ratio,
                             mesh.thickness[e] / units::kMmPerM, drilling_factor);
  } catch (const SolverError& err) {
    throw_bad_element(e, err.what());
  }
}

StiffnessSystem assemble(std::shared_ptr<const geometry::TriMesh> mesh,
                         const material::Material& mat, AssemblyOptions options) {
  material::validate(mat);
  if (!mesh || mesh->elements.empty()) throw InvalidInput("cannot assemble an empty mesh");
  const BlockPattern pattern(*mesh);
  SparseMatrix k = pattern.empty_matrix();
  const std::size_t n_el = mesh->elements.size();

  if (options.policy == ExecutionPolicy::Serial) {
    for (std::size_t e = 0; e < n_el; ++e) {
      pattern.scatter(k, mesh->elements[e], element_matrix(*mesh, mat, e, options.drilling_factor));
    }
  } else {
    std::vector<Matrix18> buffer(std::min(kChunk, n_el));
    for (std::size_t begin = 0; begin < n_el; begin += kChunk) {
      const std::size_t end = std::min(n_el, begin + kChunk);
      std::atomic<long long> bad{-1};
#pragma omp parallel for schedule(static)
      for (long long e = static_cast<long long>(begin); e < static_cast<long long>(end); ++e) {
        try {
          buffer[e - begin] = element_matrix(*mesh, mat, static_cast<std::size_t>(e),
                                             options.drilling_factor);
        } catch (const SolverError&) {
          long long expected = -1;
          bad.compare_exchange_strong(expected, e);
        }
      }
      if (bad.load() >= 0) throw_bad_element(static_cast<std::size_t>(bad.load()), "zero area");
      // Scatter stays serial and in element order so sums are bit-stable.
      for (std::size_t e = begin; e < end; ++e) pattern.scatter(k, mesh->elements[e], buffer[e - begin]);
    }
  }
  return StiffnessSystem{std::move(mesh), mat, options, std::move(k)};
}

StiffnessSystem assemble(const geometry::TriMesh& mesh, const material::Material& mat,
                         AssemblyOptions options) {
  return assemble(std::make_shared<const geometry::TriMesh>(mesh), mat, options);
}

Vector18 gather(const geometry::TriMesh& mesh, const Eigen::VectorXd& u, std::size_t e) {
  Vector18 ue;
  const auto& el = mesh.elements[e];
  for (int a = 0; a < 3; ++a) ue.segment<6>(6 * a) = u.segment<6>(6 * el[a]);
  return ue;
}

std::vector<ElementStress> recover_stresses(const geometry::TriMesh& mesh,
                                            const material::Material& mat,
                                            const Eigen::VectorXd& u, ExecutionPolicy policy) {
  std::vector<ElementStress> out(mesh.elements.size());
  auto one = [&](std::size_t e) {
    const auto& el = mesh.elements[e];
    out[e] = element_stress(node_m(mesh, el[0]), node_m(mesh, el[1]), node_m(mesh, el[2]),
                            mat.youngs_modulus, mat.poisson_ratio,
                            mesh.thickness[e] / units::kMmPerM, gather(mesh, u, e));
  };
  const long long n = static_cast<long long>(out.size());
  if (policy == ExecutionPolicy::Serial) {
    for (long long e = 0; e < n; ++e) one(static_cast<std::size_t>(e));
  } else {
#pragma omp parallel for schedule(static)
    for (long long e = 0; e < n; ++e) one(static_cast<std::size_t>(e));
  }
  return out;
}

}  // namespace trl::fea
