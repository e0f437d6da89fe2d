#include "trl/mesh.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "trl/errors.hpp"

namespace trl::geometry {

const std::vector<int>& TriMesh::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end()) throw InvalidInput("mesh has no node set '" + name + "'");
  return it->second;
}

const std::vector<int>& TriMesh::element_set(const std::string& name) const {
  auto it = element_sets.find(name);
  if (it == element_sets.end()) throw InvalidInput("mesh has no element set '" + name + "'");
  return it->second;
}

int TriMesh::node_of(const std::string& name) const {
  const auto& s = node_set(name);
  if (s.size() != 1) throw InvalidInput("node set '" + name + "' must hold exactly one node");
  return s.front();
}

double TriMesh::element_area(std::size_t e) const {
  const auto& el = elements[e];
  const Vec3 a = nodes[el[1]] - nodes[el[0]];
  const Vec3 b = nodes[el[2]] - nodes[el[0]];
  return 0.5 * a.cross(b).norm();
}

Vec3 TriMesh::element_normal(std::size_t e) const {
  const auto& el = elements[e];
  const Vec3 a = nodes[el[1]] - nodes[el[0]];
  const Vec3 b = nodes[el[2]] - nodes[el[0]];
  return a.cross(b).normalized();
}

int TriMesh::panel_count() const {
  int n = 0;
  for (int p : panel) n = std::max(n, p + 1);
  return n;
}

const char* to_string(DefectKind kind) {
  switch (kind) {
    case DefectKind::BadElementIndex: return "bad-element-index";
    case DefectKind::DanglingNode: return "dangling-node";
    case DefectKind::NonManifoldEdge: return "non-manifold-edge";
    case DefectKind::ZeroAreaElement: return "zero-area-element";
    case DefectKind::InconsistentWinding: return "inconsistent-winding";
    case DefectKind::MissingNodeSet: return "missing-node-set";
    case DefectKind::OverlappingNodeSets: return "overlapping-node-sets";
  }
  return "unknown";
}

std::vector<DefectReport> validate_mesh(const TriMesh& m) {
  std::vector<DefectReport> out;
  const int n_nodes = static_cast<int>(m.nodes.size());

  // Relative area floor: a few ulps of the squared characteristic length.
  double extent = 0.0;
  if (!m.nodes.empty()) {
    const auto bb = bounding_box(m);
    extent = (bb.max - bb.min).norm();
  }
  const double area_floor = 1e-12 * std::max(extent * extent, 1e-300);

  std::vector<char> used(m.nodes.size(), 0);
  // Directed edge -> (element, panel) occurrences.
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> directed;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const auto& el = m.elements[e];
    bool ok = true;
    for (int v : el) ok = ok && v >= 0 && v < n_nodes;
    if (!ok || el[0] == el[1] || el[1] == el[2] || el[0] == el[2]) {
      out.push_back({DefectKind::BadElementIndex, static_cast<int>(e),
                     "element " + std::to_string(e) + " references invalid or repeated nodes"});
      continue;
    }
    for (int v : el) used[v] = 1;
    if (!(m.element_area(e) > area_floor)) {
      out.push_back({DefectKind::ZeroAreaElement, static_cast<int>(e),
                     "element " + std::to_string(e) + " has zero area"});
    }
    const int pnl = e < m.panel.size() ? m.panel[e] : 0;
    for (int k = 0; k < 3; ++k) {
      directed[{el[k], el[(k + 1) % 3]}].push_back({static_cast<int>(e), pnl});
    }
  }

  for (int v = 0; v < n_nodes; ++v) {
    if (!used[v]) {
      out.push_back({DefectKind::DanglingNode, v,
                     "node " + std::to_string(v) + " is not referenced by any element"});
    }
  }

  std::set<std::pair<int, int>> seen;
  for (const auto& [key, occ] : directed) {
    const std::pair<int, int> undirected{std::min(key.first, key.second),
                                         std::max(key.first, key.second)};
    if (!seen.insert(undirected).second) continue;
    const auto rev_it = directed.find({key.second, key.first});
    const std::size_t n_fwd = occ.size();
    const std::size_t n_rev = rev_it == directed.end() ? 0 : rev_it->second.size();
    if (n_fwd + n_rev > 2) {
      out.push_back({DefectKind::NonManifoldEdge, occ.front().first,
                     "edge (" + std::to_string(undirected.first) + "," +
                         std::to_string(undirected.second) + ") is shared by " +
                         std::to_string(n_fwd + n_rev) + " elements"});
      continue;
    }
    // Two elements of the same panel must traverse a shared edge in
    // opposite directions.
    auto same_dir_same_panel = [](const std::vector<std::pair<int, int>>& o) {
      return o.size() == 2 && o[0].second == o[1].second;
    };
    if (same_dir_same_panel(occ) ||
        (rev_it != directed.end() && same_dir_same_panel(rev_it->second))) {
      out.push_back({DefectKind::InconsistentWinding, occ.front().first,
                     "elements sharing edge (" + std::to_string(undirected.first) + "," +
                         std::to_string(undirected.second) + ") have opposite normals"});
    }
  }

  const char* required[] = {kFixedEdge, kLoadEdge};
  for (const char* name : required) {
    auto it = m.node_sets.find(name);
    if (it == m.node_sets.end() || it->second.empty()) {
      out.push_back({DefectKind::MissingNodeSet, -1,
                     std::string("node set '") + name + "' is missing or empty"});
    }
  }
  auto fixed = m.node_sets.find(kFixedEdge);
  auto load = m.node_sets.find(kLoadEdge);
  if (fixed != m.node_sets.end() && load != m.node_sets.end()) {
    std::unordered_set<int> f(fixed->second.begin(), fixed->second.end());
    for (int v : load->second) {
      if (f.count(v)) {
        out.push_back({DefectKind::OverlappingNodeSets, v,
                       "node " + std::to_string(v) + " is in both fixed_edge and load_edge"});
        break;
      }
    }
  }
  return out;
}

double total_area(const TriMesh& m) {
  double a = 0.0;
  for (std::size_t e = 0; e < m.elements.size(); ++e) a += m.element_area(e);
  return a;
}

BoundingBox bounding_box(const TriMesh& m) {
  BoundingBox bb{Vec3::Constant(0.0), Vec3::Constant(0.0)};
  if (m.nodes.empty()) return bb;
  bb.min = bb.max = m.nodes.front();
  for (const auto& p : m.nodes) {
    bb.min = bb.min.cwiseMin(p);
    bb.max = bb.max.cwiseMax(p);
  }
  return bb;
}

}  // namespace trl::geometry
