#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace trl::geometry {

using Vec3 = Eigen::Vector3d;

inline constexpr const char* kFixedEdge = "fixed_edge";
inline constexpr const char* kLoadEdge = "load_edge";
inline constexpr const char* kTipCenterA = "tip_center_A";
inline constexpr const char* kTipEdgeB = "tip_edge_B";
inline constexpr const char* kLoadAdjacent = "load_adjacent";

/// Triangulated mid-surface shell. Coordinates and thicknesses in mm.
///
/// `panel[e]` groups elements that lie on one flat face of the part; winding
/// is consistent inside a panel and the panel normal is the element normal.
struct TriMesh {
  std::vector<Vec3> nodes;
  std::vector<std::array<int, 3>> elements;
  std::vector<double> thickness;
  std::vector<int> panel;
  std::map<std::string, std::vector<int>> node_sets;
  std::map<std::string, std::vector<int>> element_sets;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t element_count() const { return elements.size(); }

  /// Throws InvalidInput if the set is missing.
  const std::vector<int>& node_set(const std::string& name) const;
  const std::vector<int>& element_set(const std::string& name) const;
  /// Single node of a one-node set (tip_center_A, tip_edge_B).
  int node_of(const std::string& name) const;

  double element_area(std::size_t e) const;
  Vec3 element_normal(std::size_t e) const;  // unit, right-hand winding
  int panel_count() const;
};

enum class DefectKind {
  BadElementIndex,
  DanglingNode,
  NonManifoldEdge,
  ZeroAreaElement,
  InconsistentWinding,
  MissingNodeSet,
  OverlappingNodeSets,
};

struct DefectReport {
  DefectKind kind;
  int index;  // element, node or panel index; -1 when not applicable
  std::string message;
};

const char* to_string(DefectKind kind);

/// Lists every violated mesh invariant. Never throws.
std::vector<DefectReport> validate_mesh(const TriMesh& m);

/// Sum of element areas, mm^2.
double total_area(const TriMesh& m);

struct BoundingBox {
  Vec3 min;
  Vec3 max;
};
BoundingBox bounding_box(const TriMesh& m);

}  // namespace trl::geometry
