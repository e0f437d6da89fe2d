#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "trl/errors.hpp"
#include "trl/mesh.hpp"

namespace trl::geometry {

/// Raised when a mesh with defects is handed to the exporter.
class MeshDefectError : public InvalidInput {
 public:
  explicit MeshDefectError(std::vector<DefectReport> defects);
  const std::vector<DefectReport>& defects() const { return defects_; }

 private:
  std::vector<DefectReport> defects_;
};

/// Binary STL (little-endian, 80-byte header, uint32 count, 50 bytes per
/// facet). Every panel is thickened by `extrude_mm` symmetrically about its
/// mid-surface into a closed solid with outward normals. Units mm.
std::vector<std::uint8_t> export_stl(const TriMesh& m, double extrude_mm);

/// Facet count stored in a binary STL buffer.
std::uint32_t stl_facet_count(const std::vector<std::uint8_t>& stl);

/// Enclosed signed volume of all facets (divergence theorem), mm^3.
double stl_signed_volume(const std::vector<std::uint8_t>& stl);

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace trl::geometry
