#include "trl/fea_io.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "trl/errors.hpp"

namespace trl::fea {

namespace {

// JSON has no NaN; absent values become null.
nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json result_to_json(const FeaResult& r, bool include_fields) {
  nlohmann::json j;
  j["load"] = {{"kind", to_string(r.load.kind)},
               {"magnitude", r.load.magnitude},
               {"unit", r.load.kind == LoadKind::InPlaneTipForce ? "N" : "N*mm"}};
  j["tip_inplane_displacement_mm"] = r.tip_inplane_displacement_mm;
  j["angular_displacement_deg"] = r.angular_displacement_deg;
  j["rotational_stiffness_nmm_per_rad"] =
      r.rotational_stiffness_nmm_per_rad ? nlohmann::json(*r.rotational_stiffness_nmm_per_rad)
                                         : nlohmann::json(nullptr);
  j["stress_concentration_factor"] = number_or_null(r.stress_concentration_factor);
  j["strain_energy_j"] = r.strain_energy_j;
  j["diagnostics"] = {{"dof_count", r.diagnostics.dof_count},
                      {"free_dof_count", r.diagnostics.free_dof_count},
                      {"residual_norm", r.diagnostics.residual_norm},
                      {"method", r.diagnostics.method},
                      {"iterations", r.diagnostics.iterations}};
  auto& hist = j["refinement_history"] = nlohmann::json::array();
  for (const auto& lvl : r.refinement_history) {
    hist.push_back({{"level", lvl.level},
                    {"target_edge_mm", lvl.target_edge_mm},
                    {"dof_count", lvl.dof_count},
                    {"monitored", lvl.monitored},
                    {"relative_change", number_or_null(lvl.relative_change)}});
  }
  if (include_fields) {
    auto& disp = j["node_displacements"] = nlohmann::json::array();
    for (const auto& d : r.displacements) disp.push_back(d);
    j["node_displacement_units"] = {"mm", "mm", "mm", "rad", "rad", "rad"};
    j["element_von_mises_pa"] = r.von_mises_pa;
  }
  return j;
}

void write_vtk(std::ostream& os, const FeaResult& r, const std::string& title) {
  if (!r.mesh) throw InvalidInput("write_vtk: result carries no mesh");
  const auto& m = *r.mesh;
  fmt::print(os, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET UNSTRUCTURED_GRID\n", title);
  fmt::print(os, "POINTS {} double\n", m.nodes.size());
  for (const auto& p : m.nodes) fmt::print(os, "{:.9g} {:.9g} {:.9g}\n", p.x(), p.y(), p.z());
  fmt::print(os, "CELLS {} {}\n", m.elements.size(), 4 * m.elements.size());
  for (const auto& e : m.elements) fmt::print(os, "3 {} {} {}\n", e[0], e[1], e[2]);
  fmt::print(os, "CELL_TYPES {}\n", m.elements.size());
  for (std::size_t i = 0; i < m.elements.size(); ++i) os << "5\n";
  if (r.displacements.size() == m.nodes.size()) {
    fmt::print(os, "POINT_DATA {}\nVECTORS displacement_mm double\n", m.nodes.size());
    for (const auto& d : r.displacements) fmt::print(os, "{:.9g} {:.9g} {:.9g}\n", d[0], d[1], d[2]);
  }
  if (r.von_mises_pa.size() == m.elements.size()) {
    fmt::print(os, "CELL_DATA {}\nSCALARS von_mises_pa double 1\nLOOKUP_TABLE default\n",
               m.elements.size());
    for (double s : r.von_mises_pa) fmt::print(os, "{:.9g}\n", s);
  }
}

}  // namespace trl::fea
