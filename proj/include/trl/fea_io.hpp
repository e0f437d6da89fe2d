#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "trl/fea.hpp"

namespace trl::fea {

/// Scalars, diagnostics, refinement history, per-node displacement (mm, rad)
/// and per-element von Mises stress (Pa).
nlohmann::json result_to_json(const FeaResult& r, bool include_fields = true);

/// Legacy ASCII VTK unstructured grid with displacement point data and von
/// Mises cell data. Coordinates in mm.
void write_vtk(std::ostream& os, const FeaResult& r, const std::string& title = "trlkit result");

}  // namespace trl::fea
