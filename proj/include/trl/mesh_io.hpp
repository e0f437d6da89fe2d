#pragma once

#include <nlohmann/json.hpp>

#include "trl/mesh.hpp"

namespace trl::geometry {

/// {"units":"mm","nodes":[[x,y,z]..],"elements":[[a,b,c]..],"thickness":[..],
///  "panel":[..],"node_sets":{..},"element_sets":{..}}
nlohmann::json mesh_to_json(const TriMesh& m);

/// Inverse of mesh_to_json; throws InvalidInput on malformed documents.
TriMesh mesh_from_json(const nlohmann::json& j);

}  // namespace trl::geometry
