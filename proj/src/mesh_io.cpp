#include "trl/mesh_io.hpp"

#include "trl/errors.hpp"

namespace trl::geometry {

nlohmann::json mesh_to_json(const TriMesh& m) {
  nlohmann::json j;
  j["units"] = "mm";
  auto& nodes = j["nodes"] = nlohmann::json::array();
  for (const auto& p : m.nodes) nodes.push_back({p.x(), p.y(), p.z()});
  auto& elems = j["elements"] = nlohmann::json::array();
  for (const auto& e : m.elements) elems.push_back({e[0], e[1], e[2]});
  j["thickness"] = m.thickness;
  j["panel"] = m.panel;
  j["node_sets"] = m.node_sets;
  j["element_sets"] = m.element_sets;
  return j;
}

TriMesh mesh_from_json(const nlohmann::json& j) {
  try {
    TriMesh m;
    for (const auto& p : j.at("nodes")) {
      m.nodes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    }
    for (const auto& e : j.at("elements")) {
      m.elements.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()});
    }
    m.thickness = j.at("thickness").get<std::vector<double>>();
    m.panel = j.contains("panel") ? j.at("panel").get<std::vector<int>>()
                                  : std::vector<int>(m.elements.size(), 0);
    if (j.contains("node_sets")) {
      m.node_sets = j.at("node_sets").get<std::map<std::string, std::vector<int>>>();
    }
    if (j.contains("element_sets")) {
      m.element_sets = j.at("element_sets").get<std::map<std::string, std::vector<int>>>();
    }
    if (m.thickness.size() != m.elements.size() || m.panel.size() != m.elements.size()) {
      throw InvalidInput("mesh json: thickness/panel arrays must match element count");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("mesh json: ") + e.what());
  }
}

}  // namespace trl::geometry
