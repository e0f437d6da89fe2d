#include "trl/stl.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

namespace trl::geometry {

namespace {

std::string join_defects(const std::vector<DefectReport>& d) {
  std::string s = "mesh has " + std::to_string(d.size()) + " defect(s)";
  for (const auto& r : d) s += "; " + r.message;
  return s;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<std::uint8_t>& out, double v) {
  put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[off + i]) << (8 * i);
  return v;
}

float get_f32(const std::vector<std::uint8_t>& in, std::size_t off) {
  return std::bit_cast<float>(get_u32(in, off));
}

struct Facet {
  Vec3 a, b, c;
};

void put_facet(std::vector<std::uint8_t>& out, const Facet& f) {
  Vec3 n = (f.b - f.a).cross(f.c - f.a);
  const double len = n.norm();
  if (len > 0.0) n /= len;
  for (int i = 0; i < 3; ++i) put_f32(out, n[i]);
  for (const Vec3* p : {&f.a, &f.b, &f.c})
    for (int i = 0; i < 3; ++i) put_f32(out, (*p)[i]);
  out.push_back(0);
  out.push_back(0);
}

}  // namespace

MeshDefectError::MeshDefectError(std::vector<DefectReport> defects)
    : InvalidInput(join_defects(defects)), defects_(std::move(defects)) {}

std::vector<std::uint8_t> export_stl(const TriMesh& m, double extrude_mm) {
  if (!(extrude_mm > 0.0)) throw InvalidInput("extrude thickness must be > 0");
  auto defects = validate_mesh(m);
  if (!defects.empty()) throw MeshDefectError(std::move(defects));

  const int n_panels = m.panel_count();
  std::vector<std::vector<int>> by_panel(n_panels);
  for (std::size_t e = 0; e < m.elements.size(); ++e) by_panel[m.panel[e]].push_back(static_cast<int>(e));

  std::vector<Facet> facets;
  const double half = 0.5 * extrude_mm;
  for (const auto& elems : by_panel) {
    if (elems.empty()) continue;
    const Vec3 n = m.element_normal(elems.front());
    auto top = [&](int v) -> Vec3 { return m.nodes[v] + half * n; };
    auto bot = [&](int v) -> Vec3 { return m.nodes[v] - half * n; };
    std::set<std::pair<int, int>> directed;
    for (int e : elems) {
      const auto& el = m.elements[e];
      facets.push_back({top(el[0]), top(el[1]), top(el[2])});
      facets.push_back({bot(el[0]), bot(el[2]), bot(el[1])});
      for (int k = 0; k < 3; ++k) directed.insert({el[k], el[(k + 1) % 3]});
    }
    // Boundary edges of the panel: directed edges with no reverse twin.
    for (const auto& [i, j] : directed) {
      if (directed.count({j, i})) continue;
      facets.push_back({bot(i), bot(j), top(j)});
      facets.push_back({bot(i), top(j), top(i)});
    }
  }

  std::vector<std::uint8_t> out;
  out.reserve(84 + 50 * facets.size());
  const char header[] = "trlkit binary STL, units mm";
  std::uint8_t hdr[80] = {};
  std::memcpy(hdr, header, sizeof(header) - 1);
  out.insert(out.end(), hdr, hdr + 80);
  put_u32(out, static_cast<std::uint32_t>(facets.size()));
  for (const auto& f : facets) put_facet(out, f);
  return out;
}

std::uint32_t stl_facet_count(const std::vector<std::uint8_t>& stl) {
  if (stl.size() < 84) throw InvalidInput("buffer too short for binary STL");
  return get_u32(stl, 80);
}

double stl_signed_volume(const std::vector<std::uint8_t>& stl) {
  const std::uint32_t n = stl_facet_count(stl);
  if (stl.size() != 84 + 50ull * n) throw InvalidInput("binary STL size does not match facet count");
  double vol = 0.0;
  for (std::uint32_t t = 0; t < n; ++t) {
    const std::size_t off = 84 + 50ull * t + 12;
    Vec3 p[3];
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i) p[k][i] = get_f32(stl, off + 12 * k + 4 * i);
    vol += p[0].dot(p[1].cross(p[2])) / 6.0;
  }
  return vol;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace trl::geometry
