#include "trl/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <unordered_map>

#include "trl/errors.hpp"

namespace trl::geometry {

namespace {

// Panels whose longest-edge^2 / (2 * area) exceeds this are rejected.
constexpr double kMaxPanelAspect = 50.0;

int ceil_div(double extent, double target) {
  return std::max(1, static_cast<int>(std::ceil(extent / target - 1e-9)));
}

int even_ceil_div(double extent, double target) {
  return 2 * std::max(1, static_cast<int>(std::ceil(extent / (2.0 * target) - 1e-9)));
}

/// Accumulates nodes and elements, merging coincident nodes.
class MeshBuilder {
 public:
  explicit MeshBuilder(double merge_tol) : tol_(merge_tol), cell_(merge_tol * 16.0) {}

  int node(const Vec3& p) {
    const auto key = cell_of(p);
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid_.find(Key{std::get<0>(key) + dx, std::get<1>(key) + dy,
                                   std::get<2>(key) + dz});
          if (it == grid_.end()) continue;
          for (int idx : it->second) {
            if ((mesh_.nodes[idx] - p).norm() <= tol_) return idx;
          }
        }
    const int idx = static_cast<int>(mesh_.nodes.size());
    mesh_.nodes.push_back(p);
    grid_[key].push_back(idx);
    return idx;
  }

  void element(int a, int b, int c, double thickness, int panel) {
    mesh_.elements.push_back({a, b, c});
    mesh_.thickness.push_back(thickness);
    mesh_.panel.push_back(panel);
  }

  /// Layered triangulation of the flat quadrilateral a-b-tb-ta (a triangle when
  /// ta == tb and top_segments == 0). The base a-b carries exactly
  /// `base_segments` segments and the top edge `top_segments`; `rows` layers
  /// connect them with the segment count interpolated in between.
  void layered_panel(const Vec3& a, const Vec3& b, const Vec3& tb, const Vec3& ta,
                     int base_segments, int top_segments, int rows, double thickness, int panel) {
    std::vector<int> prev, cur;
    std::vector<double> prev_u, cur_u;
    auto make_row = [&](int k, std::vector<int>& ids, std::vector<double>& us) {
      ids.clear();
      us.clear();
      const double f = static_cast<double>(k) / rows;
      const Vec3 left = a + (ta - a) * f;
      const Vec3 right = b + (tb - b) * f;
      int s = base_segments;
      if (k == rows) {
        s = top_segments;
      } else if (k > 0) {
        s = std::max(1, static_cast<int>(std::lround(base_segments + (top_segments - base_segments) * f)));
      }
      if (s == 0) {
        ids.push_back(node(left));
        us.push_back(0.5);
        return;
      }
      for (int j = 0; j <= s; ++j) {
        const double u = static_cast<double>(j) / s;
        ids.push_back(node(left + (right - left) * u));
        us.push_back(u);
      }
    };
    make_row(0, prev, prev_u);
    for (int k = 1; k <= rows; ++k) {
      make_row(k, cur, cur_u);
      // Zipper between the two rows, advancing whichever lags.
      std::size_t i = 0, j = 0;
      const std::size_t ni = prev.size() - 1, nj = cur.size() - 1;
      while (i < ni || j < nj) {
        const bool advance_lower = j == nj || (i < ni && prev_u[i + 1] <= cur_u[j + 1]);
        if (advance_lower) {
          element(prev[i], prev[i + 1], cur[j], thickness, panel);
          ++i;
        } else {
          element(prev[i], cur[j + 1], cur[j], thickness, panel);
          ++j;
        }
      }
      prev.swap(cur);
      prev_u.swap(cur_u);
    }
  }

  TriMesh& mesh() { return mesh_; }

 private:
  using Key = std::tuple<long long, long long, long long>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      const auto h1 = std::hash<long long>{}(std::get<0>(k));
      const auto h2 = std::hash<long long>{}(std::get<1>(k));
      const auto h3 = std::hash<long long>{}(std::get<2>(k));
      return h1 ^ (h2 * 0x9e3779b97f4a7c15ULL) ^ (h3 * 0xc2b2ae3d27d4eb4fULL);
    }
  };
  Key cell_of(const Vec3& p) const {
    return {std::llround(p.x() / cell_), std::llround(p.y() / cell_), std::llround(p.z() / cell_)};
  }

  double tol_;
  double cell_;
  TriMesh mesh_;
  std::unordered_map<Key, std::vector<int>, KeyHash> grid_;
};

int nearest_node(const TriMesh& m, const Vec3& p) {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    const double d = (m.nodes[i] - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

void label_sets(TriMesh& m, double length, double width) {
  const double eps = 1e-6 * length;
  std::vector<int> fixed, load;
  for (std::size_t i = 0; i < m.nodes.size(); ++i) {
    if (std::abs(m.nodes[i].x()) <= eps) fixed.push_back(static_cast<int>(i));
    if (std::abs(m.nodes[i].x() - length) <= eps) load.push_back(static_cast<int>(i));
  }
  m.node_sets[kFixedEdge] = std::move(fixed);
  m.node_sets[kTipCenterA] = {nearest_node(m, Vec3(length, 0.0, 0.0))};
  m.node_sets[kTipEdgeB] = {nearest_node(m, Vec3(length, 0.5 * width, 0.0))};

  std::vector<char> on_load(m.nodes.size(), 0);
  for (int v : load) on_load[v] = 1;
  std::vector<int> adjacent;
  for (std::size_t e = 0; e < m.elements.size(); ++e) {
    const auto& el = m.elements[e];
    if (on_load[el[0]] || on_load[el[1]] || on_load[el[2]]) adjacent.push_back(static_cast<int>(e));
  }
  m.node_sets[kLoadEdge] = std::move(load);
  m.element_sets[kLoadAdjacent] = std::move(adjacent);
}

/// Structured flange grid over x-stations `xs` and `ny` equal y-divisions,
/// alternating diagonals in a checkerboard.
void flange_grid(MeshBuilder& b, const std::vector<double>& xs, double width, int ny,
                 double thickness, int panel) {
  const int nx = static_cast<int>(xs.size()) - 1;
  std::vector<int> ids((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = -0.5 * width + width * static_cast<double>(j) / ny;
    for (int i = 0; i <= nx; ++i) ids[j * (nx + 1) + i] = b.node(Vec3(xs[i], y, 0.0));
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = ids[j * (nx + 1) + i];
      const int n10 = ids[j * (nx + 1) + i + 1];
      const int n01 = ids[(j + 1) * (nx + 1) + i];
      const int n11 = ids[(j + 1) * (nx + 1) + i + 1];
      if ((i + j) % 2 == 0) {
        b.element(n00, n10, n11, thickness, panel);
        b.element(n00, n11, n01, thickness, panel);
      } else {
        b.element(n00, n10, n01, thickness, panel);
        b.element(n10, n11, n01, thickness, panel);
      }
    }
  }
}

}  // namespace

double TrlSpec::alpha_deg() const {
  return std::atan(2.0 * fin_height() / pitch()) * 180.0 / 3.14159265358979323846;
}

double TrlSpec::slant() const { return std::hypot(0.5 * width_mm, fin_height()); }

std::vector<double> TrlSpec::apex_positions() const {
  std::vector<double> xs;
  for (int i = 0; i < triangle_count; ++i) xs.push_back((i + 0.5) * pitch());
  return xs;
}

void validate(const SllSpec& s) {
  if (!(s.length_mm > 0.0) || !(s.width_mm > 0.0) || !(s.thickness_mm > 0.0)) {
    throw InvalidInput("SLL spec requires positive length, width and thickness");
  }
}

bool validate(const TrlSpec& s) {
  if (s.triangle_count < 1) throw InvalidInput("TRL spec requires triangle_count >= 1");
  if (!(s.length_mm > 0.0) || !(s.width_mm > 0.0)) {
    throw InvalidInput("TRL spec requires positive length and width");
  }
  if (!(s.fin_height() > 0.0)) throw InvalidInput("TRL spec requires fin height > 0");
  if (s.apex_ridge() < 0.0 || s.apex_ridge() >= s.pitch()) {
    throw InvalidInput("TRL apex ridge must lie in [0, pitch)");
  }
  if (!(s.panel_thickness_mm > 0.0) || !(s.flange_thickness() > 0.0)) {
    throw InvalidInput("TRL spec requires positive panel and flange thickness");
  }
  return s.triangle_count < 2 || s.triangle_count > 30;
}

TriMesh build_sll_mesh(const SllSpec& spec, double target_edge_mm) {
  validate(spec);
  if (!(target_edge_mm > 0.0) || target_edge_mm > std::min(spec.length_mm, spec.width_mm)) {
    throw InvalidInput("target edge must lie in (0, min(length, width)]");
  }
  const int nx = ceil_div(spec.length_mm, target_edge_mm);
  const int ny = even_ceil_div(spec.width_mm, target_edge_mm);
  MeshBuilder b(1e-7 * spec.length_mm);
  std::vector<double> xs(nx + 1);
  for (int i = 0; i <= nx; ++i) xs[i] = spec.length_mm * static_cast<double>(i) / nx;
  flange_grid(b, xs, spec.width_mm, ny, spec.thickness_mm, 0);
  TriMesh m = std::move(b.mesh());
  label_sets(m, spec.length_mm, spec.width_mm);
  return m;
}

TriMesh build_trl_mesh(const TrlSpec& spec, double target_edge_mm) {
  validate(spec);
  if (!(target_edge_mm > 0.0)) throw InvalidInput("target edge must be > 0");
  const int tn = spec.triangle_count;
  const double len = spec.length_mm;
  const double half_w = 0.5 * spec.width_mm;
  const double h = spec.fin_height();
  const double d = spec.pitch();

  const int base_segments = ceil_div(d, target_edge_mm);
  const int rows = ceil_div(spec.slant(), target_edge_mm);
  const int ny = even_ceil_div(spec.width_mm, target_edge_mm);

  MeshBuilder b(1e-7 * len);
  std::vector<double> xs;
  xs.reserve(tn * base_segments + 1);
  for (int bay = 0; bay < tn; ++bay) {
    for (int k = 0; k < base_segments; ++k) {
      xs.push_back(len * (bay * base_segments + k) / static_cast<double>(tn * base_segments));
    }
  }
  xs.push_back(len);
  flange_grid(b, xs, spec.width_mm, ny, spec.flange_thickness(), 0);

  const double ridge = spec.apex_ridge();
  const int ridge_segments = ridge > 0.0 ? ceil_div(ridge, target_edge_mm) : 0;
  for (int bay = 0; bay < tn; ++bay) {
    const double x0 = len * bay / static_cast<double>(tn);
    const double x1 = len * (bay + 1) / static_cast<double>(tn);
    const double xc = (bay + 0.5) * d;
    const Vec3 ridge_lo(xc - 0.5 * ridge, 0.0, -h), ridge_hi(xc + 0.5 * ridge, 0.0, -h);
    const int panel_pos = 1 + 2 * bay, panel_neg = 2 + 2 * bay;
    const std::array<std::tuple<Vec3, Vec3, Vec3, Vec3, int>, 2> faces{{
        {Vec3(x0, half_w, 0.0), Vec3(x1, half_w, 0.0), ridge_hi, ridge_lo, panel_pos},
        {Vec3(x1, -half_w, 0.0), Vec3(x0, -half_w, 0.0), ridge_lo, ridge_hi, panel_neg},
    }};
    for (const auto& [pa, pb, tb, ta, id] : faces) {
      const double longest = std::max({(pb - pa).norm(), (ta - pa).norm(), (tb - pb).norm()});
      const double area = 0.5 * (pb - pa).cross(ta - pa).norm() + 0.5 * (tb - pb).cross(ta - pb).norm();
      if (longest * longest / (2.0 * area) > kMaxPanelAspect) {
        throw MeshingError("panel " + std::to_string(id) + " (bay " + std::to_string(bay) +
                           ") exceeds the mesher aspect-ratio limit");
      }
      b.layered_panel(pa, pb, tb, ta, base_segments, ridge_segments, rows, spec.panel_thickness_mm, id);
    }
  }

  TriMesh m = std::move(b.mesh());
  label_sets(m, len, spec.width_mm);
  return m;
}

TriMesh build_mesh(const MeshableSpec& spec, double target_edge_mm) {
  return std::visit(
      [&](const auto& s) -> TriMesh {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, SllSpec>) {
          return build_sll_mesh(s, target_edge_mm);
        } else {
          return build_trl_mesh(s, target_edge_mm);
        }
      },
      spec);
}

double trl_nominal_area(const TrlSpec& spec) {
  const double d = spec.pitch();
  return 2.0 * spec.triangle_count * (0.5 * (d + spec.apex_ridge()) * spec.slant()) +
         spec.length_mm * spec.width_mm;
}

}  // namespace trl::geometry
