#pragma once

#include <optional>
#include <variant>

#include "trl/mesh.hpp"

namespace trl::geometry {

/// Plain rectangular strain-limiting strip. mm.
struct SllSpec {
  double length_mm = 100.0;
  double width_mm = 20.0;
  double thickness_mm = 1.0;
};

/// Triangulated V-girder layer: a flange strip between two top chords with
/// pairs of oblique triangular panels ("teeth") hanging to an apex line.
struct TrlSpec {
  double length_mm = 100.0;
  double width_mm = 20.0;
  int triangle_count = 30;
  /// Defaults to 10% of the length plus 2 mm bonding allowance.
  std::optional<double> fin_height_mm;
  double panel_thickness_mm = 1.0;
  /// Defaults to panel_thickness_mm.
  std::optional<double> flange_thickness_mm;
  /// Length along x over which the two panels of a bay are fused at the
  /// bottom. Zero gives sharp apex points, where the panels touch at a single
  /// node and the twist angle grows without bound under mesh refinement.
  /// Defaults to panel_thickness_mm.
  std::optional<double> apex_ridge_mm;

  double fin_height() const { return fin_height_mm.value_or(0.10 * length_mm + 2.0); }
  double flange_thickness() const { return flange_thickness_mm.value_or(panel_thickness_mm); }
  double apex_ridge() const { return apex_ridge_mm.value_or(panel_thickness_mm); }
  double pitch() const { return length_mm / triangle_count; }
  /// Base-to-side angle of each triangle in the side elevation, degrees.
  double alpha_deg() const;
  /// Slant height of a panel: chord to apex line.
  double slant() const;
  /// Apex x coordinates, mm.
  std::vector<double> apex_positions() const;
};

using MeshableSpec = std::variant<SllSpec, TrlSpec>;

void validate(const SllSpec& s);
/// Throws for hard violations. Returns true if triangle_count is outside
/// the studied 2..30 range (allowed, caller may warn).
bool validate(const TrlSpec& s);

inline constexpr double kDefaultTargetEdgeMm = 2.0;

/// Structured flat strip in z = 0, x in [0, L], y in [-W/2, W/2].
TriMesh build_sll_mesh(const SllSpec& spec, double target_edge_mm = kDefaultTargetEdgeMm);

/// Flange plus 2*T_n oblique panels. Each flat face is meshed by layered
/// subdivision; chord nodes are shared with the flange grid.
TriMesh build_trl_mesh(const TrlSpec& spec, double target_edge_mm = kDefaultTargetEdgeMm);

TriMesh build_mesh(const MeshableSpec& spec, double target_edge_mm);

/// Closed-form panel plus flange area, mm^2. Each panel is a triangle of
/// base pitch and height slant, widened at the apex by the ridge length.
double trl_nominal_area(const TrlSpec& spec);

}  // namespace trl::geometry
