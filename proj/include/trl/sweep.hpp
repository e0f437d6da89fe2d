#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trl/fea.hpp"
#include "trl/geometry.hpp"
#include "trl/material.hpp"

namespace trl::sweep {

enum class Family { Sll, Trl };
const char* to_string(Family f);
Family parse_family(const std::string& s);

struct SweepPlan {
  Family family = Family::Trl;
  /// Thickness in mm for SLL, triangle count for TRL. Strictly increasing.
  std::vector<double> grid;
  double force_n = fea::kDefaultTipForceN;
  double moment_nmm = fea::kDefaultTrlMomentNmm;
  material::Material material;
  fea::ConvergeOptions converge;
  /// Design points evaluated at once; 0 uses every available thread.
  int parallelism = 0;
  geometry::SllSpec sll_base;
  geometry::TrlSpec trl_base;
};

/// Thickness 0.3..1.0 by 0.1 with the 0.5 N*mm moment.
SweepPlan default_sll_plan();
/// Triangle counts 2..30 with the 5 N*mm moment.
SweepPlan default_trl_plan();

enum class RowStatus { Ok, Unconverged, Failed };
const char* to_string(RowStatus s);

struct SweepRow {
  Family family = Family::Trl;
  double param = 0.0;
  double in_plane_mm = 0.0;
  double angular_deg = 0.0;
  double kappa_nmm_per_rad = 0.0;
  /// kappa recomputed from a second moment a tenth the size.
  double kappa_check_nmm_per_rad = 0.0;
  double scf = 0.0;
  std::size_t dof = 0;
  RowStatus status = RowStatus::Ok;
  std::string message;

  // Provenance.
  double final_edge_mm = 0.0;
  int levels = 0;
  double last_relative_change = 0.0;
  double tolerance = 0.0;
  std::string material;
  /// Wall time, excluded from deterministic outputs.
  double solve_seconds = 0.0;
};

struct SweepTable {
  Family family = Family::Trl;
  double force_n = 0.0;
  double moment_nmm = 0.0;
  std::string material;
  double youngs_modulus_pa = 0.0;
  double poisson_ratio = 0.0;
  double tolerance = 0.0;
  double initial_edge_mm = 0.0;
  std::size_t dof_budget = 0;
  std::vector<SweepRow> rows;  // sorted by param
};

void validate(const SweepPlan& plan);

/// Converges every grid point under the tip force and both moments. Rows
/// that fail are kept with a status; the sweep itself never aborts on them.
SweepTable run_sweep(const SweepPlan& plan);

/// One design point, as run_sweep evaluates it.
SweepRow evaluate_point(const SweepPlan& plan, double param);

enum class Metric { InPlane, Angular };
const char* to_string(Metric m);
double metric_value(const SweepRow& row, Metric m);

struct ShapeReport {
  Metric metric = Metric::InPlane;
  bool left_end_is_local_max = false;
  bool right_end_is_local_max = false;
  /// Largest value sits at one of the two endpoints.
  bool global_max_at_endpoint = false;
  std::optional<double> interior_min_param;
  std::optional<double> interior_min_value;
  double argmax_param = 0.0;
  bool swoosh() const {
    return left_end_is_local_max && right_end_is_local_max && interior_min_param.has_value();
  }
  std::string summary() const;
};

/// Shape of one metric over the usable rows; needs at least three of them.
ShapeReport swoosh_check(const SweepTable& table, Metric metric);

enum class Objective { MaxInPlane, MaxTorsionResistance, CyclicLife };
const char* to_string(Objective o);
Objective parse_objective(const std::string& s);

struct Selection {
  Objective objective = Objective::MaxInPlane;
  double param = 0.0;
  std::string rationale;
};

inline constexpr double kDefaultCyclicLifeThreshold = 0.15;

/// Ties go to the larger triangle count. CyclicLife picks the lowest SCF among
/// designs whose twist is within `threshold` (relative) of the best one.
Selection select_design(const SweepTable& table, Objective objective,
                        double threshold = kDefaultCyclicLifeThreshold);

struct FamilyComparison {
  double kappa_ratio = 0.0;
  /// Reduction of twist per unit moment, percent.
  double angular_reduction_pct = 0.0;
};

FamilyComparison compare_families(double kappa_sll, double kappa_trl);
FamilyComparison compare_families(const SweepRow& sll, const SweepRow& trl);

}  // namespace trl::sweep
