#pragma once

#include <optional>
#include <string>

namespace trl::grasp {

/// Antipodal grasp scenario in interface units.
struct GraspScenario {
  double normal_force_n = 0.0;
  double friction = 0.0;
  double contact_radius_mm = 0.0;        // neutral axis to object
  double torsional_stiffness_nmm = 0.0;  // N*mm/rad
  double allowed_sag_mm = 0.0;
  std::optional<double> shear_stress_pa;
  std::optional<double> shear_fracture_pa;
};

enum class FailureMode { Slip, Twist, Shear };
const char* to_string(FailureMode m);

struct PayloadReport {
  double slip_limit_n = 0.0;
  double twist_limit_n = 0.0;
  bool shear_ok = true;
  double capacity_n = 0.0;
  FailureMode governing_mode = FailureMode::Slip;
  double effective_stiffness_n_per_m = 0.0;
};

/// Throws InvalidInput unless F_n, mu, x >= 0 and r, kappa > 0.
void validate(const GraspScenario& s);

/// Friction-limited load mu * F_n, N.
double slip_limit(double friction, double normal_force_n);

/// Twist-limited load (kappa / r^2) * x, N.
double twist_limit(double kappa_nmm_per_rad, double radius_mm, double sag_mm);

/// kappa / r^2 in N/m.
double effective_stiffness(double kappa_nmm_per_rad, double radius_mm);

/// r = sqrt(kappa / k) in mm, for a measured grip stiffness k in N/m.
double fit_contact_radius(double kappa_nmm_per_rad, double stiffness_n_per_m);

/// True unless tau strictly exceeds tau_f. Absent values pass.
bool shear_check(std::optional<double> shear_pa, std::optional<double> fracture_pa);

/// Minimum of the slip and twist limits, or zero when the shear check fails.
/// Ties resolve Slip before Twist.
PayloadReport payload_capacity(const GraspScenario& s);

enum class Gripper { Benchmark, Trl };
const char* to_string(Gripper g);
Gripper parse_gripper(const std::string& name);

inline constexpr double kBenchmarkCapacityGrams = 100.0;
inline constexpr double kTrlCapacityGrams = 300.0;

struct FeasibilityReport {
  bool feasible = false;
  double weight_n = 0.0;
  double capacity_n = 0.0;
  /// (capacity - weight) expressed in grams at standard gravity.
  double margin_g = 0.0;
};

/// Compares m * g0 against the gripper's capacity. The capacity defaults to
/// the documented mass limit of each gripper; a scenario overrides it.
FeasibilityReport feasibility(double mass_g, Gripper gripper,
                              const std::optional<GraspScenario>& scenario = std::nullopt);

}  // namespace trl::grasp
