#include "trl/grasp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "trl/errors.hpp"
#include "trl/units.hpp"

namespace trl::grasp {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw InvalidInput(msg);
}

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }
bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

const char* to_string(FailureMode m) {
  switch (m) {
    case FailureMode::Slip: return "Slip";
    case FailureMode::Twist: return "Twist";
    case FailureMode::Shear: return "Shear";
  }
  return "?";
}

const char* to_string(Gripper g) { return g == Gripper::Trl ? "TRL" : "Benchmark"; }

Gripper parse_gripper(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "trl") return Gripper::Trl;
  if (s == "benchmark" || s == "sll") return Gripper::Benchmark;
  throw InvalidInput("unknown gripper '" + name + "' (expected trl or benchmark)");
}

void validate(const GraspScenario& s) {
  require(finite_non_negative(s.normal_force_n), "normal force must be >= 0");
  require(finite_non_negative(s.friction), "friction coefficient must be >= 0");
  require(finite_positive(s.contact_radius_mm), "contact radius must be > 0");
  require(finite_positive(s.torsional_stiffness_nmm), "torsional stiffness must be > 0");
  require(finite_non_negative(s.allowed_sag_mm), "allowed sag must be >= 0");
  if (s.shear_stress_pa) require(finite_non_negative(*s.shear_stress_pa), "shear stress must be >= 0");
  if (s.shear_fracture_pa) {
    require(finite_non_negative(*s.shear_fracture_pa), "shear fracture stress must be >= 0");
  }
}

double slip_limit(double friction, double normal_force_n) {
  require(finite_non_negative(friction) && finite_non_negative(normal_force_n),
          "slip_limit: friction and normal force must be >= 0");
  return friction * normal_force_n;
}

double effective_stiffness(double kappa_nmm_per_rad, double radius_mm) {
  require(finite_positive(radius_mm), "contact radius must be > 0");
  require(finite_non_negative(kappa_nmm_per_rad), "torsional stiffness must be >= 0");
  const double r_m = units::mm_to_m(radius_mm);
  return units::nmm_to_nm(kappa_nmm_per_rad) / (r_m * r_m);
}

double twist_limit(double kappa_nmm_per_rad, double radius_mm, double sag_mm) {
  require(finite_non_negative(sag_mm), "allowed sag must be >= 0");
  return effective_stiffness(kappa_nmm_per_rad, radius_mm) * units::mm_to_m(sag_mm);
}

double fit_contact_radius(double kappa_nmm_per_rad, double stiffness_n_per_m) {
  require(finite_positive(kappa_nmm_per_rad) && finite_positive(stiffness_n_per_m),
          "fit_contact_radius: inputs must be > 0");
  return units::m_to_mm(std::sqrt(units::nmm_to_nm(kappa_nmm_per_rad) / stiffness_n_per_m));
}

bool shear_check(std::optional<double> shear_pa, std::optional<double> fracture_pa) {
  if (!shear_pa || !fracture_pa) return true;
  return *shear_pa <= *fracture_pa;
}

PayloadReport payload_capacity(const GraspScenario& s) {
  validate(s);
  PayloadReport r;
  r.slip_limit_n = slip_limit(s.friction, s.normal_force_n);
  r.twist_limit_n = twist_limit(s.torsional_stiffness_nmm, s.contact_radius_mm, s.allowed_sag_mm);
  r.effective_stiffness_n_per_m = effective_stiffness(s.torsional_stiffness_nmm, s.contact_radius_mm);
  r.shear_ok = shear_check(s.shear_stress_pa, s.shear_fracture_pa);
  if (!r.shear_ok) {
    r.capacity_n = 0.0;
    r.governing_mode = FailureMode::Shear;
  } else if (r.slip_limit_n <= r.twist_limit_n) {
    r.capacity_n = r.slip_limit_n;
    r.governing_mode = FailureMode::Slip;
  } else {
    r.capacity_n = r.twist_limit_n;
    r.governing_mode = FailureMode::Twist;
  }
  return r;
}

FeasibilityReport feasibility(double mass_g, Gripper gripper,
                              const std::optional<GraspScenario>& scenario) {
  require(finite_non_negative(mass_g), "object mass must be >= 0");
  FeasibilityReport f;
  f.weight_n = units::grams_to_newtons(mass_g);
  if (scenario) {
    f.capacity_n = payload_capacity(*scenario).capacity_n;
  } else {
    f.capacity_n = units::grams_to_newtons(gripper == Gripper::Trl ? kTrlCapacityGrams
                                                                   : kBenchmarkCapacityGrams);
  }
  f.feasible = f.weight_n <= f.capacity_n;
  f.margin_g = units::newtons_to_grams(f.capacity_n - f.weight_n);
  return f;
}

}  // namespace trl::grasp
