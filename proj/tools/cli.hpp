#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace trl::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kSolverError = 3, kIoError = 4 };

/// Expands "start:stop:step", "start:stop" (step 1) or comma lists of either.
std::vector<double> parse_range(const std::string& text);

/// Settings shared by the subcommands. Every physical quantity carries its
/// unit in the key name; unknown keys are rejected.
struct RunConfig {
  std::optional<std::string> material;
  std::optional<double> youngs_modulus_mpa;
  std::optional<double> poisson_ratio;

  std::optional<double> length_mm;
  std::optional<double> width_mm;
  std::optional<std::vector<double>> thickness_mm;
  std::optional<std::vector<double>> triangles;
  std::optional<double> fin_height_mm;
  std::optional<double> panel_thickness_mm;
  std::optional<double> flange_thickness_mm;
  std::optional<double> apex_ridge_mm;

  std::optional<double> force_n;
  std::optional<double> moment_nmm;
  std::optional<double> tolerance;
  std::optional<double> initial_edge_mm;
  std::optional<double> dof_budget;
  std::optional<double> jobs;

  std::optional<std::string> output_dir;
  std::optional<std::vector<std::string>> formats;

  std::optional<std::string> preset;
  std::optional<double> normal_force_n;
  std::optional<double> friction;
  std::optional<double> contact_radius_mm;
  std::optional<double> kappa_nmm_per_rad;
  std::optional<double> allowed_sag_mm;
  std::optional<double> shear_stress_kpa;
  std::optional<double> shear_fracture_kpa;
  std::optional<double> mass_g;
  std::optional<std::string> gripper;
};

/// Strict parse of a JSON config document. Throws InvalidInput.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

struct GraspPreset {
  double kappa_nmm_per_rad;
  double contact_radius_mm;
  double friction;
  double normal_force_n;
  std::string description;
};

/// Named grasp presets. Aliases map to the same values.
const std::map<std::string, GraspPreset>& grasp_presets();

/// Runs the command line `args` (without the program name). Returns the
/// process exit code; errors are reported as JSON on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trl::cli
