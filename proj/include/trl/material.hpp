#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trl::material {

/// Isotropic linear-elastic record. All values SI.
///
/// The shear modulus is never stored; use shear_modulus().
struct Material {
  std::string name;
  double youngs_modulus = 0.0;  // Pa
  double poisson_ratio = 0.0;
  std::optional<double> density;                // kg/m^3, informational
  std::optional<double> shear_fracture_stress;  // Pa
  std::optional<double> static_friction;
};

/// Validates and returns a material; throws InvalidInput when E <= 0 or
/// nu is outside [0, 0.5).
Material make_material(std::string name, double youngs_modulus, double poisson_ratio,
                       std::optional<double> density = std::nullopt,
                       std::optional<double> shear_fracture_stress = std::nullopt,
                       std::optional<double> static_friction = std::nullopt);

void validate(const Material& m);

/// G = E / (2 (1 + nu)), Pa.
double shear_modulus(const Material& m);

/// Recovers E (Pa) from one cantilever measurement: E = F L^3 / (3 delta I),
/// I = w t^3 / 12. Lengths in mm, load in N.
double calibrate_modulus(double thickness_mm, double displacement_mm, double load_n,
                         double length_mm, double width_mm);

/// PA-6 with E recovered from the reference SLL bending table.
Material pa6();
Material pla();
/// Gripping-layer silicone. Only used by the grasp model.
Material ecoflex_00_30();

/// Looks up "PA6", "PLA" or "Ecoflex00-30" (case-insensitive).
Material builtin(std::string_view name);
std::vector<std::string> builtin_names();

}  // namespace trl::material
