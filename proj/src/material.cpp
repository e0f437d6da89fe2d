#include "trl/material.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "trl/errors.hpp"

namespace trl::material {

void validate(const Material& m) {
  if (!(m.youngs_modulus > 0.0) || !std::isfinite(m.youngs_modulus)) {
    throw InvalidInput("material '" + m.name + "': youngs_modulus must be > 0");
  }
  if (!(m.poisson_ratio >= 0.0 && m.poisson_ratio < 0.5)) {
    throw InvalidInput("material '" + m.name + "': poisson_ratio must lie in [0, 0.5)");
  }
  if (m.density && !(*m.density > 0.0)) {
    throw InvalidInput("material '" + m.name + "': density must be > 0");
  }
  if (m.shear_fracture_stress && !(*m.shear_fracture_stress >= 0.0)) {
    throw InvalidInput("material '" + m.name + "': shear_fracture_stress must be >= 0");
  }
  if (m.static_friction && !(*m.static_friction >= 0.0)) {
    throw InvalidInput("material '" + m.name + "': static_friction must be >= 0");
  }
}

Material make_material(std::string name, double youngs_modulus, double poisson_ratio,
                       std::optional<double> density, std::optional<double> shear_fracture_stress,
                       std::optional<double> static_friction) {
  Material m{std::move(name), youngs_modulus, poisson_ratio, density, shear_fracture_stress,
             static_friction};
  validate(m);
  return m;
}

double shear_modulus(const Material& m) {
  return m.youngs_modulus / (2.0 * (1.0 + m.poisson_ratio));
}

double calibrate_modulus(double thickness_mm, double displacement_mm, double load_n,
                         double length_mm, double width_mm) {
  if (!(thickness_mm > 0.0) || !(displacement_mm > 0.0) || !(load_n > 0.0) ||
      !(length_mm > 0.0) || !(width_mm > 0.0)) {
    throw InvalidInput("calibrate_modulus: all inputs must be positive");
  }
  const double t = thickness_mm * 1e-3;
  const double w = width_mm * 1e-3;
  const double len = length_mm * 1e-3;
  const double delta = displacement_mm * 1e-3;
  const double inertia = w * t * t * t / 12.0;
  return load_n * len * len * len / (3.0 * delta * inertia);
}

Material pa6() {
  // 1.0 mm strip, 100 x 20 mm, 0.01 N tip load, 1.75 mm deflection.
  const double e = calibrate_modulus(1.0, 1.75, 0.01, 100.0, 20.0);
  return make_material("PA6", e, 0.39, 1140.0);
}

Material pla() { return make_material("PLA", 3.5e9, 0.36, 1240.0); }

Material ecoflex_00_30() {
  // Shear fracture taken as tensile strength / sqrt(3); approximate.
  return make_material("Ecoflex00-30", 0.1e6, 0.49, 1070.0, 0.8e6, 1.0);
}

namespace {
std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}
}  // namespace

Material builtin(std::string_view name) {
  const auto key = lower(name);
  if (key == "pa6" || key == "pa-6") return pa6();
  if (key == "pla") return pla();
  if (key == "ecoflex00-30" || key == "ecoflex") return ecoflex_00_30();
  throw InvalidInput("unknown material '" + std::string(name) + "'");
}

std::vector<std::string> builtin_names() { return {"PA6", "PLA", "Ecoflex00-30"}; }

}  // namespace trl::material
