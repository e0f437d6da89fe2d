#include "trl/analytic.hpp"

#include <cmath>

#include "trl/errors.hpp"
#include "trl/units.hpp"

namespace trl::analytic {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be positive and finite");
  }
}

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + " must be non-negative and finite");
  }
}

}  // namespace

void validate(const RectSection& s) {
  require_positive(s.thickness_mm, "section thickness");
  if (!(s.width_mm >= s.thickness_mm)) throw InvalidInput("section width must be >= thickness");
}

double second_moment_mm4(const RectSection& s) {
  validate(s);
  return s.width_mm * std::pow(s.thickness_mm, 3) / 12.0;
}

double torsion_constant_mm4(const RectSection& s) {
  validate(s);
  const double w = s.width_mm, t = s.thickness_mm;
  const double ratio = t / w;
  return w * t * t * t / 3.0 * (1.0 - 0.63 * ratio * (1.0 - std::pow(ratio, 4) / 12.0));
}

double cantilever_tip_deflection(const RectSection& s, double length_mm, double youngs_pa,
                                 double force_n) {
  require_positive(length_mm, "length");
  require_positive(youngs_pa, "Young's modulus");
  require_non_negative(force_n, "force");
  // N / (N/mm^2 * mm^4) * mm^3 = mm
  const double e_mpa = units::pa_to_mpa(youngs_pa);
  return force_n * std::pow(length_mm, 3) / (3.0 * e_mpa * second_moment_mm4(s));
}

double rect_torsion_angle(const RectSection& s, double length_mm, double shear_pa,
                          double moment_nmm) {
  require_positive(length_mm, "length");
  require_positive(shear_pa, "shear modulus");
  require_non_negative(moment_nmm, "moment");
  const double g_mpa = units::pa_to_mpa(shear_pa);
  return units::rad_to_deg(moment_nmm * length_mm / (g_mpa * torsion_constant_mm4(s)));
}

double sll_stiffness_ratio(const RectSection& s, double length_mm, double youngs_pa,
                           double poisson, double force_n, double moment_nmm) {
  if (!(poisson >= 0.0 && poisson < 0.5)) throw InvalidInput("Poisson ratio must lie in [0, 0.5)");
  require_positive(force_n, "reference force");
  require_positive(moment_nmm, "reference moment");
  const double shear = youngs_pa / (2.0 * (1.0 + poisson));
  return cantilever_tip_deflection(s, length_mm, youngs_pa, force_n) /
         rect_torsion_angle(s, length_mm, shear, moment_nmm);
}

}  // namespace trl::analytic
