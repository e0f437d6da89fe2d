#pragma once

// Closed-form rectangular-section beam results used as oracles for the shell
// solver and as a fast path for plain strip sweeps.

namespace trl::analytic {

/// Rectangular cross-section, mm. Requires w >= t > 0.
struct RectSection {
  double width_mm = 20.0;
  double thickness_mm = 1.0;
};

void validate(const RectSection& s);

/// Second moment about the weak axis, w t^3 / 12, mm^4.
double second_moment_mm4(const RectSection& s);

/// Saint-Venant torsion constant (w t^3 / 3)(1 - 0.63 (t/w)(1 - t^4 / (12 w^4))), mm^4.
double torsion_constant_mm4(const RectSection& s);

/// Euler-Bernoulli cantilever tip deflection F L^3 / (3 E I), mm.
/// E in Pa, F in N, L in mm.
double cantilever_tip_deflection(const RectSection& s, double length_mm, double youngs_pa,
                                 double force_n);

/// Free-warping twist angle M L / (G J), degrees. G in Pa, M in N*mm.
double rect_torsion_angle(const RectSection& s, double length_mm, double shear_pa,
                          double moment_nmm);

/// In-plane deflection (mm) per twist angle (deg) at the reference loads.
double sll_stiffness_ratio(const RectSection& s, double length_mm, double youngs_pa,
                           double poisson, double force_n = 0.01, double moment_nmm = 0.5);

}  // namespace trl::analytic
