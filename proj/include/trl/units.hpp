#pragma once

#include <numbers>

// Internal computations are SI (m, N, Pa, rad). Interfaces speak mm, N*mm,
// kPa and degrees; these helpers are the only place conversion happens.
namespace trl::units {

inline constexpr double kMmPerM = 1000.0;
inline constexpr double kStandardGravity = 9.81;  // m/s^2

constexpr double mm_to_m(double mm) { return mm / kMmPerM; }
constexpr double m_to_mm(double m) { return m * kMmPerM; }
constexpr double nmm_to_nm(double nmm) { return nmm / kMmPerM; }
constexpr double nm_to_nmm(double nm) { return nm * kMmPerM; }
constexpr double kpa_to_pa(double kpa) { return kpa * 1.0e3; }
constexpr double pa_to_kpa(double pa) { return pa / 1.0e3; }
constexpr double mpa_to_pa(double mpa) { return mpa * 1.0e6; }
constexpr double pa_to_mpa(double pa) { return pa / 1.0e6; }
constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
constexpr double grams_to_newtons(double g) { return g / 1000.0 * kStandardGravity; }
constexpr double newtons_to_grams(double n) { return n / kStandardGravity * 1000.0; }

}  // namespace trl::units
