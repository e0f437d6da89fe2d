#include <doctest.h>

#include <cmath>

#include "trl/errors.hpp"
#include "trl/material.hpp"

using namespace trl;
using material::Material;

TEST_CASE("shear modulus follows the isotropic identity") {
  CHECK(material::shear_modulus(material::make_material("a", 1.143e9, 0.39)) ==
        doctest::Approx(4.112e8).epsilon(1e-3));
  CHECK(material::shear_modulus(material::make_material("b", 2.0e9, 0.0)) == doctest::Approx(1.0e9));
  // Incompressible limit approaches E / 3.
  const double g = material::shear_modulus(material::make_material("c", 1.0e9, 0.5 - 1e-9));
  CHECK(g == doctest::Approx(1.0e9 / 3.0).epsilon(1e-8));
}

TEST_CASE("shear modulus is strictly decreasing in nu") {
  double prev = INFINITY;
  for (int i = 0; i < 50; ++i) {
    const double nu = 0.0099 * i;
    const double g = material::shear_modulus(material::make_material("m", 1e9, nu));
    CHECK(g < prev);
    prev = g;
  }
}

TEST_CASE("material validation") {
  CHECK_THROWS_AS(material::make_material("x", 0.0, 0.3), InvalidInput);
  CHECK_THROWS_AS(material::make_material("x", -1.0, 0.3), InvalidInput);
  CHECK_THROWS_AS(material::make_material("x", 1e9, 0.5), InvalidInput);
  CHECK_THROWS_AS(material::make_material("x", 1e9, -0.01), InvalidInput);
  CHECK_NOTHROW(material::make_material("x", 1e9, 0.0));
}

TEST_CASE("modulus calibration inverts the cantilever formula") {
  // E = F L^3 / (3 delta I) with I = w t^3 / 12, evaluated by hand in SI.
  const double i_m4 = 0.020 * std::pow(0.001, 3) / 12.0;
  const double expected = 0.01 * std::pow(0.1, 3) / (3.0 * 0.00175 * i_m4);
  CHECK(material::calibrate_modulus(1.0, 1.75, 0.01, 100, 20) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.143e9).epsilon(1e-3));
  CHECK(material::calibrate_modulus(0.5, 14.02, 0.01, 100, 20) == doctest::Approx(1.141e9).epsilon(1e-3));
  // Large deflection drives E towards zero.
  CHECK(material::calibrate_modulus(1.0, 1e12, 0.01, 100, 20) < 1e-2);
  CHECK_THROWS_AS(material::calibrate_modulus(1.0, 0.0, 0.01, 100, 20), InvalidInput);
  CHECK_THROWS_AS(material::calibrate_modulus(1.0, -1.0, 0.01, 100, 20), InvalidInput);
  CHECK_THROWS_AS(material::calibrate_modulus(0.0, 1.0, 0.01, 100, 20), InvalidInput);
}

TEST_CASE("calibrations from the reference table agree within 1 percent") {
  const double t[] = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  const double d[] = {27.38, 14.02, 8.11, 5.11, 3.42, 2.41, 1.75};
  for (int a = 0; a < 7; ++a) {
    for (int b = a + 1; b < 7; ++b) {
      const double ea = material::calibrate_modulus(t[a], d[a], 0.01, 100, 20);
      const double eb = material::calibrate_modulus(t[b], d[b], 0.01, 100, 20);
      CHECK(std::abs(ea / eb - 1.0) < 0.01);
    }
  }
  CHECK(std::abs((64.85 / 27.38) / std::pow(4.0 / 3.0, 3) - 1.0) < 1e-3);
  CHECK(std::abs((27.38 / 14.02) / std::pow(5.0 / 4.0, 3) - 1.0) < 1e-3);
}

TEST_CASE("built-in materials") {
  const Material pa6 = material::builtin("pa6");
  CHECK(pa6.youngs_modulus == doctest::Approx(1.142857e9).epsilon(1e-6));
  CHECK(pa6.poisson_ratio == 0.39);
  CHECK(material::builtin("PLA").youngs_modulus > pa6.youngs_modulus);
  const Material eco = material::builtin("Ecoflex00-30");
  CHECK(eco.youngs_modulus < 1e6);
  CHECK(eco.static_friction.value() == 1.0);
  CHECK_THROWS_AS(material::builtin("steel"), InvalidInput);
  CHECK(material::builtin_names().size() == 3);
}
