#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pspectra/oracles/oracles.hpp"

using namespace pspectra::oracles;
using testing::kPi;

TEST_SUITE("oracles") {
  TEST_CASE("shooting matches the closed form") {
    for (double p : {1.2, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0}) {
      CHECK(shooting_half_period(p) == doctest::Approx(circle_closed_form(p)).epsilon(1e-9));
    }
    CHECK(shooting_half_period(2.0) == doctest::Approx(kPi).epsilon(1e-10));
  }

  TEST_CASE("interval and circle eigenvalues") {
    CHECK(interval_neumann_eigenvalue(2.0, 2.0) == doctest::Approx(kPi * kPi / 4));
    CHECK(circle_eigenvalue(2.0, 1.0) == doctest::Approx(1.0));
    CHECK(circle_eigenvalue(2.0, 2.0) == doctest::Approx(0.25));
    CHECK(circle_closed_form(100.0) == doctest::Approx(2.094).epsilon(1e-3));
  }

  TEST_CASE("finite differences and quadrature") {
    CHECK(fd_circle_eigenvalue(400, 1.0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(sphere_radial_integral([](double) { return 1.0; }) == doctest::Approx(1.0));
    CHECK(sphere_radial_integral([](double t) { return std::sin(t); }) == doctest::Approx(kPi / 4));
    CHECK(std::abs(sphere_radial_integral([](double t) { return std::cos(t); })) <= 1e-14);
    CHECK(sphere_radial_integral([](double t) { return t * t; }) == doctest::Approx(kPi * kPi / 2 - 2));
  }
}
