#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pspectra/error.hpp"
#include "pspectra/functionals.hpp"
#include "pspectra/generators.hpp"
#include "pspectra/oracles/oracles.hpp"

using namespace pspectra;
using namespace testing;

TEST_SUITE("functionals") {
  TEST_CASE("p = 2 centers at the weighted mean") {
    Vector m(3), f(3);
    m << 0.2, 0.3, 0.5;
    f << 1.0, -2.0, 4.0;
    const CenteredNorm cn = centered_norm(m, f, 2.0);
    const double mean = m.dot(f);
    CHECK(cn.a_p == doctest::Approx(mean));
    CHECK(cn.c_p == doctest::Approx(std::sqrt(m.dot((f.array() - mean).square().matrix()))));
  }

  TEST_CASE("symmetric two-level field") {
    Vector m = Vector::Constant(4, 0.25), f(4);
    f << 1, -1, 1, -1;
    for (double p : {1.0, 1.3, 2.0, 3.7, 9.0}) {
      const CenteredNorm cn = centered_norm(m, f, p);
      CHECK(cn.a_p == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(cn.c_p == doctest::Approx(1.0));
    }
  }

  TEST_CASE("p = 1 median") {
    Vector m(3), f(3);
    m << 0.25, 0.5, 0.25;
    f << 0, 1, 2;
    const CenteredNorm cn = centered_norm(m, f, 1.0);
    CHECK(cn.a_p == doctest::Approx(1.0));
    CHECK(cn.c_p == doctest::Approx(0.5));
  }

  TEST_CASE("invariants on random fields") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int t = 0; t < 200; ++t) {
      const Index n = 2 + t % 15;
      Vector m = Vector::NullaryExpr(n, [&] { return 0.1 + std::abs(g(rng)); });
      m /= m.sum();
      const Vector f = Vector::NullaryExpr(n, [&] { return 3.0 * g(rng); });
      const double p = 1.1 + 0.05 * t;
      const CenteredNorm cn = centered_norm(m, f, p);
      CHECK(cn.c_p <= lp_norm(m, f, p) * (1 + 1e-12));
      CHECK(std::abs(cn.residual) <= 1e-10 * std::pow(lp_norm(m, f, p), p - 1));
      CHECK(cn.a_p >= f.minCoeff());
      CHECK(cn.a_p <= f.maxCoeff());
    }
  }

  TEST_CASE("invalid exponent") {
    CHECK_THROWS_AS(centered_norm(Vector::Ones(2) / 2, Vector::Ones(2), 0.5), Error);
    const Space s = line_space({0, 1});
    CHECK_THROWS_AS(rayleigh_p(s, ScalarField(Vector::Ones(2)), 2.0, 1.5), Error);
  }

  TEST_CASE("lp_norm does not overflow at large p") {
    const Vector m = Vector::Constant(3, 1.0 / 3);
    Vector f(3);
    f << 1e3, -2e3, 5.0;
    CHECK(std::isfinite(lp_norm(m, f, 400.0)));
    CHECK(lp_norm(m, f, 400.0) == doctest::Approx(2e3).epsilon(0.01));
  }

  TEST_CASE("rayleigh_p invariance and circle value") {
    const Space c = gen_circle(1.0, 400);
    const double h = 3 * c.meta()["mesh"].get<double>();
    const ScalarField f = field_of(c, [](double t) { return std::sin(t); });
    const ScalarField g(5.0 * f.values().array() + 3.0);
    for (double p : {1.5, 2.0, 4.0}) CHECK(rayleigh_p(c, g, p, h) == doctest::Approx(rayleigh_p(c, f, p, h)).epsilon(1e-12));
    const double r2 = rayleigh_p(c, f, 2.0, h);
    CHECK(std::abs(r2 - 1.0) <= 0.05);
    CHECK(std::abs(r2 - oracles::fd_circle_eigenvalue(400, 1.0)) <= 0.05);
  }

  TEST_CASE("rayleigh_p by hand on a two-cluster space") {
    // clusters {0,1} and {2,3}, within-cluster gap 0.1, between 1.0
    const Space s = line_space({0.0, 0.1, 1.1, 1.2});
    Vector f(4);
    f << 0, 0, 1, 1;
    // h = 1: Lip = 1 at points 1 and 2 (the 1.0 gap), 0 at the ends
    // sum m Lip^p = 0.5, c_p = 1/2 for every p
    for (double p : {1.5, 2.0, 3.0}) {
      const double expected = 0.5 / std::pow(0.5, p);
      CHECK(rayleigh_p(s, ScalarField(f), p, 1.0) == doctest::Approx(expected));
    }
  }
}
