#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "pspectra/error.hpp"
#include "pspectra/generators.hpp"

using namespace pspectra;
using namespace testing;

TEST_SUITE("mmspace") {
  TEST_CASE("construction validates the metric axioms") {
    Matrix d(2, 2);
    d << 0, 1, 2, 0;
    CHECK_THROWS_AS(Space(d, Vector::Constant(2, 0.5)), Error);
    d << 0, 1, 1, 0;
    CHECK_THROWS_AS(Space(d, Vector::Constant(2, 0.3)), Error);
    Vector bad(2);
    bad << 1.0, 0.0;
    CHECK_THROWS_AS(Space(d, bad), Error);
    Matrix t(3, 3);
    t << 0, 1, 5, 1, 0, 1, 5, 1, 0;
    CHECK_THROWS_AS(Space(t, Vector::Constant(3, 1.0 / 3)), Error);
    try {
      Space(t, Vector::Constant(3, 1.0 / 3));
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ValidationError);
    }
  }

  TEST_CASE("diameter") {
    CHECK(diameter(line_space({0.0, 3.0})) == doctest::Approx(3.0));
    const Space c = gen_circle(1.0, 400);
    CHECK(std::abs(diameter(c) - kPi) <= 0.02);
    std::vector<Index> perm(400);
    std::iota(perm.rbegin(), perm.rend(), 0);
    CHECK(diameter(c.permuted(perm)) == diameter(c));
    CHECK_THROWS_AS(diameter(Space(Matrix::Zero(1, 1), Vector::Ones(1))), Error);
  }

  TEST_CASE("ball_mass uses open balls") {
    const Space s = line_space({0.0, 1.0, 3.0, 6.0});
    CHECK(ball_mass(s, 0, 0.0) == 0.0);
    CHECK(ball_mass(s, 0, 100.0) == doctest::Approx(1.0));
    CHECK(ball_mass(s, 0, 1.0) == doctest::Approx(0.25));
    CHECK(ball_mass(s, 0, 1.0 + 1e-6) == doctest::Approx(0.5));
  }

  TEST_CASE("lip_field") {
    const Space c = gen_circle(1.0, 400);
    const double mesh = c.meta()["mesh"].get<double>();
    CHECK(lip_field(c, ScalarField(Vector::Constant(400, 2.0)), 3 * mesh).values().maxCoeff() == 0.0);
    const ScalarField r = distance_field(c, 17);
    CHECK(lip_field(c, r, 0.7).values().maxCoeff() <= 1.0 + 1e-12);
    const ScalarField f = field_of(c, [](double t) { return std::sin(t); });
    const ScalarField lip = lip_field(c, f, 3 * mesh);
    for (Index i = 0; i < c.size(); ++i) CHECK(std::abs(lip[i] - std::abs(std::cos(c.coords()(i, 0)))) <= 0.05);
  }

  TEST_CASE("global_lip") {
    Matrix d(3, 3);
    d << 0, 1, 1, 1, 0, 1, 1, 1, 0;
    const Space s(d, Vector::Constant(3, 1.0 / 3));
    Vector f(3);
    f << 0, 2, 1;
    CHECK(global_lip(s, ScalarField(f)) == doctest::Approx(2.0));
    CHECK(global_lip(s, ScalarField(Vector::Constant(3, 4.0))) == 0.0);
    const Space line = line_space({0.0, 1.0, 2.5});
    CHECK(global_lip(line, distance_field(line, 0)) == doctest::Approx(1.0));
  }

  TEST_CASE("segment_functional") {
    const Space c = gen_circle(1.0, 400);
    const double h = 3 * c.meta()["mesh"].get<double>();
    CHECK(segment_functional(c, ScalarField(Vector::Zero(400)), 0, 100, h) == 0.0);
    CHECK(segment_functional(c, ScalarField(Vector::Ones(400)), 5, 5, h) == 0.0);
    const double len = segment_functional(c, ScalarField(Vector::Ones(400)), 0, 130, h);
    CHECK(std::abs(len - c.distance(0, 130)) <= 0.02 * c.distance(0, 130));
    const Space split = line_space({0.0, 0.1, 5.0, 5.1});
    CHECK_THROWS_AS(segment_functional(split, ScalarField(Vector::Ones(4)), 0, 3, 0.5), Error);
  }

  TEST_CASE("estimate_constants") {
    const Space two = line_space({0.0, 1.0});
    const std::vector<double> half{0.5};
    CHECK(estimate_constants(two, half, 2).kappa == doctest::Approx(0.0));

    const Space c = gen_circle(1.0, 400);
    const std::vector<double> radii{0.2, 0.4};
    const EstimatedConstants k = estimate_constants(c, radii, 4);
    CHECK(k.kappa == doctest::Approx(1.0).epsilon(0.2));
    CHECK(k.tau >= 0.0);
    CHECK(k.lambda_seg >= 0.0);
    CHECK_FALSE(k.sample_spec.centers.empty());
  }

  TEST_CASE("permutation and scaling") {
    const Space s = line_space({0.0, 1.0, 3.0});
    const std::vector<Index> perm{2, 0, 1};
    const Space p = s.permuted(perm);
    CHECK(p.distance(0, 1) == s.distance(2, 0));
    CHECK(s.scaled(2.0).max_distance() == doctest::Approx(6.0));
    CHECK(default_scale(s) > 0.0);
  }
}
