#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "pspectra/error.hpp"
#include "pspectra/generators.hpp"

using namespace pspectra;
using namespace testing;

TEST_SUITE("generators") {
  TEST_CASE("circle") {
    const Space four = gen_circle(1.0, 4);
    std::set<long> values;
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j)
        if (i != j) values.insert(std::lround(four.distance(i, j) * 1e9));
    CHECK(values == std::set<long>{std::lround(kPi / 2 * 1e9), std::lround(kPi * 1e9)});
    const Space c = gen_circle(1.0, 400);
    CHECK(std::abs(c.max_distance() - kPi) <= 1e-9);
    CHECK((c.mass().array() == 1.0 / 400).all());
    CHECK(c.fill_radius().value() > 0.0);
  }

  TEST_CASE("sphere") {
    const Space s = gen_sphere(2, 1.0, 2000);
    CHECK(s.max_distance() >= kPi - 0.1);
    CHECK(s.distance(7, 7) == 0.0);
    Matrix pts(2, 3);
    pts << 0, 0, 1, 0, 0, -1;
    CHECK(sphere_from_coords(pts, 2.0).distance(0, 1) == doctest::Approx(2 * kPi));
    const Space s3 = gen_sphere(3, 1.0, 50, 11);
    CHECK(s3.max_distance() <= kPi + 1e-12);
    CHECK(gen_sphere(3, 1.0, 50, 11).distances() == s3.distances());
  }

  TEST_CASE("flat torus") {
    const Space t = gen_flat_torus(2.0, 2.0, 16);
    // 4 x 4 grid: point 0 and its half-period shift along one side
    double half = 0.0;
    for (Index j = 1; j < t.size(); ++j)
      if (std::abs(t.coords()(j, 1)) < 1e-12 && std::abs(t.coords()(j, 0) - 1.0) < 1e-12) half = t.distance(0, j);
    CHECK(half == doctest::Approx(1.0));
    const Space big = gen_flat_torus(2.0, 2.0, 1600);
    CHECK(big.max_distance() == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    const double a = 2 * kPi;
    const Space thin = gen_flat_torus(a, 1e-3, 400);
    for (Index i = 0; i < thin.size(); i += 7) {
      for (Index j = 0; j < thin.size(); j += 5) {
        const double du = std::abs(thin.coords()(i, 0) - thin.coords()(j, 0));
        const double circle = std::min(du, a - du);
        CHECK(std::abs(thin.distance(i, j) - circle) <= 5e-4);
      }
    }
  }

  TEST_CASE("suspension") {
    const Space base = gen_circle(1.0, 20);
    const Space s = gen_suspension(base, 10, 1.0);
    CHECK(s.distance(0, 0) == 0.0);
    for (Index i = 1; i + 1 < s.size(); ++i) CHECK(s.distance(0, i) == doctest::Approx(s.coords()(i, 0)));
    Matrix xyz(s.size(), 3);
    for (Index i = 0; i < s.size(); ++i) {
      const double t = s.coords()(i, 0), th = s.coords()(i, 1);
      xyz.row(i) << std::sin(t) * std::cos(th), std::sin(t) * std::sin(th), std::cos(t);
    }
    CHECK((s.distances() - sphere_from_coords(xyz, 1.0).distances()).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(s.mass().sum() == doctest::Approx(1.0));
    CHECK_THROWS_AS(gen_suspension(gen_circle(2.0, 20), 10, 1.0), Error);
    CHECK(suspension_distance(0.3, 0.3, 0.0) == doctest::Approx(0.0));
    CHECK(suspension_distance(0.0, kPi, 1.0) == doctest::Approx(kPi));
  }

  TEST_CASE("interval") {
    const Space s = gen_interval(2.5, 3);
    CHECK(s.distance(0, 2) == 2.5);
    CHECK(s.distance(0, 1) == doctest::Approx(1.25));
    CHECK(s.max_distance() == 2.5);
  }

  TEST_CASE("space file round trip and validation") {
    const auto dir = std::filesystem::temp_directory_path() / "pspectra_gen_test";
    std::filesystem::create_directories(dir);
    const Space s = gen_sphere(2, 1.0, 60);
    save_space(s, dir / "s.json");
    const Space back = load_space(dir / "s.json");
    CHECK(back.distances() == s.distances());
    CHECK(back.mass() == s.mass());

    std::ofstream(dir / "asym.json") << R"({"n":2,"mass":[0.5,0.5],"dist":[0,1,2,0]})";
    try {
      load_space(dir / "asym.json");
      FAIL("expected a validation error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ValidationError);
    }
    std::ofstream(dir / "euc.json") << R"({"n":2,"mass":[0.5,0.5],"coords":[[0,0],[3,4]],"metric":"euclidean"})";
    CHECK(load_space(dir / "euc.json").distance(0, 1) == doctest::Approx(5.0));
    CHECK_THROWS_AS(load_space(dir / "missing.json"), Error);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("model spec round trip") {
    ModelSpec spec;
    spec.model = Model::flat_torus;
    spec.a = 3.0;
    spec.b = 0.5;
    spec.sample_count = 100;
    const ModelSpec back = model_spec_from_json(to_json(spec));
    CHECK(back.model == Model::flat_torus);
    CHECK(back.b == 0.5);
    CHECK(generate(spec).size() == 100);
    CHECK(spec.fill_radius > 0.0);
    CHECK_THROWS_AS(model_from_string("klein"), Error);
  }
}
