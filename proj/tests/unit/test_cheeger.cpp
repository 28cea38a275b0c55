#include <doctest.h>

#include <cmath>
#include <numeric>

#include "helpers.hpp"
#include "pspectra/cheeger.hpp"
#include "pspectra/eigensolver.hpp"
#include "pspectra/error.hpp"
#include "pspectra/generators.hpp"

using namespace pspectra;
using namespace testing;

namespace {

// Minimum over all admissible subsets, evaluated independently of exact_cheeger.
double enumerate(const Space& s, double eps) {
  const Index n = s.size();
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<Index> a;
    double mass = 0.0;
    for (Index i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        a.push_back(i);
        mass += s.mass()(i);
      }
    if (mass > 0.5 + 1e-12) continue;
    double grown = 0.0;
    for (Index y = 0; y < n; ++y) {
      bool near = false;
      for (Index x : a) near = near || s.distance(x, y) <= eps + s.tolerance();
      if (near) grown += s.mass()(y);
    }
    best = std::min(best, (grown - mass) / eps / mass);
  }
  return best;
}

}  // namespace

TEST_SUITE("cheeger") {
  TEST_CASE("minkowski_boundary") {
    const Space c = gen_circle(1.0, 400);
    std::vector<Index> arc(200);
    std::iota(arc.begin(), arc.end(), 0);
    const double mesh = c.meta()["mesh"].get<double>();
    CHECK(minkowski_boundary(c, arc, 3 * mesh) == doctest::Approx(1.0 / kPi).epsilon(0.15));
    CHECK(minkowski_boundary(c, arc, 10.0) == doctest::Approx(0.5 / 10.0));
    CHECK(minkowski_boundary(c, arc, 0.5 * mesh) == 0.0);
    const std::vector<Index> empty;
    CHECK_THROWS_AS(minkowski_boundary(c, empty, 1.0), Error);
  }

  TEST_CASE("exact_cheeger") {
    // two points at distance d: nothing enters below d, the other half enters at d
    const double d = 2.0;
    const Space two = line_space({0.0, d});
    const CutResult below = exact_cheeger(two, d / 2);
    CHECK(below.subset == std::vector<Index>{0});
    CHECK(below.ratio == 0.0);
    const CutResult at = exact_cheeger(two, d);
    CHECK(at.boundary == doctest::Approx(0.5 / d));
    CHECK(at.ratio == doctest::Approx(1.0 / d));
    CHECK(at.method == CutMethod::brute_force);

    const Space four = line_space({0, 1, 2, 3});
    const CutResult end = exact_cheeger(four, 1.5);
    CHECK(end.subset == std::vector<Index>{0, 1});
    CHECK(end.ratio == doctest::Approx(enumerate(four, 1.5)));

    const Space scaled = four.scaled(3.0);
    CHECK(exact_cheeger(scaled, 4.5).ratio == doctest::Approx(end.ratio / 3.0));
  }

  TEST_CASE("exact_cheeger matches independent enumeration") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 15; ++t) {
      const Space s = random_planar(rng, 5 + t % 8);
      const double eps = default_scale(s);
      const CutResult r = exact_cheeger(s, eps);
      CHECK(r.ratio == doctest::Approx(enumerate(s, eps)));
      CHECK(r.mass <= 0.5 + 1e-12);
      CHECK(r.ratio == r.boundary / r.mass);
    }
  }

  TEST_CASE("sweep_cheeger is an upper bound and recovers the indicator cut") {
    std::mt19937_64 rng(22);
    std::normal_distribution<double> g;
    for (int t = 0; t < 10; ++t) {
      const Space s = random_planar(rng, 12);
      const double eps = default_scale(s);
      const CutResult exact = exact_cheeger(s, eps);
      Vector ind = Vector::Zero(12);
      for (Index i : exact.subset) ind(i) = 1.0;
      CHECK(sweep_cheeger(s, ScalarField(ind), eps).ratio == doctest::Approx(exact.ratio));
      const ScalarField f(Vector::NullaryExpr(12, [&] { return g(rng); }));
      CHECK(sweep_cheeger(s, f, eps).ratio >= exact.ratio * (1 - 1e-12));
    }
  }

  TEST_CASE("circle cut") {
    const Space c = gen_circle(1.0, 400);
    const double eps = 3 * c.meta()["mesh"].get<double>();
    const SpectralResult p2 = solve_p2_exact(c, eps);
    CHECK(sweep_cheeger(c, p2.eigenfunction, eps).ratio == doctest::Approx(2 / kPi).epsilon(0.2));
    const CutResult h = cheeger(c, eps);
    CHECK(h.ratio >= 0.5);
    CHECK(h.ratio <= 0.8);
    CHECK(h.method == CutMethod::sweep);
  }

  TEST_CASE("dispatch and collapse") {
    std::mt19937_64 rng(23);
    CHECK(cheeger(random_planar(rng, 16), 0.5).method == CutMethod::brute_force);
    const double a = 2 * kPi;
    const Space thin = gen_flat_torus(a, 1e-3, 800);
    const Space base = gen_circle(1.0, 400);
    const double eps = 3 * base.meta()["mesh"].get<double>();
    CHECK(cheeger(thin, eps).ratio == doctest::Approx(cheeger(base, eps).ratio).epsilon(0.25));
  }
}
