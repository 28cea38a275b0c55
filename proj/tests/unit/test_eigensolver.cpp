#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "helpers.hpp"
#include "pspectra/eigensolver.hpp"
#include "pspectra/error.hpp"
#include "pspectra/functionals.hpp"
#include "pspectra/generators.hpp"
#include "pspectra/oracles/oracles.hpp"

using namespace pspectra;
using namespace testing;

namespace {

struct Circle {
  Space space = gen_circle(1.0, 400);
  double h = 3 * space.meta()["mesh"].get<double>();
};

const Circle& circle() {
  static const Circle c;
  return c;
}

}  // namespace

TEST_SUITE("eigensolver") {
  TEST_CASE("p2_exact") {
    const auto& c = circle();
    const SpectralResult r = solve_p2_exact(c.space, c.h);
    CHECK(std::abs(r.lambda - 1.0) <= 0.05);
    CHECK(r.lambda == doctest::Approx(rayleigh_p(c.space, r.eigenfunction, 2.0, c.h)).epsilon(1e-10));
    const Space split = line_space({0.0, 0.1, 5.0, 5.1});
    try {
      solve_p2_exact(split, 0.5);
      FAIL("expected Disconnected");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Disconnected);
    }
  }

  TEST_CASE("p2_exact agrees with a dense solve on a small space") {
    std::mt19937_64 rng(5);
    const Space s = random_planar(rng, 40);
    const double h = 0.45;
    const Index n = s.size();
    const Vector& m = s.mass();
    const NeighborGraph graph(s, h);
    Vector local = Vector::Zero(n);
    for (Index x = 0; x < n; ++x)
      for (Index y : graph.neighbors(x)) local(x) += m(y);
    Matrix K = Matrix::Zero(n, n);
    for (Index x = 0; x < n; ++x) {
      for (Index y : graph.neighbors(x)) {
        const double d = s.distance(x, y);
        const double w = m(x) * m(y) / (0.5 * (local(x) + local(y)) * d * d);
        K(x, y) -= w;
        K(x, x) += w;
      }
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> dense(K, Matrix(m.asDiagonal()));
    PLaplacianProblem problem(s, h);
    const SpectralResult r = problem.p2_exact();
    CHECK(problem.surrogate_eigenvalue() == doctest::Approx(dense.eigenvalues()(1)).epsilon(1e-8));
    const Vector v = dense.eigenvectors().col(1);
    const Vector f = r.eigenfunction.values().array() - m.dot(r.eigenfunction.values());
    const double cosine = std::abs(f.dot(m.asDiagonal() * v)) /
                          std::sqrt(f.dot(m.asDiagonal() * f) * v.dot(m.asDiagonal() * v));
    CHECK(cosine == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("solve contracts") {
    const auto& c = circle();
    SolveOptions opts;
    const SpectralResult r = solve(c.space, 3.0, c.h, opts);
    const CenteredNorm cn = centered_norm(c.space, r.eigenfunction, 3.0);
    CHECK(std::abs(cn.c_p - 1.0) <= 1e-8);
    CHECK(std::abs(lp_norm(c.space.mass(), r.eigenfunction.values(), 3.0) - 1.0) <= 1e-8);
    CHECK(r.lambda == doctest::Approx(rayleigh_p(c.space, r.eigenfunction, 3.0, c.h)).epsilon(1e-10));
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i) CHECK(r.energy_trace[i] <= r.energy_trace[i - 1] + 1e-12);
    CHECK(std::abs(r.lambda_root * c.space.max_distance() - oracles::circle_closed_form(3.0)) <=
          0.05 * oracles::circle_closed_form(3.0));
    CHECK_THROWS_AS(solve(c.space, 1.05, c.h, opts), Error);
  }

  TEST_CASE("p = 2 descent agrees with p2_exact on the circle") {
    const auto& c = circle();
    const double exact = solve_p2_exact(c.space, c.h).lambda;
    CHECK(solve(c.space, 2.0, c.h).lambda == doctest::Approx(exact).epsilon(0.02));
  }

  TEST_CASE("descent from the exact eigenfunction stays put") {
    const auto& c = circle();
    PLaplacianProblem problem(c.space, c.h);
    const SpectralResult exact = problem.p2_exact();
    const SpectralResult again = problem.descend(2.0, exact.eigenfunction, SolveOptions{}, "exact");
    CHECK(again.lambda <= exact.lambda * (1 + 1e-12));
    CHECK(again.lambda == doctest::Approx(exact.lambda).epsilon(0.02));
  }

  TEST_CASE("sweep_p") {
    const auto& c = circle();
    const std::vector<double> one{2.0};
    const auto single = sweep_p(c.space, one, c.h);
    CHECK(single.size() == 1);
    CHECK(single[0].lambda == doctest::Approx(solve(c.space, 2.0, c.h).lambda).epsilon(1e-9));
    const std::vector<double> grid{1.5, 2.0, 3.0, 5.0, 10.0};
    const auto rs = sweep_p(c.space, grid, c.h);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double target = oracles::circle_closed_form(grid[i]);
      CHECK(std::abs(rs[i].lambda_root * kPi - target) <= 0.05 * target);
    }
    const std::vector<double> bad{0.5, 2.0};
    const auto mixed = sweep_p(c.space, bad, c.h);
    CHECK_FALSE(mixed[0].error.empty());
    CHECK(mixed[1].error.empty());
    const std::vector<double> unsorted{3.0, 2.0};
    CHECK_THROWS_AS(sweep_p(c.space, unsorted, c.h), Error);
  }

  TEST_CASE("sphere p2_exact") {
    const Space s = gen_sphere(2, 1.0, 2000);
    const SpectralResult r = solve_p2_exact(s, default_scale(s));
    CHECK(std::abs(r.lambda - 2.0) <= 0.15);
  }

  TEST_CASE("determinism") {
    std::mt19937_64 rng(9);
    const Space s = random_planar(rng, 60);
    SolveOptions a, b;
    b.threads = 3;
    CHECK(solve(s, 3.0, 0.4, a).lambda == solve(s, 3.0, 0.4, b).lambda);
  }
}
