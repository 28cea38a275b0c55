#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pspectra/error.hpp"
#include "pspectra/generators.hpp"
#include "pspectra/ghseq.hpp"
#include "pspectra/serialize.hpp"

using namespace pspectra;
using namespace testing;

TEST_SUITE("ghseq") {
  TEST_CASE("distortion") {
    const Space c = gen_circle(1.0, 100);
    CHECK(distortion(identity_correspondence(c), c, c) == 0.0);
    const Space fine = gen_circle(1.0, 200);
    CHECK(distortion(nearest_map(c, fine), c, fine) <= 2 * kPi / 100 + 1e-12);
    const Space a = line_space({0, 1.0}), b = line_space({0, 1.7});
    CHECK(distortion(identity_correspondence(a), a, b) == doctest::Approx(0.7));
    const GHBounds gh = gh_bounds(identity_correspondence(a), a, b);
    CHECK(gh.upper == doctest::Approx(0.35));
    CHECK(gh.lower == doctest::Approx(0.35));
  }

  TEST_CASE("correspondence validation and algebra") {
    const Space a = line_space({0, 1, 2});
    Correspondence bad;
    bad.pairs = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(validate(bad, a, a), Error);
    const Correspondence id = identity_correspondence(a);
    CHECK_NOTHROW(validate(id, a, a));
    CHECK(compose(id, id).pairs.size() == 3);
    CHECK(transpose(id).pairs == id.pairs);
  }

  TEST_CASE("nearest_map") {
    const Space c = gen_circle(1.0, 100);
    const Correspondence same = nearest_map(c, c);
    for (Index i = 0; i < 100; ++i) CHECK(same.map[i] == i);
    const Space fine = gen_circle(1.0, 400);
    CHECK(image_density(nearest_map(c, fine), fine) <= kPi / 100 + 1e-12);
    const double a = 2 * kPi;
    const Space thin = gen_flat_torus(a, 0.1, 800);
    const Correspondence proj = nearest_map(thin, gen_circle(1.0, 400));
    CHECK(distortion(proj, thin, gen_circle(1.0, 400)) <= 0.05 + 2 * kPi / 400 + 1e-9);
    CHECK_THROWS_AS(nearest_map(c, gen_sphere(2, 1.0, 50)), Error);
  }

  TEST_CASE("measure_discrepancy") {
    const Space c = gen_circle(1.0, 100), fine = gen_circle(1.0, 400);
    const std::vector<Index> centers{0, 13, 57};
    const double mesh = 2 * kPi / 400;
    const std::vector<double> radii{10 * mesh, 0.5, 1.5};
    CHECK(measure_discrepancy(identity_correspondence(c), c, c, centers, radii) == 0.0);
    CHECK(measure_discrepancy(nearest_map(c, fine), c, fine, centers, radii) <= 0.03);
    // skewed masses on a two-point copy
    const Space even = line_space({0, 1}), skew = line_space({0, 1}, {0.8, 0.2});
    const std::vector<Index> c0{0};
    const std::vector<double> r0{0.5};
    CHECK(measure_discrepancy(identity_correspondence(even), even, skew, c0, r0) >= 0.3 - 1e-12);
  }

  TEST_CASE("convergence experiment") {
    std::vector<ModelSpec> same(3);
    for (auto& s : same) s.sample_count = 60;
    const std::vector<double> grid{2.0};
    const ConvergenceReport r = run_convergence_experiment(same, grid);
    CHECK(r.F_table.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(r.distortions[i] == 0.0);
      CHECK(r.F_table[i][0] == r.F_table[0][0]);
    }
    CHECK(r.sequence.size() == 3);

    std::vector<ModelSpec> refine;
    for (Index n : {50, 100, 200, 400}) {
      ModelSpec s;
      s.sample_count = n;
      refine.push_back(s);
    }
    const ConvergenceReport rr = run_convergence_experiment(refine, grid);
    double shrink = 0.0;
    for (std::size_t i = 2; i < 4; ++i)
      shrink += std::abs(rr.F_table[i - 1][0] - rr.F_table[i - 2][0]) / std::abs(rr.F_table[i][0] - rr.F_table[i - 1][0]);
    CHECK(shrink / 2 >= 1.5);

    const nlohmann::json j = to_json(rr);
    CHECK(j["F_table"].size() == 4);
    const std::string csv = to_csv(rr);
    CHECK(csv.rfind("stage,p,F,distortion,discrepancy,epsilon", 0) == 0);
  }

  TEST_CASE("failed stages are recorded") {
    std::vector<ModelSpec> specs(2);
    specs[0].model = Model::file;
    specs[0].path = "/nonexistent/space.json";
    specs[1].sample_count = 40;
    const std::vector<double> grid{2.0};
    const ConvergenceReport r = run_convergence_experiment(specs, grid);
    CHECK(r.sequence[0].status != "ok");
    CHECK(std::isnan(r.F_table[0][0]));
  }
}
