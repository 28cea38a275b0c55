#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pspectra/bounds.hpp"
#include "pspectra/generators.hpp"
#include "pspectra/oracles/oracles.hpp"

using namespace pspectra;
using namespace testing;

namespace {

struct CircleCase {
  Space space;
  Analysis analysis;
  explicit CircleCase(double r)
      : space(gen_circle(r, 400)),
        analysis(space, 3 * space.meta()["mesh"].get<double>(), 3 * space.meta()["mesh"].get<double>(), {},
                 "circle") {}
};

CircleCase& circle(double r = 1.0) {
  static CircleCase half(0.5), one(1.0), two(2.0);
  return r == 0.5 ? half : r == 2.0 ? two : one;
}

}  // namespace

TEST_SUITE("bounds") {
  TEST_CASE("eval_F") {
    auto& c = circle();
    const double h = c.analysis.h();
    const FValue inf = eval_F(c.space, kPInfinity, h, h);
    CHECK(inf.value == doctest::Approx(2 / kPi));
    CHECK(inf.provenance == Provenance::diameter);
    const FValue two = c.analysis.F(2.0);
    CHECK(two.value == doctest::Approx(1.0).epsilon(0.05));
    CHECK(two.provenance == Provenance::eigensolver);
    const FValue one = c.analysis.F(1.0);
    CHECK(one.value == doctest::Approx(2 / kPi).epsilon(0.05));
    CHECK(one.provenance == Provenance::cheeger);
    const Space point(Matrix::Zero(1, 1), Vector::Ones(1));
    CHECK(eval_F(point, 2.0, 1.0, 1.0).infinite);
  }

  TEST_CASE("matei") {
    auto& c = circle();
    const std::vector<double> grid{1.5, 2.0, 3.0};
    const InequalityReport r = check_matei(c.analysis, grid);
    CHECK(r.all_satisfied());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(r.slack[i] > 0.5);
    // a ten-fold inflated h must violate the p = 2 row
    const double inflated = 10 * c.analysis.cut().ratio;
    CHECK(inflated > 2.0 * c.analysis.lambda_root(2.0));
  }

  TEST_CASE("buser") {
    const std::vector<double> grid{1.5, 2.0, 3.0};
    const InequalityReport r = check_buser(circle().analysis, grid);
    CHECK(r.fitted_constant.value() <= 3.0);
    CHECK(r.all_satisfied());
    // two points with a tiny gap: h is huge, C stays finite
    const Space two = line_space({0.0, 1e-3});
    Analysis an(two, 2e-3, 2e-3);
    const InequalityReport t = check_buser(an, grid);
    CHECK(std::isfinite(t.fitted_constant.value()));
  }

  TEST_CASE("valtorta and gallot") {
    auto& c = circle();
    const std::vector<double> grid{2.0, 3.0};
    const InequalityReport v = check_valtorta(c.analysis, grid);
    CHECK(v.lhs[0] == doctest::Approx(1.0));
    CHECK(v.equality[0]);
    CHECK(v.rhs[1] == doctest::Approx(v.lhs[1]).epsilon(0.05));
    CHECK(valtorta_bound(3.0, kPi) == doctest::Approx(oracles::circle_closed_form(3.0) / kPi));
    const InequalityReport g = check_gallot(c.analysis);
    CHECK(g.equality[0]);
  }

  TEST_CASE("monotone and spreads") {
    const std::vector<double> grid{1.5, 2.0, 3.0, 5.0};
    CHECK(check_monotone(circle().analysis, grid).all_satisfied());
    std::vector<Analysis*> family{&circle(0.5).analysis, &circle(1.0).analysis, &circle(2.0).analysis};
    const std::vector<double> two{2.0};
    const InequalityReport spread = check_liyaq(std::span<Analysis* const>(family), two);
    // rows: p = 1 (h diam) then p = 2
    CHECK(spread.lhs.back() <= 1.05);
    const auto both = check_monotone_and_liyaq(std::span<Analysis* const>(family), grid);
    CHECK(both.size() == 4);
    for (const auto& r : both) CHECK(r.all_satisfied());
  }

  TEST_CASE("lichnerowicz-obata on the suspension") {
    const Space sphere = gen_sphere(2, 1.0, 1000);
    const Space susp = gen_suspension(gen_circle(1.0, 40), 30, 1.0);
    Analysis sa(sphere, default_scale(sphere), default_scale(sphere));
    Analysis xa(susp, default_scale(susp), default_scale(susp));
    const std::vector<double> grid{2.0};
    const InequalityReport self = check_lichnerowicz_obata(sa, sa, grid);
    CHECK(self.equality[0]);
    CHECK(self.extras["diameter_is_pi"].get<bool>());
    const InequalityReport r = check_lichnerowicz_obata(xa, sa, grid);
    CHECK(r.equality[0]);
    CHECK(r.extras["diameter_is_pi"].get<bool>());
    const auto on_susp = radial_integrals(susp, 0);
    CHECK(on_susp[0] == doctest::Approx(oracles::sphere_radial_integral([](double t) { return std::sin(t); })).epsilon(0.01));
    CHECK(on_susp[2] == doctest::Approx(oracles::sphere_radial_integral([](double t) { return t * t; })).epsilon(0.01));
  }

  TEST_CASE("grosjean and right continuity") {
    auto& c = circle();
    const std::vector<double> tail{10.0, 100.0};
    const InequalityReport g = grosjean_limit(c.analysis, tail, true);
    CHECK(g.all_satisfied());
    const auto values = g.extras["values"].get<std::vector<double>>();
    CHECK(values[0] == doctest::Approx(2.56).epsilon(0.04));
    CHECK(values[1] == doctest::Approx(2.09).epsilon(0.03));
    const std::vector<double> deltas{0.2, 0.1};
    const InequalityReport rc = right_continuity_probe(c.analysis, 2.0, deltas);
    CHECK(rc.all_satisfied());
  }

  TEST_CASE("names round trip") {
    for (auto q : {Inequality::matei, Inequality::buser, Inequality::liyaq, Inequality::lich_obata, Inequality::tau}) {
      CHECK(inequality_from_string(to_string(q)) == q);
    }
  }
}
