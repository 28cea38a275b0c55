#include "pspectra/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "pspectra/bounds.hpp"
#include "pspectra/cheeger.hpp"
#include "pspectra/eigensolver.hpp"
#include "pspectra/error.hpp"
#include "pspectra/functionals.hpp"
#include "pspectra/ghseq.hpp"
#include "pspectra/oracles/oracles.hpp"

namespace pspectra {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Model spaces and their analyses, built on first use and shared by criteria.
class Workspace {
 public:
  explicit Workspace(const AcceptanceOptions& options) : options_(options) {
    solve_.seed = options.seed;
    solve_.threads = options.threads;
  }

  const SolveOptions& solve_options() const { return solve_; }

  // circle of radius r with N = 400 at h = epsilon = 3 mesh
  Analysis& circle(double r) {
    const std::string key = "circle r=" + fmt(r);
    return analysis(key, [r] { return gen_circle(r, 400); }, [](const Space& s) {
      return 3.0 * s.meta()["mesh"].get<double>();
    });
  }
  Analysis& sphere() {
    return analysis("sphere N=2000", [this] { return gen_sphere(2, 1.0, 2000, options_.seed); }, default_scale);
  }
  Analysis& torus() {
    return analysis("torus 2pi x 2pi N=1600", [this] { return gen_flat_torus(2 * kPi, 2 * kPi, 1600, options_.seed); },
                    default_scale);
  }
  Analysis& suspension() {
    return analysis("suspension S0*S1 m=1", [] { return gen_suspension(gen_circle(1.0, 50), 40, 1.0); }, default_scale);
  }

 private:
  Analysis& analysis(const std::string& key, const std::function<Space()>& make,
                     const std::function<double(const Space&)>& scale) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      auto entry = std::make_unique<Entry>();
      entry->space = std::make_unique<Space>(make());
      const double h = scale(*entry->space);
      entry->analysis = std::make_unique<Analysis>(*entry->space, h, h, solve_, key);
      it = entries_.emplace(key, std::move(entry)).first;
    }
    return *it->second->analysis;
  }

  struct Entry {
    std::unique_ptr<Space> space;
    std::unique_ptr<Analysis> analysis;
  };
  AcceptanceOptions options_;
  SolveOptions solve_;
  std::map<std::string, std::unique_ptr<Entry>> entries_;
};

CriterionResult circle_oracle(Workspace& ws) {
  CriterionResult out{1, "circle eigenvalue oracle"};
  Analysis& an = ws.circle(1.0);
  bool ok = true;
  std::ostringstream detail;
  for (double p : {1.5, 2.0, 3.0, 5.0}) {
    const double value = an.diameter() * an.lambda_root(p);
    const double oracle = oracles::shooting_half_period(p);
    const bool row = rel(value, oracle) <= 0.05;
    ok = ok && row;
    detail << "p=" << fmt(p) << " diam*lambda^(1/p)=" << fmt(value) << " vs " << fmt(oracle) << "; ";
    out.data["rows"].push_back({{"p", p}, {"value", value}, {"oracle", oracle}, {"pass", row}});
  }
  out.passed = ok;
  out.detail = detail.str() + "tol 5%";
  return out;
}

CriterionResult cross_solver(Workspace& ws) {
  CriterionResult out{2, "cross-solver p=2 equivalence"};
  bool ok = true;
  std::ostringstream detail;
  for (Analysis* an : {&ws.circle(1.0), &ws.sphere(), &ws.torus()}) {
    const double descent = an->spectral(2.0).lambda;
    const double exact = solve_p2_exact(an->space(), an->h()).lambda;
    const double gap = rel(descent, exact);
    const bool row = gap <= 0.02;
    ok = ok && row;
    detail << an->label() << ": " << fmt(descent) << " vs " << fmt(exact) << " (" << fmt(100 * gap, 3) << "%); ";
    out.data["rows"].push_back({{"space", an->label()}, {"solve", descent}, {"p2_exact", exact}, {"gap", gap}, {"pass", row}});
  }
  out.passed = ok;
  out.detail = detail.str() + "tol 2%";
  return out;
}

CriterionResult sphere_value(Workspace& ws) {
  CriterionResult out{3, "sphere lichnerowicz value"};
  Analysis& an = ws.sphere();
  const double lambda = an.spectral(2.0).lambda;
  const NeighborGraph graph(an.space(), an.h());
  double harmonic = std::numeric_limits<double>::infinity();
  for (int c = 0; c < 3; ++c) {
    harmonic = std::min(harmonic, rayleigh_p(graph, an.space().mass(), ScalarField(an.space().coords().col(c)), 2.0));
  }
  out.passed = std::abs(lambda - 2.0) <= 0.15 && std::abs(harmonic - 2.0) <= 0.15;
  out.detail = "lambda_{1,2}=" + fmt(lambda) + ", degree-1 harmonic quotient=" + fmt(harmonic) + "; target 2 +- 0.15";
  out.data = {{"lambda", lambda}, {"harmonic_oracle", harmonic}};
  return out;
}

CriterionResult grosjean(Workspace& ws) {
  CriterionResult out{4, "grosjean trend on the circle"};
  Analysis& an = ws.circle(1.0);
  const std::vector<double> tail{10.0, 20.0, 50.0, 100.0};
  const InequalityReport report = grosjean_limit(an, tail, true, 0.05);
  const auto values = report.extras["values"].get<std::vector<double>>();
  const bool decreasing = report.extras["decreasing"].get<bool>();
  const double last = values.back();
  out.passed = report.all_satisfied() && decreasing && last >= 2.0 && last <= 2.2;
  std::ostringstream detail;
  for (std::size_t i = 0; i < tail.size(); ++i) detail << "p=" << fmt(tail[i]) << ": " << fmt(values[i]) << " vs " << fmt(report.rhs[i]) << "; ";
  detail << (decreasing ? "decreasing" : "NOT decreasing") << ", final in [2, 2.2]: " << (last >= 2.0 && last <= 2.2 ? "yes" : "no");
  out.detail = detail.str();
  out.data = {{"values", values}, {"closed_form", report.rhs}, {"decreasing", decreasing}};
  return out;
}

CriterionResult matei(Workspace& ws) {
  CriterionResult out{5, "matei inequality"};
  const std::vector<double> grid{1.5, 2.0, 3.0};
  bool ok = true;
  std::ostringstream detail;
  // the cut uses epsilon = 3 x fill radius; the circle's fill radius is mesh / 2
  Analysis& circle = ws.circle(1.0);
  const double circle_eps = 3.0 * circle.space().fill_radius().value();
  Analysis circle_cut(circle.space(), circle.h(), circle_eps, ws.solve_options(), "circle r=1");
  for (Analysis* an : {&circle, &ws.sphere(), &ws.torus()}) {
    InequalityReport report;
    if (an == &circle) {
      report.name = Inequality::matei;
      const double h = circle_cut.cut().ratio;
      for (double p : grid) {
        const double rhs = p * an->lambda_root(p);
        report.p_values.push_back(p);
        report.lhs.push_back(h);
        report.rhs.push_back(rhs);
        report.slack.push_back(rhs - h);
        report.satisfied.push_back(h <= rhs);
      }
    } else {
      report = check_matei(*an, grid, 0.05);
    }
    double min_slack = *std::min_element(report.slack.begin(), report.slack.end());
    ok = ok && min_slack >= 0.0;
    detail << an->label() << ": h=" << fmt(report.lhs[0]) << " min slack " << fmt(min_slack) << "; ";
    out.data["rows"].push_back({{"space", an->label()}, {"h", report.lhs[0]}, {"rhs", report.rhs}, {"min_slack", min_slack}});
  }
  out.passed = ok;
  out.detail = detail.str() + "need slack >= 0";
  return out;
}

CriterionResult buser(Workspace& ws) {
  CriterionResult out{6, "buser-type fitted constant"};
  const std::vector<double> grid{1.5, 2.0, 3.0};
  std::vector<Analysis*> family{&ws.circle(0.5), &ws.circle(1.0), &ws.circle(2.0), &ws.sphere(), &ws.torus()};
  const InequalityReport report = check_buser(std::span<Analysis* const>(family), grid, 10.0);
  std::vector<double> circle_c;
  std::ostringstream detail;
  for (const auto& row : report.extras["per_space"]) {
    const double c = row["fitted_constant"].get<double>();
    if (row["subject"].get<std::string>().rfind("circle", 0) == 0) circle_c.push_back(c);
    detail << row["subject"].get<std::string>() << " C=" << fmt(c) << "; ";
  }
  const auto [lo, hi] = std::minmax_element(circle_c.begin(), circle_c.end());
  const double variation = (*hi - *lo) / *lo;
  const bool bounded = *report.fitted_constant <= 10.0;
  out.passed = bounded && variation < 0.10;
  detail << "max C=" << fmt(*report.fitted_constant) << " (<= 10: " << (bounded ? "yes" : "no") << "), circle C spread "
         << fmt(100 * variation, 3) << "% (< 10%: " << (variation < 0.10 ? "yes" : "no") << ")";
  out.detail = detail.str();
  out.data = {{"fitted_constant", *report.fitted_constant}, {"per_space", report.extras["per_space"]}, {"circle_variation", variation}};
  return out;
}

CriterionResult gallot(Workspace& ws) {
  CriterionResult out{7, "gallot equality on the circle"};
  Analysis& circle = ws.circle(1.0);
  const double hd = circle.cut().ratio * circle.diameter();
  const InequalityReport sphere = check_gallot(ws.sphere(), 0.05);
  const bool strict = sphere.rhs[0] > sphere.lhs[0] && !sphere.equality[0];
  out.passed = hd >= 2.0 * 0.8 && hd <= 2.0 * 1.25 && strict;
  out.detail = "circle h*diam=" + fmt(hd) + " (window [1.6, 2.5]); sphere h=" + fmt(sphere.rhs[0]) + " > 2/diam=" +
               fmt(sphere.lhs[0]) + (strict ? " strictly" : " NOT strictly");
  out.data = {{"circle_h_diam", hd}, {"sphere_h", sphere.rhs[0]}, {"sphere_two_over_diam", sphere.lhs[0]}};
  return out;
}

CriterionResult monotone(Workspace& ws) {
  CriterionResult out{8, "monotonicity of p lambda^(1/p)"};
  const std::vector<double> grid{1.5, 2.0, 3.0, 5.0, 10.0};
  bool ok = true;
  std::ostringstream detail;
  for (Analysis* an : {&ws.circle(0.5), &ws.circle(1.0), &ws.circle(2.0), &ws.sphere(), &ws.torus()}) {
    const InequalityReport report = check_monotone(*an, grid, 1e-3);
    ok = ok && report.all_satisfied();
    std::vector<double> values{report.lhs[0]};
    values.insert(values.end(), report.rhs.begin(), report.rhs.end());
    detail << an->label() << (report.all_satisfied() ? " ok" : " FAIL") << "; ";
    out.data["rows"].push_back({{"space", an->label()}, {"p_lambda_root", values}, {"pass", report.all_satisfied()}});
  }
  out.passed = ok;
  out.detail = detail.str() + "grid {1.5,2,3,5,10}, tol 1e-3";
  return out;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

CriterionResult continuity(Workspace& ws) {
  CriterionResult out{9, "continuity trend along GH sequences"};
  ConvergenceOptions copts;
  copts.solve = ws.solve_options();
  std::vector<ModelSpec> refinement;
  for (Index n : {50, 100, 200, 400}) {
    ModelSpec s;
    s.model = Model::circle;
    s.sample_count = n;
    refinement.push_back(s);
  }
  const std::vector<double> grid{2.0, 5.0};
  const ConvergenceReport ref = run_convergence_experiment(refinement, grid, copts);

  bool ok = true;
  std::ostringstream detail;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::vector<double> gaps;
    for (std::size_t s = 1; s < ref.F_table.size(); ++s) gaps.push_back(std::abs(ref.F_table[s][k] - ref.F_table[s - 1][k]));
    double factor = 0.0;
    for (std::size_t i = 1; i < gaps.size(); ++i) factor += gaps[i - 1] / gaps[i];
    factor /= static_cast<double>(gaps.size() - 1);
    ok = ok && factor >= 1.5;
    detail << "p=" << fmt(grid[k]) << " shrink " << fmt(factor, 3) << "; ";
    out.data["refinement"]["shrink"].push_back(factor);
  }
  const bool ref_dec = strictly_decreasing(ref.distortions) && strictly_decreasing(ref.measure_discrepancies);
  ok = ok && ref_dec;
  detail << "refinement diagnostics " << (ref_dec ? "decreasing" : "NOT decreasing") << "; ";
  out.data["refinement"]["F"] = ref.F_table;
  out.data["refinement"]["distortions"] = ref.distortions;
  out.data["refinement"]["discrepancies"] = ref.measure_discrepancies;

  std::vector<ModelSpec> collapse;
  for (double b : {0.5, 0.1, 0.02}) {
    ModelSpec s;
    s.model = Model::flat_torus;
    s.a = 2 * kPi;
    s.b = b;
    s.sample_count = 800;
    collapse.push_back(s);
  }
  ModelSpec limit;
  limit.model = Model::circle;
  limit.sample_count = 400;
  collapse.push_back(limit);
  const std::vector<double> p2{2.0};
  const ConvergenceReport col = run_convergence_experiment(collapse, p2, copts);
  const double f_last = col.F_table[2][0], f_circle = col.F_table[3][0];
  const double gap = rel(f_last, f_circle);
  const bool col_dec = strictly_decreasing(col.distortions) && strictly_decreasing(col.measure_discrepancies);
  ok = ok && gap <= 0.10 && col_dec;
  detail << "collapse |F-F_circle|=" << fmt(100 * gap, 3) << "% (<= 10%), diagnostics " << (col_dec ? "decreasing" : "NOT decreasing");
  out.data["collapse"] = {{"F", col.F_table}, {"distortions", col.distortions}, {"discrepancies", col.measure_discrepancies}, {"gap", gap}};
  out.passed = ok;
  out.detail = detail.str();
  return out;
}

CriterionResult suspension(Workspace& ws) {
  CriterionResult out{10, "suspension identity"};
  Analysis& an = ws.suspension();
  const Space& susp = an.space();
  // embedded coordinates of (t, theta) on the unit sphere
  Matrix xyz(susp.size(), 3);
  for (Index i = 0; i < susp.size(); ++i) {
    const double t = susp.coords()(i, 0), th = susp.coords()(i, 1);
    xyz.row(i) << std::sin(t) * std::cos(th), std::sin(t) * std::sin(th), std::cos(t);
  }
  const Space round = sphere_from_coords(xyz, 1.0);
  const double max_err = (susp.distances() - round.distances()).cwiseAbs().maxCoeff();
  const bool metric_ok = max_err <= 1e-9;

  // radial integrals from the pole against a quadrature of the round sphere
  Analysis& sph = ws.sphere();
  const std::vector<double> on_susp = radial_integrals(susp, 0);
  const std::vector<double> on_sphere = radial_integrals(sph.space(), 0);
  const std::vector<std::function<double(double)>> gs{[](double t) { return std::sin(t); },
                                                     [](double t) { return std::cos(t); },
                                                     [](double t) { return t * t; }};
  const char* names[] = {"sin", "cos", "t^2"};
  bool radial_ok = true;
  std::ostringstream detail;
  detail << "metric err " << fmt(max_err, 2) << "; ";
  for (std::size_t k = 0; k < 3; ++k) {
    // scale of g for the 1% test: cos integrates to 0, so compare against mean |g|
    const double scale = std::max(std::abs(on_sphere[k]), oracles::sphere_radial_integral([&](double t) { return std::abs(gs[k](t)); }));
    const double err = std::abs(on_susp[k] - on_sphere[k]) / scale;
    radial_ok = radial_ok && err <= 0.01;
    detail << names[k] << " " << fmt(on_susp[k]) << " vs " << fmt(on_sphere[k]) << "; ";
    out.data["radial"].push_back({{"g", names[k]}, {"suspension", on_susp[k]}, {"sphere", on_sphere[k]},
                                  {"exact", oracles::sphere_radial_integral(gs[k])}, {"rel_err", err}});
  }
  const double ls = an.spectral(2.0).lambda, lb = sph.spectral(2.0).lambda;
  const bool lambda_ok = rel(ls, lb) <= 0.05;
  detail << "lambda_{1,2} " << fmt(ls) << " vs sphere " << fmt(lb) << " (" << fmt(100 * rel(ls, lb), 3) << "%)";
  out.passed = metric_ok && radial_ok && lambda_ok;
  out.detail = detail.str();
  out.data["metric_error"] = max_err;
  out.data["lambda"] = {{"suspension", ls}, {"sphere", lb}};
  return out;
}

Space random_space(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix x(n, 2);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
  Vector m(n);
  for (Index i = 0; i < n; ++i) m(i) = 0.2 + unit(rng);
  m /= m.sum();
  return Space(std::move(d), std::move(m), nlohmann::json::object(), {}, std::move(x));
}

CriterionResult exact_vs_sweep(const AcceptanceOptions& options) {
  CriterionResult out{11, "exact vs sweep cheeger"};
  std::mt19937_64 rng(options.seed ^ 0x11ULL);
  int violations = 0, equalities = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<Index> size(6, 16);
    const Space s = random_space(rng, size(rng));
    const double eps = default_scale(s);
    const CutResult exact = exact_cheeger(s, eps);
    std::vector<ScalarField> fields;
    try {
      fields.push_back(solve_p2_exact(s, eps).eigenfunction);
    } catch (const Error&) {
    }
    for (Index y = 0; y < s.size(); ++y) fields.push_back(distance_field(s, y));
    Vector indicator = Vector::Zero(s.size());
    for (Index i : exact.subset) indicator(i) = 1.0;
    const CutResult seeded = sweep_cheeger(s, ScalarField(indicator), eps);
    for (const auto& f : fields) {
      if (f.values().minCoeff() == f.values().maxCoeff()) continue;
      if (sweep_cheeger(s, f, eps).ratio < exact.ratio * (1.0 - 1e-12)) ++violations;
    }
    if (seeded.ratio < exact.ratio * (1.0 - 1e-12)) ++violations;
    if (std::abs(seeded.ratio - exact.ratio) <= 1e-12 * exact.ratio) ++equalities;
    out.data["instances"].push_back({{"n", s.size()}, {"exact", exact.ratio}, {"seeded_sweep", seeded.ratio}});
  }
  out.passed = violations == 0 && equalities >= 5;
  out.detail = "20 spaces (n in [6, 16]): sweep below exact " + std::to_string(violations) +
               " times; indicator-seeded equality on " + std::to_string(equalities) + "/20 (need >= 5)";
  return out;
}

CriterionResult functional_properties(const AcceptanceOptions& options) {
  CriterionResult out{12, "functional properties"};
  std::mt19937_64 rng(options.seed ^ 0x12ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss;
  int fail_invariance = 0, fail_lipschitz = 0, fail_monotone = 0, fail_residual = 0;
  double worst_invariance = 0.0, worst_residual = 0.0;
  constexpr int kTrials = 10000;
  for (int trial = 0; trial < kTrials; ++trial) {
    std::uniform_int_distribution<Index> size(3, 24);
    const Space s = random_space(rng, size(rng));
    const Index n = s.size();
    Vector f(n), g(n);
    for (Index i = 0; i < n; ++i) {
      f(i) = gauss(rng);
      g(i) = f(i) + 0.5 * gauss(rng);
    }
    const double p = 1.5 + 6.5 * unit(rng);
    const double q = p + 4.0 * unit(rng);
    const double h = s.max_distance() * (0.2 + 0.8 * unit(rng));
    const Vector& m = s.mass();

    const NeighborGraph graph(s, h);
    const double alpha = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + 10.0 * unit(rng));
    const double beta = 10.0 * gauss(rng);
    const Vector moved = (alpha * f.array() + beta).matrix();
    const double r0 = rayleigh_p(graph, m, ScalarField(f), p);
    const double r1 = rayleigh_p(graph, m, ScalarField(moved), p);
    const double inv = rel(r1, r0);
    worst_invariance = std::max(worst_invariance, inv);
    if (inv > 1e-12) ++fail_invariance;

    const CenteredNorm cf = centered_norm(m, f, p), cg = centered_norm(m, g, p);
    if (std::abs(cf.c_p - cg.c_p) > lp_norm(m, f - g, p) * (1.0 + 1e-12)) ++fail_lipschitz;

    const CenteredNorm cq = centered_norm(m, f, q);
    if (!(cf.c_p <= cq.c_p * (1.0 + 1e-12) && cq.c_p <= lp_norm(m, f, q) * (1.0 + 1e-12))) ++fail_monotone;

    const double res = std::abs(cf.residual) / std::pow(lp_norm(m, f, p), p - 1.0);
    worst_residual = std::max(worst_residual, res);
    if (res > 1e-10) ++fail_residual;
  }
  const int failures = fail_invariance + fail_lipschitz + fail_monotone + fail_residual;
  out.passed = failures == 0;
  out.detail = std::to_string(kTrials) + " trials, p in [1.5, 8]: invariance " + std::to_string(fail_invariance) +
               " (worst " + fmt(worst_invariance, 2) + "), c_p 1-Lipschitz " + std::to_string(fail_lipschitz) +
               ", c_p monotone " + std::to_string(fail_monotone) + ", a_p residual " + std::to_string(fail_residual) +
               " (worst " + fmt(worst_residual, 2) + ") failures";
  out.data = {{"trials", kTrials},
              {"invariance_failures", fail_invariance},
              {"lipschitz_failures", fail_lipschitz},
              {"monotone_failures", fail_monotone},
              {"residual_failures", fail_residual},
              {"worst_invariance", worst_invariance},
              {"worst_residual", worst_residual}};
  return out;
}

CriterionResult right_continuity(Workspace& ws) {
  CriterionResult out{13, "right-continuity probe"};
  const std::vector<double> deltas{0.2, 0.1, 0.05};
  const InequalityReport report = right_continuity_probe(ws.circle(1.0), 2.0, deltas);
  const double last = report.lhs.back();
  out.passed = report.all_satisfied() && last <= 0.05;
  std::ostringstream detail;
  for (std::size_t i = 0; i < deltas.size(); ++i) detail << "delta=" << fmt(deltas[i]) << " gap " << fmt(report.lhs[i], 3) << "; ";
  detail << (report.all_satisfied() ? "decreasing" : "NOT decreasing") << ", final <= 0.05: " << (last <= 0.05 ? "yes" : "no");
  out.detail = detail.str();
  out.data = {{"gaps", report.lhs}, {"lambda_q", report.extras["lambda_q"]}};
  return out;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  Workspace ws(options);
  using Runner = std::function<CriterionResult()>;
  const std::vector<std::pair<int, Runner>> criteria{
      {1, [&] { return circle_oracle(ws); }},   {2, [&] { return cross_solver(ws); }},
      {3, [&] { return sphere_value(ws); }},    {4, [&] { return grosjean(ws); }},
      {5, [&] { return matei(ws); }},           {6, [&] { return buser(ws); }},
      {7, [&] { return gallot(ws); }},          {8, [&] { return monotone(ws); }},
      {9, [&] { return continuity(ws); }},      {10, [&] { return suspension(ws); }},
      {11, [&] { return exact_vs_sweep(options); }}, {12, [&] { return functional_properties(options); }},
      {13, [&] { return right_continuity(ws); }},
  };
  std::vector<CriterionResult> results;
  for (const auto& [id, run] : criteria) {
    if (!options.only.empty() && !options.only.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r.id = id;
      r.name = "criterion " + std::to_string(id);
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    if (options.progress) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      *options.progress << "criterion " << id << " finished in " << fmt(secs, 3) << " s" << std::endl;
    }
    results.push_back(std::move(r));
  }
  return results;
}

std::string format_line(const CriterionResult& r) {
  char head[32];
  std::snprintf(head, sizeof head, "%s %2d ", r.passed ? "PASS" : "FAIL", r.id);
  return std::string(head) + r.name + ": " + r.detail;
}

nlohmann::json to_json(const std::vector<CriterionResult>& results) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : results) {
    out.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"data", r.data}});
  }
  return out;
}

}  // namespace pspectra
