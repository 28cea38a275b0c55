#include "pspectra/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pspectra/error.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "bounds";

void add_row(InequalityReport& r, double p, double lhs, double rhs, bool ok) {
  r.p_values.push_back(p);
  r.lhs.push_back(lhs);
  r.rhs.push_back(rhs);
  r.slack.push_back(rhs - lhs);
  r.satisfied.push_back(ok);
}

double spread(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi / *lo;
}

}  // namespace

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::cheeger: return "cheeger";
    case Provenance::eigensolver: return "eigensolver";
    case Provenance::diameter: return "diameter";
  }
  return "unknown";
}

std::string_view to_string(Inequality name) {
  switch (name) {
    case Inequality::matei: return "matei";
    case Inequality::buser: return "buser";
    case Inequality::valtorta: return "valtorta";
    case Inequality::gallot: return "gallot";
    case Inequality::monotone: return "monotone";
    case Inequality::liyaq: return "liyaq";
    case Inequality::lich_obata: return "lich_obata";
    case Inequality::grosjean: return "grosjean";
    case Inequality::right_continuity: return "right_continuity";
    case Inequality::tau: return "tau";
  }
  return "unknown";
}

Inequality inequality_from_string(std::string_view name) {
  for (auto v : {Inequality::matei, Inequality::buser, Inequality::valtorta, Inequality::gallot, Inequality::monotone,
                 Inequality::liyaq, Inequality::lich_obata, Inequality::grosjean, Inequality::right_continuity,
                 Inequality::tau}) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorKind::InvalidArgument, kModule, "suite", "unknown inequality '" + std::string(name) + "'");
}

bool InequalityReport::all_satisfied() const {
  return std::all_of(satisfied.begin(), satisfied.end(), [](bool b) { return b; });
}

Analysis::Analysis(const Space& space, double h, double epsilon, SolveOptions options, std::string label)
    : space_(&space), label_(std::move(label)), h_(h), epsilon_(epsilon), diameter_(pspectra::diameter(space)),
      options_(options) {
  if (!(h > 0.0) || !(epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "analysis", "h and epsilon must be positive");
}

const SpectralResult& Analysis::spectral(double p) {
  if (auto it = results_.find(p); it != results_.end()) return it->second;
  if (!problem_) problem_ = std::make_unique<PLaplacianProblem>(*space_, h_);
  std::vector<ScalarField> warm;
  if (auto it = results_.lower_bound(p); it != results_.begin()) warm.push_back(std::prev(it)->second.eigenfunction);
  return results_.emplace(p, problem_->solve(p, options_, warm)).first->second;
}

const CutResult& Analysis::cut() {
  if (!cut_) {
    std::optional<ScalarField> hint;
    if (space_->size() > 20) {
      if (!problem_) problem_ = std::make_unique<PLaplacianProblem>(*space_, h_);
      hint = problem_->p2_exact().eigenfunction;
    }
    cut_ = cheeger(*space_, epsilon_, hint, options_.seed);
  }
  return *cut_;
}

FValue Analysis::F(double p) {
  FValue out;
  out.p = p;
  if (p == kPInfinity) {
    out.provenance = Provenance::diameter;
    out.value = 2.0 / diameter_;
  } else if (p == 1.0) {
    out.provenance = Provenance::cheeger;
    out.cut = cut();
    out.value = out.cut->ratio;
  } else {
    if (!(p > 1.0)) throw Error(ErrorKind::InvalidExponent, kModule, "eval_F", "p must lie in [1, inf]");
    out.provenance = Provenance::eigensolver;
    out.spectral = spectral(p);
    out.value = out.spectral->lambda_root;
  }
  return out;
}

FValue eval_F(const Space& space, double p, double h, double epsilon, const SolveOptions& options) {
  if (space.size() == 1) {
    FValue out;
    out.p = p;
    out.infinite = true;
    out.value = std::numeric_limits<double>::infinity();
    out.provenance = p == kPInfinity ? Provenance::diameter : p == 1.0 ? Provenance::cheeger : Provenance::eigensolver;
    return out;
  }
  Analysis an(space, h, epsilon, options);
  return an.F(p);
}

double valtorta_bound(double p, double diam) {
  const double pi = std::numbers::pi;
  return 2.0 * pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(pi / p) * diam);
}

InequalityReport check_matei(Analysis& an, std::span<const double> p_grid, double tolerance) {
  InequalityReport r;
  r.name = Inequality::matei;
  r.subject = an.label();
  r.tolerance = tolerance;
  const double h = an.cut().ratio;
  for (double p : p_grid) {
    const double rhs = p * an.lambda_root(p);
    add_row(r, p, h, rhs, h <= rhs * (1.0 + tolerance));
  }
  return r;
}

InequalityReport check_buser(std::span<Analysis* const> family, std::span<const double> p_grid, double ceiling) {
  InequalityReport r;
  r.name = Inequality::buser;
  r.tolerance = ceiling;
  double fitted = 0.0;
  nlohmann::json per_space = nlohmann::json::array();
  for (Analysis* an : family) {
    const double h = an->cut().ratio;
    double local = 0.0;
    for (double p : p_grid) {
      const double lhs = an->lambda_root(p);
      const double base = std::pow(h + std::pow(h, p), 1.0 / p);
      add_row(r, p, lhs, ceiling * base, lhs <= ceiling * base);
      local = std::max(local, lhs / base);
    }
    per_space.push_back({{"subject", an->label()}, {"fitted_constant", local}});
    fitted = std::max(fitted, local);
  }
  r.subject = family.size() == 1 ? family[0]->label() : "family";
  r.fitted_constant = fitted;
  r.extras["per_space"] = per_space;
  return r;
}

InequalityReport check_buser(Analysis& an, std::span<const double> p_grid, double ceiling) {
  Analysis* one[] = {&an};
  return check_buser(std::span<Analysis* const>(one), p_grid, ceiling);
}

InequalityReport check_valtorta(Analysis& an, std::span<const double> p_grid, double tolerance) {
  InequalityReport r;
  r.name = Inequality::valtorta;
  r.subject = an.label();
  r.tolerance = tolerance;
  for (double p : p_grid) {
    const double lhs = valtorta_bound(p, an.diameter());
    const double rhs = an.lambda_root(p);
    add_row(r, p, lhs, rhs, lhs <= rhs * (1.0 + tolerance));
    r.equality.push_back(std::abs(lhs - rhs) <= tolerance * lhs);
  }
  return r;
}

InequalityReport check_gallot(Analysis& an, double tolerance) {
  InequalityReport r;
  r.name = Inequality::gallot;
  r.subject = an.label();
  r.tolerance = tolerance;
  const double lhs = 2.0 / an.diameter();
  const double rhs = an.cut().ratio;
  add_row(r, 1.0, lhs, rhs, lhs <= rhs * (1.0 + tolerance));
  r.equality.push_back(std::abs(lhs - rhs) <= tolerance * lhs);
  return r;
}

InequalityReport check_monotone(Analysis& an, std::span<const double> p_grid, double tolerance) {
  InequalityReport r;
  r.name = Inequality::monotone;
  r.subject = an.label();
  r.tolerance = tolerance;
  for (std::size_t i = 0; i + 1 < p_grid.size(); ++i) {
    const double lhs = p_grid[i] * an.lambda_root(p_grid[i]);
    const double rhs = p_grid[i + 1] * an.lambda_root(p_grid[i + 1]);
    add_row(r, p_grid[i + 1], lhs, rhs, lhs <= rhs * (1.0 + tolerance));
  }
  return r;
}

InequalityReport check_liyaq(std::span<Analysis* const> family, std::span<const double> p_grid, double bound) {
  InequalityReport r;
  r.name = Inequality::liyaq;
  r.subject = "family";
  r.tolerance = bound;
  std::vector<double> hd;
  for (Analysis* an : family) hd.push_back(an->cut().ratio * an->diameter());
  add_row(r, 1.0, spread(hd), bound, spread(hd) <= bound);
  for (double p : p_grid) {
    std::vector<double> ld;
    for (Analysis* an : family) ld.push_back(an->lambda_root(p) * an->diameter());
    add_row(r, p, spread(ld), bound, spread(ld) <= bound);
  }
  return r;
}

std::vector<InequalityReport> check_monotone_and_liyaq(std::span<Analysis* const> family, std::span<const double> p_grid,
                                                       double monotone_tolerance, double spread_bound) {
  std::vector<InequalityReport> out;
  for (Analysis* an : family) out.push_back(check_monotone(*an, p_grid, monotone_tolerance));
  out.push_back(check_liyaq(family, p_grid, spread_bound));
  return out;
}

InequalityReport check_lichnerowicz_obata(Analysis& an, Analysis& sphere, std::span<const double> p_grid,
                                          double tolerance) {
  InequalityReport r;
  r.name = Inequality::lich_obata;
  r.subject = an.label();
  r.tolerance = tolerance;
  bool any_equality = false;
  for (double p : p_grid) {
    const double lhs = sphere.lambda_root(p);
    const double rhs = an.lambda_root(p);
    add_row(r, p, lhs, rhs, rhs >= lhs * (1.0 - tolerance));
    const bool eq = std::abs(rhs - lhs) <= tolerance * lhs;
    r.equality.push_back(eq);
    any_equality = any_equality || eq;
  }
  r.extras["diameter"] = an.diameter();
  if (any_equality) r.extras["diameter_is_pi"] = std::abs(an.diameter() - std::numbers::pi) <= 0.05;
  return r;
}

InequalityReport grosjean_limit(Analysis& an, std::span<const double> p_tail, bool circle, double tolerance) {
  InequalityReport r;
  r.name = Inequality::grosjean;
  r.subject = an.label();
  r.tolerance = tolerance;
  std::vector<double> values;
  for (double p : p_tail) {
    const double v = an.diameter() * an.lambda_root(p);
    if (circle) {
      const double closed = valtorta_bound(p, 1.0);
      add_row(r, p, v, closed, std::abs(v - closed) <= tolerance * closed);
    } else {
      const double prev = values.empty() ? std::numeric_limits<double>::infinity() : values.back();
      add_row(r, p, v, prev, v < prev);
    }
    values.push_back(v);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < values.size(); ++i) decreasing = decreasing && values[i] < values[i - 1];
  r.extras["values"] = values;
  r.extras["decreasing"] = decreasing;
  if (!values.empty()) r.extras["final_gap"] = values.back() - 2.0;
  return r;
}

InequalityReport right_continuity_probe(Analysis& an, double q, std::span<const double> deltas) {
  InequalityReport r;
  r.name = Inequality::right_continuity;
  r.subject = an.label();
  std::vector<double> sorted(deltas.begin(), deltas.end());
  std::sort(sorted.rbegin(), sorted.rend());
  const double base = an.spectral(q).lambda;
  double previous = std::numeric_limits<double>::infinity();
  for (double delta : sorted) {
    const double gap = std::abs(an.spectral(q + delta).lambda - base);
    add_row(r, q + delta, gap, std::isinf(previous) ? gap : previous, gap <= previous);
    previous = gap;
  }
  r.extras["q"] = q;
  r.extras["lambda_q"] = base;
  r.extras["deltas"] = sorted;
  if (!sorted.empty()) r.extras["final_gap"] = previous;
  return r;
}

InequalityReport check_tau_bound(Analysis& an, double tau, double p) {
  InequalityReport r;
  r.name = Inequality::tau;
  r.subject = an.label();
  const double lhs = 1.0 / (tau * an.diameter());
  const double rhs = an.spectral(p).lambda;
  add_row(r, p, lhs, rhs, lhs <= rhs);
  r.extras["warning_only"] = true;
  r.extras["tau"] = tau;
  return r;
}

std::vector<double> radial_integrals(const Space& space, Index center) {
  std::vector<double> out(3, 0.0);
  for (Index x = 0; x < space.size(); ++x) {
    const double t = space.distance(center, x);
    const double m = space.mass()(x);
    out[0] += m * std::sin(t);
    out[1] += m * std::cos(t);
    out[2] += m * t * t;
  }
  return out;
}

}  // namespace pspectra
