#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pspectra/cheeger.hpp"
#include "pspectra/eigensolver.hpp"

namespace pspectra {

inline constexpr double kPInfinity = std::numeric_limits<double>::infinity();

enum class Provenance { cheeger, eigensolver, diameter };
std::string_view to_string(Provenance provenance);

/// F((Y, nu), p): h(Y) at p = 1, lambda_{1,p}^(1/p) on (1, inf), 2 / diam at
/// p = inf. A single point has F = inf by convention (`infinite`).
struct FValue {
  double p = 2.0;
  double value = 0.0;
  bool infinite = false;
  Provenance provenance = Provenance::eigensolver;
  std::optional<CutResult> cut;
  std::optional<SpectralResult> spectral;
};

/// Caches the expensive quantities of one space at fixed (h, epsilon): the
/// eigensolver state, one result per p and the Cheeger cut. Each new p is
/// warm-started from the result at the largest smaller p already computed.
class Analysis {
 public:
  Analysis(const Space& space, double h, double epsilon, SolveOptions options = {}, std::string label = {});

  const Space& space() const noexcept { return *space_; }
  const std::string& label() const noexcept { return label_; }
  double h() const noexcept { return h_; }
  double epsilon() const noexcept { return epsilon_; }
  double diameter() const noexcept { return diameter_; }
  const SolveOptions& options() const noexcept { return options_; }

  const SpectralResult& spectral(double p);
  double lambda_root(double p) { return spectral(p).lambda_root; }
  const CutResult& cut();
  FValue F(double p);

 private:
  const Space* space_;
  std::string label_;
  double h_, epsilon_, diameter_;
  SolveOptions options_;
  std::unique_ptr<PLaplacianProblem> problem_;
  std::map<double, SpectralResult> results_;
  std::optional<CutResult> cut_;
};

/// One-shot F evaluation. p = kPInfinity selects the diameter formula.
FValue eval_F(const Space& space, double p, double h, double epsilon, const SolveOptions& options = {});

enum class Inequality { matei, buser, valtorta, gallot, monotone, liyaq, lich_obata, grosjean, right_continuity, tau };
std::string_view to_string(Inequality name);
Inequality inequality_from_string(std::string_view name);

/// Rows compare lhs[i] <= rhs[i] (up to `tolerance`); slack = rhs - lhs.
struct InequalityReport {
  Inequality name = Inequality::matei;
  std::string subject;
  std::vector<double> p_values, lhs, rhs, slack;
  std::vector<bool> satisfied;
  std::vector<bool> equality;  ///< filled by checks with an equality case
  std::optional<double> fitted_constant;
  double tolerance = 0.0;
  nlohmann::json extras = nlohmann::json::object();

  bool all_satisfied() const;
};

/// 2 pi (p-1)^(1/p) / (p sin(pi/p) diam): the nonnegative-curvature lower
/// bound for lambda^(1/p), attained by circles.
double valtorta_bound(double p, double diam);

/// h / p <= lambda^(1/p), rows: lhs = h, rhs = p lambda^(1/p); relative tolerance.
InequalityReport check_matei(Analysis& an, std::span<const double> p_grid, double tolerance = 0.05);

/// lambda^(1/p) <= C (h + h^p)^(1/p): lhs = lambda^(1/p), rhs = ceiling (h + h^p)^(1/p).
/// fitted_constant = max lambda^(1/p) / (h + h^p)^(1/p).
InequalityReport check_buser(Analysis& an, std::span<const double> p_grid, double ceiling = 10.0);
/// Family version: one row per (space, p); fitted constant over all rows.
InequalityReport check_buser(std::span<Analysis* const> family, std::span<const double> p_grid, double ceiling = 10.0);

/// lhs = valtorta_bound, rhs = lambda^(1/p); equality when within tolerance.
InequalityReport check_valtorta(Analysis& an, std::span<const double> p_grid, double tolerance = 0.05);

/// lhs = 2 / diam, rhs = h; equality when within tolerance.
InequalityReport check_gallot(Analysis& an, double tolerance = 0.05);

/// Consecutive grid points: lhs = p_i lambda_i^(1/p_i), rhs = p_{i+1} lambda_{i+1}^(1/p_{i+1}).
InequalityReport check_monotone(Analysis& an, std::span<const double> p_grid, double tolerance = 1e-3);

/// Spread max/min over the family of lambda^(1/p) diam (per grid p) and of
/// h diam (row p = 1): lhs = spread, rhs = bound.
InequalityReport check_liyaq(std::span<Analysis* const> family, std::span<const double> p_grid, double bound = 20.0);

/// Monotonicity per member plus the family spread report (last element).
std::vector<InequalityReport> check_monotone_and_liyaq(std::span<Analysis* const> family, std::span<const double> p_grid,
                                                       double monotone_tolerance = 1e-3, double spread_bound = 20.0);

/// lhs = lambda^(1/p) of the sphere baseline, rhs = lambda^(1/p) of X; rows
/// pass when rhs >= lhs (1 - tolerance). Equality rows additionally check
/// diam X = pi +- 0.05 (extras.diameter_is_pi).
InequalityReport check_lichnerowicz_obata(Analysis& an, Analysis& sphere, std::span<const double> p_grid,
                                          double tolerance = 0.05);

/// diam lambda^(1/p) along a tail of exponents. On a circle every row is
/// compared with the closed form (relative tolerance); elsewhere rows pass
/// when the sequence decreases. extras holds the values and the final gap to 2.
InequalityReport grosjean_limit(Analysis& an, std::span<const double> p_tail, bool circle, double tolerance = 0.05);

/// |lambda_{q+delta} - lambda_q| for each delta (sorted decreasing); rows pass
/// when the gap shrinks with delta; extras.final_gap is the last gap.
InequalityReport right_continuity_probe(Analysis& an, double q, std::span<const double> deltas);

/// Warning-level consistency: lhs = 1 / (tau diam), rhs = lambda_{1,p}.
InequalityReport check_tau_bound(Analysis& an, double tau, double p);

/// sum g(d(center, x)) m(x) on the given space for g in {sin, cos, t^2}.
std::vector<double> radial_integrals(const Space& space, Index center);

}  // namespace pspectra
