#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pspectra/bounds.hpp"
#include "pspectra/generators.hpp"

namespace pspectra {

/// A relation between X and Y covering every point of both.
struct Correspondence {
  std::vector<std::pair<Index, Index>> pairs;
  std::string source_id, target_id;
  /// phi(x) for the map part (first pair of each x); filled by nearest_map,
  /// otherwise derived from `pairs`.
  std::vector<Index> map;
};

/// Throws InvalidCorrespondence unless every point of X and of Y is covered.
void validate(const Correspondence& corr, const Space& x, const Space& y);

Correspondence identity_correspondence(const Space& x);

/// max |d_X(x, x') - d_Y(y, y')| over pairs of pairs. The GH distance is at
/// most half of this.
double distortion(const Correspondence& corr, const Space& x, const Space& y);

struct GHBounds {
  double distortion = 0.0;
  double upper = 0.0;            ///< distortion / 2
  double lower = 0.0;            ///< |diam X - diam Y| / 2
  double distance_w1 = 0.0;      ///< W1 between the distance distributions
};
GHBounds gh_bounds(const Correspondence& corr, const Space& x, const Space& y);

/// Composition X -> Y -> Z (pairs (x, z) with a common y).
Correspondence compose(const Correspondence& xy, const Correspondence& yz);
Correspondence transpose(const Correspondence& corr);

/// Pairs each X point with its nearest Y point in model coordinates, then
/// each Y point with its nearest X point. Supported: equal model families
/// with equal parameters up to sampling (circle, interval, sphere, flat
/// torus, suspension) and flat torus -> circle of circumference a. Throws
/// IncompatibleModels otherwise.
Correspondence nearest_map(const Space& x, const Space& y);

/// max over Y of the distance to phi(X).
double image_density(const Correspondence& corr, const Space& y);

/// max over centers and radii of |ball_mass_X(x, r) - ball_mass_Y(phi(x), r)|.
double measure_discrepancy(const Correspondence& corr, const Space& x, const Space& y, std::span<const Index> centers,
                           std::span<const double> radii);

struct StageReport {
  ModelSpec spec;
  std::string id;
  std::string status = "ok";
  Index size = 0;
  double h = 0.0, epsilon = 0.0, diameter = 0.0;
};

struct ConvergenceReport {
  std::vector<StageReport> sequence;  ///< the last stage is the limit proxy
  std::vector<double> p_grid;
  std::vector<double> distortions;            ///< stage vs limit proxy
  std::vector<double> measure_discrepancies;  ///< stage vs limit proxy
  std::vector<double> epsilons;               ///< density of phi(stage) in the limit proxy
  std::vector<double> gh_upper, gh_lower;
  std::vector<std::vector<double>> F_table;   ///< [stage][p]; NaN for failed stages
};

using ScaleRule = std::function<double(const Space&)>;

struct ConvergenceOptions {
  ScaleRule h_rule;        ///< default: default_scale
  ScaleRule epsilon_rule;  ///< default: default_scale
  std::vector<double> radius_fractions{0.1, 0.25, 0.5};  ///< of the limit proxy diameter
  int centers = 16;
  SolveOptions solve;
};

/// Generates each stage, evaluates F on the p grid and measures every stage
/// against the last one through nearest_map. A failed stage is recorded
/// with its status and NaN entries; the experiment continues.
ConvergenceReport run_convergence_experiment(std::vector<ModelSpec> specs, std::span<const double> p_grid,
                                             const ConvergenceOptions& options = {});

}  // namespace pspectra
