#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace pspectra {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Real values on the points of a space, indexed like the space.
class ScalarField {
 public:
  ScalarField() = default;
  /// Throws InvalidArgument when an entry is not finite.
  explicit ScalarField(Vector values);

  const Vector& values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  double operator[](Index i) const { return values_(i); }

 private:
  Vector values_;
};

/// A finite metric measure space (X, v): symmetric distance matrix plus a
/// probability vector. Immutable after construction; the constructor checks
/// the metric axioms and rejects violations with ValidationError.
///
/// Optional model coordinates (one row per point) and a free-form JSON `meta`
/// record travel with the space. Generators store the model name, its
/// parameters and the estimated fill radius in `meta`.
class FiniteMetricMeasureSpace {
 public:
  FiniteMetricMeasureSpace(Matrix dist, Vector mass, nlohmann::json meta = nlohmann::json::object(),
                           std::vector<std::string> labels = {}, Matrix coords = Matrix());

  Index size() const noexcept { return dist_.rows(); }
  double distance(Index i, Index j) const { return dist_(i, j); }
  const Matrix& distances() const noexcept { return dist_; }
  const Vector& mass() const noexcept { return mass_; }
  const nlohmann::json& meta() const noexcept { return meta_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Matrix& coords() const noexcept { return coords_; }
  bool has_coords() const noexcept { return coords_.rows() == size() && coords_.cols() > 0; }

  /// Largest pairwise distance; 0 for a single point.
  double max_distance() const noexcept { return diam_; }
  /// Metric comparison slack, 1e-9 * diam.
  double tolerance() const noexcept { return 1e-9 * diam_; }

  std::string model() const;
  std::optional<double> fill_radius() const;

  /// Point i of the result is point perm[i] of this space.
  FiniteMetricMeasureSpace permuted(std::span<const Index> perm) const;
  /// All distances multiplied by s > 0.
  FiniteMetricMeasureSpace scaled(double s) const;

 private:
  struct Trusted {};
  FiniteMetricMeasureSpace(Trusted, Matrix dist, Vector mass, nlohmann::json meta, std::vector<std::string> labels,
                           Matrix coords);
  void validate();

  Matrix dist_;
  Vector mass_;
  nlohmann::json meta_;
  std::vector<std::string> labels_;
  Matrix coords_;
  double diam_ = 0.0;
};

using Space = FiniteMetricMeasureSpace;

/// Neighborhood graph at scale h: i ~ j iff 0 < d(i, j) <= h (up to the
/// space's metric tolerance). Stored in CSR form, neighbors sorted by index.
class NeighborGraph {
 public:
  NeighborGraph(const Space& space, double h);

  double scale() const noexcept { return scale_; }
  Index size() const noexcept { return static_cast<Index>(offsets_.size()) - 1; }
  std::span<const Index> neighbors(Index i) const;
  std::span<const double> lengths(Index i) const;
  std::size_t edge_count() const noexcept { return targets_.size(); }

  /// Connected-component label per vertex, labels assigned in order of first
  /// appearance.
  std::vector<Index> components() const;
  bool connected() const;

 private:
  double scale_;
  std::vector<std::size_t> offsets_;
  std::vector<Index> targets_;
  std::vector<double> lengths_;
};

struct ConstantsSampleSpec {
  std::vector<double> radii;
  std::vector<Index> centers;
  std::vector<Index> probe_points;
  std::size_t probe_fields = 0;
  double h = 0.0;
  std::uint64_t seed = 0;
  /// Radii with 3r > diam: the segment ratio's outer ball is the whole space.
  std::vector<double> saturated_radii;
  /// (center, r, field) triples skipped because the Poincare ratio was 0/0
  /// or x/0.
  std::size_t poincare_skipped = 0;
};

/// Empirical lower bounds for the doubling, (1,1)-Poincare and segment
/// constants over a finite probe family.
struct EstimatedConstants {
  double kappa = 0.0;
  double tau = 0.0;
  double poincare_q = 1.0;
  double poincare_p = 1.0;
  double lambda_seg = 0.0;
  ConstantsSampleSpec sample_spec;
};

struct ConstantsOptions {
  /// Lip/graph scale; <= 0 selects default_scale(space).
  double h = 0.0;
  std::uint64_t seed = 0x5eedULL;
  Index max_centers = 16;
  /// Additional probe fields (typically cached eigenfunctions).
  std::vector<ScalarField> extra_probes;
};

/// Throws DegenerateSpace for n < 2.
double diameter(const Space& space);

/// Mass of the open ball {w : d(center, w) < r}.
double ball_mass(const Space& space, Index center, double r);

/// Pointwise Lipschitz constant at scale h: max over 0 < d(x, y) <= h of
/// |f(x) - f(y)| / d(x, y), and 0 where x has no such neighbor.
ScalarField lip_field(const Space& space, const ScalarField& f, double h);
ScalarField lip_field(const NeighborGraph& graph, const ScalarField& f);

/// Global Lipschitz constant, max over pairs a != b.
double global_lip(const Space& space, const ScalarField& f);

/// r_y(x) = d(x, y).
ScalarField distance_field(const Space& space, Index y);

/// Discrete segment functional: minimum, over shortest paths from x to y in
/// the h-graph, of the trapezoidal integral of f along the path.
/// Throws Disconnected when y is unreachable from x.
double segment_functional(const Space& space, const ScalarField& f, Index x, Index y, double h);

/// Segment integrals from one source to every vertex for several
/// nonnegative fields at once; unreachable vertices get +inf.
/// Result is (n x fields.size()).
Matrix segment_integrals_from(const NeighborGraph& graph, std::span<const ScalarField> fields, Index source);

EstimatedConstants estimate_constants(const Space& space, std::span<const double> radii, int probe_count,
                                      const ConstantsOptions& options = {});

/// Default connectivity scale: 3 x the generator's fill radius, or 1.5 x the
/// largest nearest-neighbor distance when the space carries none.
double default_scale(const Space& space);

/// Check a field against a space's point count; throws InvalidArgument.
void require_field(const Space& space, const ScalarField& f, const char* module, const char* operation);

}  // namespace pspectra
