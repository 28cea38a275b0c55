#include "pspectra/mmspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "pspectra/error.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "mmspace";

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& what) {
  throw Error(kind, kModule, op, what);
}

void check_index(const Space& space, Index i, const char* op) {
  if (i < 0 || i >= space.size()) {
    fail(ErrorKind::InvalidArgument, op, "point index " + std::to_string(i) + " out of range");
  }
}

}  // namespace

ScalarField::ScalarField(Vector values) : values_(std::move(values)) {
  if (!values_.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, kModule, "ScalarField", "field has non-finite entries");
  }
}

void require_field(const Space& space, const ScalarField& f, const char* module, const char* operation) {
  if (f.size() != space.size()) {
    throw Error(ErrorKind::InvalidArgument, module, operation,
                "field length " + std::to_string(f.size()) + " does not match space size " +
                    std::to_string(space.size()));
  }
}

FiniteMetricMeasureSpace::FiniteMetricMeasureSpace(Matrix dist, Vector mass, nlohmann::json meta,
                                                   std::vector<std::string> labels, Matrix coords)
    : dist_(std::move(dist)),
      mass_(std::move(mass)),
      meta_(std::move(meta)),
      labels_(std::move(labels)),
      coords_(std::move(coords)) {
  validate();
}

FiniteMetricMeasureSpace::FiniteMetricMeasureSpace(Trusted, Matrix dist, Vector mass, nlohmann::json meta,
                                                   std::vector<std::string> labels, Matrix coords)
    : dist_(std::move(dist)),
      mass_(std::move(mass)),
      meta_(std::move(meta)),
      labels_(std::move(labels)),
      coords_(std::move(coords)) {
  diam_ = dist_.size() > 0 ? dist_.maxCoeff() : 0.0;
}

void FiniteMetricMeasureSpace::validate() {
  constexpr const char* op = "construct";
  const Index n = dist_.rows();
  if (n < 1 || dist_.cols() != n) fail(ErrorKind::ValidationError, op, "distance matrix must be square and nonempty");
  if (mass_.size() != n) fail(ErrorKind::ValidationError, op, "mass length does not match point count");
  if (!dist_.allFinite()) fail(ErrorKind::ValidationError, op, "distance matrix has non-finite entries");
  if (!mass_.allFinite()) fail(ErrorKind::ValidationError, op, "mass vector has non-finite entries");
  if (!labels_.empty() && static_cast<Index>(labels_.size()) != n) {
    fail(ErrorKind::ValidationError, op, "label count does not match point count");
  }
  if (coords_.size() > 0 && coords_.rows() != n) fail(ErrorKind::ValidationError, op, "coords row count mismatch");

  diam_ = dist_.maxCoeff();
  const double tol = tolerance();
  for (Index i = 0; i < n; ++i) {
    if (dist_(i, i) != 0.0) fail(ErrorKind::ValidationError, op, "nonzero self-distance at " + std::to_string(i));
    for (Index j = i + 1; j < n; ++j) {
      const double a = dist_(i, j), b = dist_(j, i);
      if (std::abs(a - b) > tol) {
        fail(ErrorKind::ValidationError, op,
             "asymmetric distance at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      if (a <= 0.0 || b <= 0.0) {
        fail(ErrorKind::ValidationError, op,
             "non-positive distance between distinct points " + std::to_string(i) + " and " + std::to_string(j));
      }
      if (a != b) dist_(i, j) = dist_(j, i) = 0.5 * (a + b);
    }
  }

  if ((mass_.array() <= 0.0).any()) fail(ErrorKind::ValidationError, op, "mass entries must be positive");
  if (std::abs(mass_.sum() - 1.0) > 1e-12) fail(ErrorKind::ValidationError, op, "mass does not sum to 1");

  const auto violates = [&](Index i, Index j, Index k) { return dist_(i, k) > dist_(i, j) + dist_(j, k) + tol; };
  if (n <= 512) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) {
        // d(i, k) <= d(i, j) + d(j, k) for all k, vectorized over k
        const double slack = (dist_.col(i).array() - dist_(i, j) - dist_.col(j).array()).maxCoeff();
        if (slack > tol) {
          for (Index k = 0; k < n; ++k) {
            if (violates(i, j, k)) {
              fail(ErrorKind::ValidationError, op,
                   "triangle inequality violated for (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                       std::to_string(k) + ")");
            }
          }
        }
      }
    }
  } else {
    std::mt19937_64 rng(0x7121a9c1eULL);
    std::uniform_int_distribution<Index> pick(0, n - 1);
    for (int t = 0; t < 100000; ++t) {
      const Index i = pick(rng), j = pick(rng), k = pick(rng);
      if (violates(i, j, k)) {
        fail(ErrorKind::ValidationError, op,
             "triangle inequality violated for (" + std::to_string(i) + ", " + std::to_string(j) + ", " +
                 std::to_string(k) + ")");
      }
    }
  }
}

std::string FiniteMetricMeasureSpace::model() const {
  if (meta_.is_object() && meta_.contains("model") && meta_["model"].is_string()) return meta_["model"].get<std::string>();
  return {};
}

std::optional<double> FiniteMetricMeasureSpace::fill_radius() const {
  if (meta_.is_object() && meta_.contains("fill_radius") && meta_["fill_radius"].is_number()) {
    return meta_["fill_radius"].get<double>();
  }
  return std::nullopt;
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::permuted(std::span<const Index> perm) const {
  const Index n = size();
  if (static_cast<Index>(perm.size()) != n) fail(ErrorKind::InvalidArgument, "permuted", "permutation length mismatch");
  std::vector<char> seen(n, 0);
  for (Index p : perm) {
    if (p < 0 || p >= n || seen[p]) fail(ErrorKind::InvalidArgument, "permuted", "not a permutation");
    seen[p] = 1;
  }
  Matrix d(n, n);
  Vector m(n);
  for (Index i = 0; i < n; ++i) {
    m(i) = mass_(perm[i]);
    for (Index j = 0; j < n; ++j) d(i, j) = dist_(perm[i], perm[j]);
  }
  std::vector<std::string> labels;
  if (!labels_.empty()) {
    for (Index i = 0; i < n; ++i) labels.push_back(labels_[perm[i]]);
  }
  Matrix c;
  if (has_coords()) {
    c.resize(n, coords_.cols());
    for (Index i = 0; i < n; ++i) c.row(i) = coords_.row(perm[i]);
  }
  return FiniteMetricMeasureSpace(Trusted{}, std::move(d), std::move(m), meta_, std::move(labels), std::move(c));
}

FiniteMetricMeasureSpace FiniteMetricMeasureSpace::scaled(double s) const {
  if (!(s > 0.0) || !std::isfinite(s)) fail(ErrorKind::InvalidArgument, "scaled", "scale must be positive");
  nlohmann::json meta = meta_;
  if (auto fr = fill_radius()) meta["fill_radius"] = *fr * s;
  return FiniteMetricMeasureSpace(Trusted{}, dist_ * s, mass_, std::move(meta), labels_, coords_);
}

// ---------------------------------------------------------------------------

NeighborGraph::NeighborGraph(const Space& space, double h) : scale_(h) {
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "NeighborGraph", "scale h must be positive");
  const Index n = space.size();
  const double cutoff = h + space.tolerance();
  offsets_.reserve(n + 1);
  offsets_.push_back(0);
  const Matrix& d = space.distances();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (j != i && d(i, j) <= cutoff) {
        targets_.push_back(j);
        lengths_.push_back(d(i, j));
      }
    }
    offsets_.push_back(targets_.size());
  }
}

std::span<const Index> NeighborGraph::neighbors(Index i) const {
  return {targets_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::span<const double> NeighborGraph::lengths(Index i) const {
  return {lengths_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
}

std::vector<Index> NeighborGraph::components() const {
  const Index n = size();
  std::vector<Index> label(n, -1);
  Index next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index v : neighbors(u)) {
        if (label[v] < 0) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

bool NeighborGraph::connected() const {
  const auto label = components();
  return std::all_of(label.begin(), label.end(), [](Index c) { return c == 0; });
}

// ---------------------------------------------------------------------------

double diameter(const Space& space) {
  if (space.size() < 2) fail(ErrorKind::DegenerateSpace, "diameter", "single-point space has diameter 0");
  return space.max_distance();
}

double ball_mass(const Space& space, Index center, double r) {
  check_index(space, center, "ball_mass");
  if (!(r >= 0.0)) fail(ErrorKind::InvalidArgument, "ball_mass", "radius must be nonnegative");
  const auto row = space.distances().col(center).array();
  return (row < r).select(space.mass().array(), 0.0).sum();
}

ScalarField lip_field(const NeighborGraph& graph, const ScalarField& f) {
  const Index n = graph.size();
  Vector out = Vector::Zero(n);
  for (Index x = 0; x < n; ++x) {
    const auto nb = graph.neighbors(x);
    const auto len = graph.lengths(x);
    double best = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) best = std::max(best, std::abs(f[x] - f[nb[k]]) / len[k]);
    out(x) = best;
  }
  return ScalarField(std::move(out));
}

ScalarField lip_field(const Space& space, const ScalarField& f, double h) {
  require_field(space, f, kModule, "lip_field");
  if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "lip_field", "h must be positive");
  return lip_field(NeighborGraph(space, h), f);
}

double global_lip(const Space& space, const ScalarField& f) {
  require_field(space, f, kModule, "global_lip");
  if (space.size() < 2) fail(ErrorKind::DegenerateSpace, "global_lip", "need at least two points");
  const Index n = space.size();
  double best = 0.0;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) best = std::max(best, std::abs(f[a] - f[b]) / space.distance(a, b));
  }
  return best;
}

ScalarField distance_field(const Space& space, Index y) {
  check_index(space, y, "distance_field");
  return ScalarField(space.distances().col(y));
}

Matrix segment_integrals_from(const NeighborGraph& graph, std::span<const ScalarField> fields, Index source) {
  const Index n = graph.size();
  const Index k = static_cast<Index>(fields.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<char> done(n, 0);
  Matrix integral = Matrix::Constant(n, k, inf);

  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[source] = 0.0;
  integral.row(source).setZero();
  queue.emplace(0.0, source);
  while (!queue.empty()) {
    const auto [du, u] = queue.top();
    queue.pop();
    if (done[u] || du > dist[u]) continue;
    done[u] = 1;
    const auto nb = graph.neighbors(u);
    const auto len = graph.lengths(u);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const Index v = nb[e];
      if (done[v]) continue;
      const double nd = du + len[e];
      const double tie = 1e-12 * std::max(nd, 1e-300);
      const bool better = nd < dist[v] - tie;
      const bool equal = !better && std::abs(nd - dist[v]) <= tie;
      if (!better && !equal) continue;
      for (Index c = 0; c < k; ++c) {
        const double cand = integral(u, c) + 0.5 * (fields[c][u] + fields[c][v]) * len[e];
        integral(v, c) = better ? cand : std::min(integral(v, c), cand);
      }
      if (better) {
        dist[v] = nd;
        queue.emplace(nd, v);
      }
    }
  }
  return integral;
}

double segment_functional(const Space& space, const ScalarField& f, Index x, Index y, double h) {
  constexpr const char* op = "segment_functional";
  require_field(space, f, kModule, op);
  check_index(space, x, op);
  check_index(space, y, op);
  if ((f.values().array() < 0.0).any()) fail(ErrorKind::InvalidArgument, op, "field must be nonnegative");
  if (x == y) return 0.0;
  const NeighborGraph graph(space, h);
  const ScalarField fields[] = {f};
  const double value = segment_integrals_from(graph, fields, x)(y, 0);
  if (!std::isfinite(value)) {
    fail(ErrorKind::Disconnected, op,
         "points " + std::to_string(x) + " and " + std::to_string(y) + " are disconnected at scale h");
  }
  return value;
}

double default_scale(const Space& space) {
  if (auto fr = space.fill_radius(); fr && *fr > 0.0) return 3.0 * *fr;
  const Index n = space.size();
  if (n < 2) fail(ErrorKind::DegenerateSpace, "default_scale", "need at least two points");
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j != i) nearest = std::min(nearest, space.distance(i, j));
    }
    worst = std::max(worst, nearest);
  }
  return 1.5 * worst;
}

EstimatedConstants estimate_constants(const Space& space, std::span<const double> radii, int probe_count,
                                      const ConstantsOptions& options) {
  constexpr const char* op = "estimate_constants";
  if (radii.empty()) fail(ErrorKind::InvalidArgument, op, "radii list is empty");
  if (probe_count < 1) fail(ErrorKind::InvalidArgument, op, "probe_count must be >= 1");
  const double diam = diameter(space);
  for (double r : radii) {
    if (!(r > 0.0) || r > diam + space.tolerance()) fail(ErrorKind::InvalidArgument, op, "radii must lie in (0, diam]");
  }
  const Index n = space.size();
  const double h = options.h > 0.0 ? options.h : default_scale(space);

  EstimatedConstants out;
  auto& spec = out.sample_spec;
  spec.radii.assign(radii.begin(), radii.end());
  spec.h = h;
  spec.seed = options.seed;

  std::mt19937_64 rng(options.seed);
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const Index n_centers = std::min(n, std::max<Index>(1, options.max_centers));
  spec.centers.assign(order.begin(), order.begin() + n_centers);
  std::shuffle(order.begin(), order.end(), rng);
  const Index n_probes = std::min<Index>(n, probe_count);
  spec.probe_points.assign(order.begin(), order.begin() + n_probes);

  for (double r : radii) {
    if (3.0 * r > diam) spec.saturated_radii.push_back(r);
  }

  // Probe family: distance fields plus caller-supplied fields. The segment
  // inequality needs nonnegative integrands, so extra probes enter as |f|.
  std::vector<ScalarField> probes;
  for (Index y : spec.probe_points) probes.push_back(distance_field(space, y));
  for (const auto& f : options.extra_probes) {
    require_field(space, f, kModule, op);
    probes.push_back(f);
  }
  spec.probe_fields = probes.size();
  std::vector<ScalarField> nonneg;
  for (const auto& f : probes) nonneg.emplace_back(f.values().cwiseAbs());

  const NeighborGraph graph(space, h);
  std::vector<ScalarField> lips;
  for (const auto& f : probes) lips.push_back(lip_field(graph, f));

  const Vector& m = space.mass();
  const Matrix& d = space.distances();

  // doubling
  for (Index x : spec.centers) {
    for (double r : radii) {
      const double inner = ball_mass(space, x, r);
      const double outer = ball_mass(space, x, 2.0 * r);
      out.kappa = std::max(out.kappa, std::log2(outer / inner));
    }
  }

  // (1,1)-Poincare: sum_B m|f - f_B| <= tau r sum_B m Lip f
  for (Index x : spec.centers) {
    for (double r : radii) {
      const auto in_ball = (d.col(x).array() < r);
      const double vb = in_ball.select(m.array(), 0.0).sum();
      for (std::size_t c = 0; c < probes.size(); ++c) {
        const auto& fv = probes[c].values().array();
        const double mean = in_ball.select(m.array() * fv, 0.0).sum() / vb;
        const double osc = in_ball.select(m.array() * (fv - mean).abs(), 0.0).sum();
        const double grad = in_ball.select(m.array() * lips[c].values().array(), 0.0).sum();
        if (grad <= 0.0) {
          if (osc > 0.0) ++spec.poincare_skipped;
          continue;
        }
        out.tau = std::max(out.tau, osc / (r * grad));
      }
    }
  }

  // Segment inequality: integrals along shortest paths do not depend on the
  // ball, so each source is solved once and its row is folded into every
  // (center, radius) ball that contains it.
  const std::size_t nb_balls = spec.centers.size() * radii.size();
  const std::size_t k = nonneg.size();
  std::vector<double> lhs(nb_balls * k, 0.0);
  std::vector<char> source_needed(n, 0);
  const double rmax = *std::max_element(radii.begin(), radii.end());
  for (Index x : spec.centers) {
    for (Index y = 0; y < n; ++y) {
      if (d(x, y) < rmax) source_needed[y] = 1;
    }
  }
  bool disconnected = false;
  for (Index y = 0; y < n && !disconnected; ++y) {
    if (!source_needed[y]) continue;
    const Matrix row = segment_integrals_from(graph, nonneg, y);
    std::size_t ball = 0;
    for (Index x : spec.centers) {
      for (double r : radii) {
        if (d(x, y) < r) {
          for (Index z = 0; z < n; ++z) {
            if (d(x, z) >= r) continue;
            for (std::size_t c = 0; c < k; ++c) {
              if (!std::isfinite(row(z, c))) {
                disconnected = true;
                continue;
              }
              lhs[ball * k + c] += m(y) * m(z) * row(z, c);
            }
          }
        }
        ++ball;
      }
    }
  }
  if (disconnected) {
    fail(ErrorKind::Disconnected, op, "h-graph is disconnected; segment functional undefined");
  }
  std::size_t ball = 0;
  for (Index x : spec.centers) {
    for (double r : radii) {
      const double vb = ball_mass(space, x, r);
      const auto outer = (d.col(x).array() < 3.0 * r);
      for (std::size_t c = 0; c < k; ++c) {
        const double rhs_int = outer.select(m.array() * nonneg[c].values().array(), 0.0).sum();
        const double denom = r * vb * rhs_int;
        if (denom > 0.0) out.lambda_seg = std::max(out.lambda_seg, lhs[ball * k + c] / denom);
      }
      ++ball;
    }
  }
  return out;
}

}  // namespace pspectra
