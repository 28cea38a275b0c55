#include "pspectra/ghseq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "pspectra/error.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "ghseq";
constexpr double kPi = std::numbers::pi;

[[noreturn]] void incompatible(const std::string& what) {
  throw Error(ErrorKind::IncompatibleModels, kModule, "nearest_map", what);
}

std::string model_of(const Space& s) {
  const auto& meta = s.meta();
  return meta.is_object() && meta.contains("model") && meta["model"].is_string() ? meta["model"].get<std::string>() : "";
}

double param(const nlohmann::json& meta, const char* key) {
  if (!meta.contains("params") || !meta["params"].contains(key)) incompatible(std::string("meta.params lacks '") + key + "'");
  return meta["params"][key].get<double>();
}

bool same(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

double angle_gap(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  return std::min(d, 2.0 * kPi - d);
}

double periodic_gap(double a, double b, double period) {
  const double d = std::fmod(std::abs(a - b), period);
  return std::min(d, period - d);
}

// distance between point i of X and point j of Y measured in the common model
using ModelDistance = std::function<double(Index, Index)>;

ModelDistance model_distance(const Space& x, const Space& y) {
  const std::string mx = model_of(x), my = model_of(y);
  if (!x.has_coords() || !y.has_coords()) incompatible("both spaces need model coordinates");
  const Matrix& cx = x.coords();
  const Matrix& cy = y.coords();
  if (mx == "circle" && my == "circle") {
    if (!same(param(x.meta(), "r"), param(y.meta(), "r"))) incompatible("circles of different radius");
    const double r = param(x.meta(), "r");
    return [&cx, &cy, r](Index i, Index j) { return r * angle_gap(cx(i, 0), cy(j, 0)); };
  }
  if (mx == "interval" && my == "interval") {
    if (!same(param(x.meta(), "L"), param(y.meta(), "L"))) incompatible("intervals of different length");
    return [&cx, &cy](Index i, Index j) { return std::abs(cx(i, 0) - cy(j, 0)); };
  }
  if (mx == "sphere" && my == "sphere") {
    if (!same(param(x.meta(), "r"), param(y.meta(), "r")) || cx.cols() != cy.cols()) incompatible("spheres differ");
    const double r = param(x.meta(), "r");
    return [&cx, &cy, r](Index i, Index j) { return sphere_distance(cx.row(i).transpose(), cy.row(j).transpose(), r); };
  }
  if (mx == "flat_torus" && my == "flat_torus") {
    const double a = param(x.meta(), "a"), b = param(x.meta(), "b");
    if (!same(a, param(y.meta(), "a")) || !same(b, param(y.meta(), "b"))) incompatible("tori of different sides");
    return [&cx, &cy, a, b](Index i, Index j) {
      return std::hypot(periodic_gap(cx(i, 0), cy(j, 0), a), periodic_gap(cx(i, 1), cy(j, 1), b));
    };
  }
  if (mx == "flat_torus" && my == "circle") {
    // collapse of the short side: project (u, v) -> u on the circle of circumference a
    const double a = param(x.meta(), "a"), r = param(y.meta(), "r");
    if (!same(a, 2.0 * kPi * r)) incompatible("torus side a differs from the circle circumference");
    return [&cx, &cy, r](Index i, Index j) { return r * angle_gap(cx(i, 0) / r, cy(j, 0)); };
  }
  if (mx == "circle" && my == "flat_torus") {
    const double a = param(y.meta(), "a"), r = param(x.meta(), "r");
    if (!same(a, 2.0 * kPi * r)) incompatible("torus side a differs from the circle circumference");
    return [&cx, &cy, r](Index i, Index j) { return r * angle_gap(cx(i, 0), cy(j, 0) / r); };
  }
  if (mx == "suspension" && my == "suspension") {
    const auto& bx = x.meta()["base"];
    const auto& by = y.meta()["base"];
    if (!bx.is_object() || !by.is_object() || bx.value("model", "") != "circle" || by.value("model", "") != "circle") {
      incompatible("suspension matching needs circle bases");
    }
    const double r = bx["params"]["r"].get<double>();
    if (!same(r, by["params"]["r"].get<double>())) incompatible("suspension bases of different radius");
    return [&cx, &cy, r](Index i, Index j) {
      return suspension_distance(cx(i, 0), cy(j, 0), r * angle_gap(cx(i, 1), cy(j, 1)));
    };
  }
  incompatible("no model correspondence between '" + mx + "' and '" + my + "'");
}

std::vector<Index> map_part(const Correspondence& corr, Index nx) {
  if (static_cast<Index>(corr.map.size()) == nx) return corr.map;
  std::vector<Index> out(nx, -1);
  for (const auto& [a, b] : corr.pairs) {
    if (out[a] < 0) out[a] = b;
  }
  return out;
}

// mass-weighted distribution of d(x, x') under m x m, as sorted (value, weight)
std::vector<std::pair<double, double>> distance_distribution(const Space& s) {
  const Index n = s.size();
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2 + 1));
  out.emplace_back(0.0, s.mass().squaredNorm());
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out.emplace_back(s.distance(i, j), 2.0 * s.mass()(i) * s.mass()(j));
  std::sort(out.begin(), out.end());
  return out;
}

// W1 between two weighted empirical distributions via their quantile functions
double w1(const std::vector<std::pair<double, double>>& a, const std::vector<std::pair<double, double>>& b) {
  const double ta = std::accumulate(a.begin(), a.end(), 0.0, [](double s, const auto& e) { return s + e.second; });
  const double tb = std::accumulate(b.begin(), b.end(), 0.0, [](double s, const auto& e) { return s + e.second; });
  std::size_t i = 0, j = 0;
  double left_a = a.empty() ? 0.0 : a[0].second / ta, left_b = b.empty() ? 0.0 : b[0].second / tb;
  double total = 0.0;
  while (i < a.size() && j < b.size()) {
    const double step = std::min(left_a, left_b);
    total += step * std::abs(a[i].first - b[j].first);
    left_a -= step;
    left_b -= step;
    if (left_a <= 1e-300 && ++i < a.size()) left_a = a[i].second / ta;
    if (left_b <= 1e-300 && ++j < b.size()) left_b = b[j].second / tb;
  }
  return total;
}

}  // namespace

void validate(const Correspondence& corr, const Space& x, const Space& y) {
  std::vector<char> seen_x(x.size(), 0), seen_y(y.size(), 0);
  for (const auto& [a, b] : corr.pairs) {
    if (a < 0 || a >= x.size() || b < 0 || b >= y.size()) {
      throw Error(ErrorKind::InvalidCorrespondence, kModule, "distortion", "pair index out of range");
    }
    seen_x[a] = seen_y[b] = 1;
  }
  if (std::find(seen_x.begin(), seen_x.end(), 0) != seen_x.end() ||
      std::find(seen_y.begin(), seen_y.end(), 0) != seen_y.end()) {
    throw Error(ErrorKind::InvalidCorrespondence, kModule, "distortion", "some point is not covered");
  }
}

Correspondence identity_correspondence(const Space& x) {
  Correspondence c;
  for (Index i = 0; i < x.size(); ++i) {
    c.pairs.emplace_back(i, i);
    c.map.push_back(i);
  }
  return c;
}

double distortion(const Correspondence& corr, const Space& x, const Space& y) {
  validate(corr, x, y);
  double worst = 0.0;
  const auto& pairs = corr.pairs;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    for (std::size_t l = k + 1; l < pairs.size(); ++l) {
      const auto [c, d] = pairs[l];
      worst = std::max(worst, std::abs(x.distance(a, c) - y.distance(b, d)));
    }
  }
  return worst;
}

GHBounds gh_bounds(const Correspondence& corr, const Space& x, const Space& y) {
  GHBounds out;
  out.distortion = distortion(corr, x, y);
  out.upper = 0.5 * out.distortion;
  out.lower = 0.5 * std::abs(x.max_distance() - y.max_distance());
  out.distance_w1 = w1(distance_distribution(x), distance_distribution(y));
  return out;
}

Correspondence transpose(const Correspondence& corr) {
  Correspondence out;
  out.source_id = corr.target_id;
  out.target_id = corr.source_id;
  for (const auto& [a, b] : corr.pairs) out.pairs.emplace_back(b, a);
  return out;
}

Correspondence compose(const Correspondence& xy, const Correspondence& yz) {
  Index ny = 0;
  for (const auto& pr : xy.pairs) ny = std::max(ny, pr.second + 1);
  for (const auto& pr : yz.pairs) ny = std::max(ny, pr.first + 1);
  std::vector<std::vector<Index>> next(ny);
  for (const auto& [b, c] : yz.pairs) next[b].push_back(c);
  Correspondence out;
  out.source_id = xy.source_id;
  out.target_id = yz.target_id;
  for (const auto& [a, b] : xy.pairs)
    for (Index c : next[b]) out.pairs.emplace_back(a, c);
  std::sort(out.pairs.begin(), out.pairs.end());
  out.pairs.erase(std::unique(out.pairs.begin(), out.pairs.end()), out.pairs.end());
  return out;
}

Correspondence nearest_map(const Space& x, const Space& y) {
  const ModelDistance dist = model_distance(x, y);
  Correspondence out;
  out.source_id = model_of(x);
  out.target_id = model_of(y);
  out.map.resize(x.size());
  std::vector<Index> back(y.size(), 0);
  std::vector<double> back_d(y.size(), std::numeric_limits<double>::infinity());
  for (Index i = 0; i < x.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < y.size(); ++j) {
      const double d = dist(i, j);
      if (d < best) {
        best = d;
        out.map[i] = j;
      }
      if (d < back_d[j]) {
        back_d[j] = d;
        back[j] = i;
      }
    }
    out.pairs.emplace_back(i, out.map[i]);
  }
  for (Index j = 0; j < y.size(); ++j) out.pairs.emplace_back(back[j], j);
  std::sort(out.pairs.begin(), out.pairs.end());
  out.pairs.erase(std::unique(out.pairs.begin(), out.pairs.end()), out.pairs.end());
  return out;
}

double image_density(const Correspondence& corr, const Space& y) {
  Index nx = 0;
  for (const auto& pr : corr.pairs) nx = std::max(nx, pr.first + 1);
  const std::vector<Index> phi = map_part(corr, nx);
  std::vector<char> in_image(y.size(), 0);
  for (Index j : phi) in_image[j] = 1;
  double worst = 0.0;
  for (Index j = 0; j < y.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (Index k = 0; k < y.size(); ++k) {
      if (in_image[k]) best = std::min(best, y.distance(j, k));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double measure_discrepancy(const Correspondence& corr, const Space& x, const Space& y, std::span<const Index> centers,
                           std::span<const double> radii) {
  const std::vector<Index> phi = map_part(corr, x.size());
  double worst = 0.0;
  for (Index c : centers) {
    for (double r : radii) {
      if (!(r > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "measure_discrepancy", "radii must be positive");
      worst = std::max(worst, std::abs(ball_mass(x, c, r) - ball_mass(y, phi[c], r)));
    }
  }
  return worst;
}

ConvergenceReport run_convergence_experiment(std::vector<ModelSpec> specs, std::span<const double> p_grid,
                                             const ConvergenceOptions& options) {
  if (specs.size() < 2) throw Error(ErrorKind::InvalidArgument, kModule, "run_convergence_experiment", "need at least two stages");
  const ScaleRule h_rule = options.h_rule ? options.h_rule : ScaleRule(default_scale);
  const ScaleRule eps_rule = options.epsilon_rule ? options.epsilon_rule : ScaleRule(default_scale);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ConvergenceReport report;
  report.p_grid.assign(p_grid.begin(), p_grid.end());
  std::vector<std::optional<Space>> spaces;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    StageReport stage;
    stage.id = "stage" + std::to_string(s);
    std::vector<double> row(p_grid.size(), nan);
    try {
      Space space = generate(specs[s]);
      stage.size = space.size();
      stage.diameter = diameter(space);
      stage.h = h_rule(space);
      stage.epsilon = eps_rule(space);
      Analysis an(space, stage.h, stage.epsilon, options.solve, stage.id);
      for (std::size_t k = 0; k < p_grid.size(); ++k) {
        try {
          row[k] = an.F(p_grid[k]).value;
        } catch (const Error& e) {
          stage.status = e.what();
        }
      }
      spaces.emplace_back(std::move(space));
    } catch (const Error& e) {
      stage.status = e.what();
      spaces.emplace_back(std::nullopt);
    }
    stage.spec = specs[s];
    report.sequence.push_back(std::move(stage));
    report.F_table.push_back(std::move(row));
  }

  const auto& limit = spaces.back();
  std::mt19937_64 rng(options.solve.seed);
  for (std::size_t s = 0; s < spaces.size(); ++s) {
    double dis = nan, disc = nan, eps = nan, upper = nan, lower = nan;
    if (spaces[s] && limit) {
      try {
        const Space& x = *spaces[s];
        const Correspondence corr = s + 1 == spaces.size() ? identity_correspondence(x) : nearest_map(x, *limit);
        const GHBounds gh = gh_bounds(corr, x, *limit);
        dis = gh.distortion;
        upper = gh.upper;
        lower = gh.lower;
        eps = image_density(corr, *limit);
        std::vector<Index> centers(x.size());
        std::iota(centers.begin(), centers.end(), 0);
        std::shuffle(centers.begin(), centers.end(), rng);
        centers.resize(std::min<std::size_t>(centers.size(), options.centers));
        std::vector<double> radii;
        for (double f : options.radius_fractions) radii.push_back(f * diameter(*limit));
        disc = measure_discrepancy(corr, x, *limit, centers, radii);
      } catch (const Error& e) {
        report.sequence[s].status = e.what();
      }
    }
    report.distortions.push_back(dis);
    report.measure_discrepancies.push_back(disc);
    report.epsilons.push_back(eps);
    report.gh_upper.push_back(upper);
    report.gh_lower.push_back(lower);
  }
  return report;
}

}  // namespace pspectra
