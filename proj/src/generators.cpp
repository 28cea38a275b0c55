#include "pspectra/generators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pspectra/error.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "generators";
constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& what) {
  throw Error(kind, kModule, op, what);
}

Vector uniform_mass(Index n) { return Vector::Constant(n, 1.0 / static_cast<double>(n)); }

// Largest distance from a probe point to its nearest sample, over probes
// drawn uniformly on S^dim.
double probe_fill_radius_sphere(const Matrix& unit_points, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss;
  const int probes = 20000;
  Vector q(dim + 1);
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    for (int c = 0; c <= dim; ++c) q(c) = gauss(rng);
    q.normalize();
    const double best_dot = (unit_points * q).maxCoeff();
    worst = std::max(worst, std::acos(std::clamp(best_dot, -1.0, 1.0)));
  }
  return worst;
}

Index nearest_divisor(Index n, double target) {
  Index best = 1;
  double best_gap = std::numeric_limits<double>::infinity();
  for (Index d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    const double gap = std::abs(std::log(static_cast<double>(d) / std::max(target, 1e-300)));
    if (gap < best_gap) {
      best_gap = gap;
      best = d;
    }
  }
  return best;
}

double nominal_dimension(const Space& space) {
  const auto& meta = space.meta();
  if (meta.is_object() && meta.contains("dimension") && meta["dimension"].is_number()) {
    return meta["dimension"].get<double>();
  }
  return 1.0;
}

double sin_power_integral(double lo, double hi, double m) {
  if (hi <= lo) return 0.0;
  if (m == 0.0) return hi - lo;
  if (m == 1.0) return std::cos(lo) - std::cos(hi);
  if (m == 2.0) return 0.5 * (hi - lo) - 0.25 * (std::sin(2.0 * hi) - std::sin(2.0 * lo));
  const auto integrand = [m](double t) { return std::pow(std::sin(t), m); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, hi, 15, 1e-14);
}

double max_nearest_neighbor(const Space& space) {
  double worst = 0.0;
  for (Index i = 0; i < space.size(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < space.size(); ++j) {
      if (j != i) nearest = std::min(nearest, space.distance(i, j));
    }
    worst = std::max(worst, nearest);
  }
  return worst;
}

}  // namespace

std::string_view to_string(Model model) {
  switch (model) {
    case Model::circle: return "circle";
    case Model::interval: return "interval";
    case Model::sphere: return "sphere";
    case Model::flat_torus: return "flat_torus";
    case Model::suspension: return "suspension";
    case Model::file: return "file";
  }
  return "unknown";
}

Model model_from_string(std::string_view name) {
  if (name == "circle") return Model::circle;
  if (name == "interval") return Model::interval;
  if (name == "sphere") return Model::sphere;
  if (name == "flat_torus" || name == "torus") return Model::flat_torus;
  if (name == "suspension") return Model::suspension;
  if (name == "file") return Model::file;
  fail(ErrorKind::InvalidArgument, "model_from_string", "unknown model '" + std::string(name) + "'");
}

double sphere_distance(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v,
                       double r) {
  const Eigen::VectorXd a = u.normalized();
  const Eigen::VectorXd b = v.normalized();
  // equal to r * arccos(<u, v> / r^2) but accurate near 0 and pi
  return r * 2.0 * std::atan2((a - b).norm(), (a + b).norm());
}

double suspension_distance(double s, double t, double base_distance) {
  // sin^2(D/2) = sin^2((s-t)/2) + sin s sin t sin^2(d/2)
  // cos^2(D/2) = cos^2((s+t)/2) + sin s sin t cos^2(d/2)
  const double ss = std::sin(s) * std::sin(t);
  const double hd = 0.5 * base_distance;
  const double sin_half_sq = std::pow(std::sin(0.5 * (s - t)), 2) + ss * std::sin(hd) * std::sin(hd);
  const double cos_half_sq = std::pow(std::cos(0.5 * (s + t)), 2) + ss * std::cos(hd) * std::cos(hd);
  return 2.0 * std::atan2(std::sqrt(std::max(0.0, sin_half_sq)), std::sqrt(std::max(0.0, cos_half_sq)));
}

Space gen_circle(double r, Index n) {
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "gen_circle", "radius must be positive");
  if (n < 3) fail(ErrorKind::InvalidArgument, "gen_circle", "need N >= 3");
  const double step = r * (2.0 * kPi / static_cast<double>(n));
  Matrix dist(n, n);
  Matrix coords(n, 1);
  for (Index i = 0; i < n; ++i) {
    coords(i, 0) = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    for (Index j = 0; j < n; ++j) {
      const Index k = std::abs(i - j);
      dist(i, j) = step * static_cast<double>(std::min(k, n - k));
    }
  }
  nlohmann::json meta = {{"model", "circle"},
                         {"params", {{"r", r}, {"N", n}}},
                         {"dimension", 1},
                         {"circumference", 2.0 * kPi * r},
                         {"diam", kPi * r},
                         {"mesh", step},
                         {"fill_radius", 0.5 * step}};
  return Space(std::move(dist), uniform_mass(n), std::move(meta), {}, std::move(coords));
}

Space gen_interval(double length, Index n) {
  if (!(length > 0.0)) fail(ErrorKind::InvalidArgument, "gen_interval", "length must be positive");
  if (n < 2) fail(ErrorKind::InvalidArgument, "gen_interval", "need N >= 2");
  Matrix coords(n, 1);
  for (Index i = 0; i < n; ++i) coords(i, 0) = length * static_cast<double>(i) / static_cast<double>(n - 1);
  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) dist(i, j) = std::abs(coords(i, 0) - coords(j, 0));
  }
  const double mesh = length / static_cast<double>(n - 1);
  nlohmann::json meta = {{"model", "interval"},     {"params", {{"L", length}, {"N", n}}},
                         {"dimension", 1},          {"diam", length},
                         {"mesh", mesh},            {"fill_radius", 0.5 * mesh}};
  return Space(std::move(dist), uniform_mass(n), std::move(meta), {}, std::move(coords));
}

Space sphere_from_coords(const Matrix& points, double r) {
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "sphere_from_coords", "radius must be positive");
  const Index n = points.rows();
  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = sphere_distance(points.row(i).transpose(), points.row(j).transpose(), r);
    }
  }
  nlohmann::json meta = {{"model", "sphere"},
                         {"params", {{"n", points.cols() - 1}, {"r", r}, {"N", n}}},
                         {"dimension", points.cols() - 1},
                         {"diam", kPi * r}};
  return Space(std::move(dist), uniform_mass(n), std::move(meta), {}, points);
}

Space gen_sphere(int dim, double r, Index n, std::uint64_t seed) {
  if (dim < 1) fail(ErrorKind::InvalidArgument, "gen_sphere", "dimension must be >= 1");
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "gen_sphere", "radius must be positive");
  if (n < dim + 2) fail(ErrorKind::InvalidArgument, "gen_sphere", "need N >= n + 2");
  Matrix unit(n, dim + 1);
  if (dim == 2) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (Index i = 0; i < n; ++i) {
      const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * static_cast<double>(i);
      unit.row(i) << rho * std::cos(phi), rho * std::sin(phi), z;
    }
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (Index i = 0; i < n; ++i) {
      for (int c = 0; c <= dim; ++c) unit(i, c) = gauss(rng);
      unit.row(i).normalize();
    }
  }
  const Matrix points = r * unit;
  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = r * 2.0 * std::atan2((unit.row(i) - unit.row(j)).norm(), (unit.row(i) + unit.row(j)).norm());
    }
  }
  nlohmann::json meta = {{"model", "sphere"},
                         {"params", {{"n", dim}, {"r", r}, {"N", n}, {"seed", seed}}},
                         {"layout", dim == 2 ? "fibonacci" : "uniform"},
                         {"dimension", dim},
                         {"diam", kPi * r},
                         {"fill_radius", r * probe_fill_radius_sphere(unit, dim, seed)}};
  return Space(std::move(dist), uniform_mass(n), std::move(meta), {}, points);
}

Space gen_flat_torus(double a, double b, Index n, std::uint64_t seed, bool grid) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorKind::InvalidArgument, "gen_flat_torus", "side lengths must be positive");
  if (n < 4) fail(ErrorKind::InvalidArgument, "gen_flat_torus", "need N >= 4");
  Matrix coords(n, 2);
  Matrix dist(n, n);
  nlohmann::json meta = {{"model", "flat_torus"},
                         {"params", {{"a", a}, {"b", b}, {"N", n}, {"seed", seed}}},
                         {"dimension", 2},
                         {"diam", 0.5 * std::hypot(a, b)}};
  if (grid) {
    const Index nb = nearest_divisor(n, std::sqrt(static_cast<double>(n) * b / a));
    const Index na = n / nb;
    const double du = a / static_cast<double>(na), dv = b / static_cast<double>(nb);
    for (Index k = 0; k < n; ++k) {
      coords(k, 0) = du * static_cast<double>(k / nb);
      coords(k, 1) = dv * static_cast<double>(k % nb);
    }
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const Index ku = std::abs(i / nb - j / nb), kv = std::abs(i % nb - j % nb);
        dist(i, j) = std::hypot(du * static_cast<double>(std::min(ku, na - ku)),
                                dv * static_cast<double>(std::min(kv, nb - kv)));
      }
    }
    meta["layout"] = "grid";
    meta["grid"] = {na, nb};
    meta["fill_radius"] = 0.5 * std::hypot(du, dv);
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(0.0, a), ub(0.0, b);
    for (Index k = 0; k < n; ++k) {
      coords(k, 0) = ua(rng);
      coords(k, 1) = ub(rng);
    }
    const auto wrapped = [&](double x, double y) {
      double du = std::abs(x), dv = std::abs(y);
      du = std::min(du, a - du);
      dv = std::min(dv, b - dv);
      return std::hypot(du, dv);
    };
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        dist(i, j) = i == j ? 0.0 : wrapped(coords(i, 0) - coords(j, 0), coords(i, 1) - coords(j, 1));
      }
    }
    std::mt19937_64 probe_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    double worst = 0.0;
    for (int t = 0; t < 20000; ++t) {
      const double x = ua(probe_rng), y = ub(probe_rng);
      double nearest = std::numeric_limits<double>::infinity();
      for (Index k = 0; k < n; ++k) nearest = std::min(nearest, wrapped(x - coords(k, 0), y - coords(k, 1)));
      worst = std::max(worst, nearest);
    }
    meta["layout"] = "uniform";
    meta["fill_radius"] = worst;
  }
  return Space(std::move(dist), uniform_mass(n), std::move(meta), {}, std::move(coords));
}

Space gen_suspension(const Space& base, int slices, double m) {
  constexpr const char* op = "gen_suspension";
  if (slices < 2) fail(ErrorKind::InvalidArgument, op, "need slices >= 2");
  const double base_diam = base.max_distance();
  if (base_diam > kPi + 1e-9) {
    fail(ErrorKind::InvalidBase, op, "base diameter " + std::to_string(base_diam) + " exceeds pi");
  }
  if (m < 0.0) m = nominal_dimension(base);

  const Index nb = base.size();
  const Index interior = static_cast<Index>(slices) - 1;
  const Index n = interior * nb + 2;
  const double dt = kPi / static_cast<double>(slices);

  // point 0 is the pole t = 0, point n-1 the pole t = pi
  std::vector<double> t(n);
  std::vector<Index> y(n, 0);
  t[0] = 0.0;
  t[n - 1] = kPi;
  for (Index k = 0; k < interior; ++k) {
    for (Index j = 0; j < nb; ++j) {
      t[1 + k * nb + j] = dt * static_cast<double>(k + 1);
      y[1 + k * nb + j] = j;
    }
  }

  const double total = sin_power_integral(0.0, kPi, m);
  const double pole_weight = sin_power_integral(0.0, 0.5 * dt, m) / total;
  Vector mass(n);
  mass(0) = pole_weight;
  mass(n - 1) = sin_power_integral(kPi - 0.5 * dt, kPi, m) / total;
  for (Index k = 0; k < interior; ++k) {
    const double tk = dt * static_cast<double>(k + 1);
    const double w = sin_power_integral(tk - 0.5 * dt, tk + 0.5 * dt, m) / total;
    for (Index j = 0; j < nb; ++j) mass(1 + k * nb + j) = w * base.mass()(j);
  }
  mass /= mass.sum();

  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      double d;
      if (i == 0) {
        d = t[j];
      } else if (j == n - 1) {
        d = kPi - t[i];
      } else {
        d = suspension_distance(t[i], t[j], base.distance(y[i], y[j]));
      }
      dist(i, j) = dist(j, i) = d;
    }
  }

  const Index base_cols = base.has_coords() ? base.coords().cols() : 0;
  Matrix coords(n, 1 + base_cols);
  for (Index i = 0; i < n; ++i) {
    coords(i, 0) = t[i];
    if (base_cols > 0) coords.row(i).tail(base_cols) = base.coords().row(y[i]);
  }

  const double base_fill = base.fill_radius().value_or(0.5 * max_nearest_neighbor(base));
  nlohmann::json meta = {{"model", "suspension"},
                         {"params", {{"slices", slices}, {"m", m}, {"base_N", nb}}},
                         {"base", base.meta()},
                         {"m", m},
                         {"dimension", nominal_dimension(base) + 1.0},
                         {"fill_radius", std::hypot(0.5 * dt, base_fill)}};
  return Space(std::move(dist), std::move(mass), std::move(meta), {}, std::move(coords));
}

nlohmann::json to_json(const ModelSpec& spec) {
  nlohmann::json j = {{"model", to_string(spec.model)}, {"N", spec.sample_count}, {"seed", spec.seed}};
  switch (spec.model) {
    case Model::circle: j["r"] = spec.r; break;
    case Model::interval: j["L"] = spec.length; break;
    case Model::sphere:
      j["r"] = spec.r;
      j["n"] = spec.dim;
      break;
    case Model::flat_torus:
      j["a"] = spec.a;
      j["b"] = spec.b;
      j["grid"] = spec.grid;
      break;
    case Model::suspension:
      j["slices"] = spec.slices;
      j["m"] = spec.m;
      if (spec.base) j["base"] = to_json(*spec.base);
      break;
    case Model::file: j["path"] = spec.path; break;
  }
  if (spec.fill_radius > 0.0) j["fill_radius"] = spec.fill_radius;
  return j;
}

ModelSpec model_spec_from_json(const nlohmann::json& j) {
  constexpr const char* op = "model_spec_from_json";
  if (!j.is_object()) fail(ErrorKind::ParseError, op, "model spec must be a JSON object");
  if (!j.contains("model") || !j["model"].is_string()) fail(ErrorKind::ParseError, op, "field 'model' missing");
  ModelSpec spec;
  try {
    spec.model = model_from_string(j["model"].get<std::string>());
    spec.r = j.value("r", spec.r);
    spec.dim = j.value("n", spec.dim);
    spec.a = j.value("a", spec.a);
    spec.b = j.value("b", spec.b);
    spec.length = j.value("L", spec.length);
    spec.m = j.value("m", spec.m);
    spec.sample_count = j.value("N", spec.sample_count);
    spec.slices = j.value("slices", spec.slices);
    spec.grid = j.value("grid", spec.grid);
    spec.seed = j.value("seed", spec.seed);
    spec.path = j.value("path", spec.path);
    if (j.contains("base")) spec.base = std::make_shared<ModelSpec>(model_spec_from_json(j["base"]));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, op, e.what());
  }
  return spec;
}

Space generate(ModelSpec& spec) {
  auto record = [&](Space space) {
    spec.fill_radius = space.fill_radius().value_or(0.0);
    return space;
  };
  switch (spec.model) {
    case Model::circle: return record(gen_circle(spec.r, spec.sample_count));
    case Model::interval: return record(gen_interval(spec.length, spec.sample_count));
    case Model::sphere: return record(gen_sphere(spec.dim, spec.r, spec.sample_count, spec.seed));
    case Model::flat_torus: return record(gen_flat_torus(spec.a, spec.b, spec.sample_count, spec.seed, spec.grid));
    case Model::suspension: {
      ModelSpec base_spec;
      if (spec.base) {
        base_spec = *spec.base;
      } else {
        base_spec.model = Model::circle;
        base_spec.r = 1.0;
        base_spec.sample_count = spec.sample_count;
      }
      const Space base = generate(base_spec);
      return record(gen_suspension(base, spec.slices, spec.m));
    }
    case Model::file: return record(load_space(spec.path));
  }
  fail(ErrorKind::InvalidArgument, "generate", "unhandled model");
}

}  // namespace pspectra
