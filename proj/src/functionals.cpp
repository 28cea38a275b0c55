#include "pspectra/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "pspectra/error.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "functionals";

// Weighted median interval midpoint and the L^1 deviation around it.
CenteredNorm median_norm(const Vector& mass, const Vector& f) {
  const Index n = f.size();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return f(a) < f(b); });

  constexpr double half = 0.5 - 1e-12;
  // lowest value whose lower cumulative mass reaches 1/2
  double acc = 0.0;
  double low = f(order.back());
  for (Index k = 0; k < n; ++k) {
    acc += mass(order[k]);
    if (acc >= half) {
      low = f(order[k]);
      break;
    }
  }
  // highest value whose upper cumulative mass reaches 1/2
  acc = 0.0;
  double high = f(order.front());
  for (Index k = n - 1; k >= 0; --k) {
    acc += mass(order[k]);
    if (acc >= half) {
      high = f(order[k]);
      break;
    }
  }
  CenteredNorm out;
  out.p = 1.0;
  out.a_p = 0.5 * (low + high);
  out.c_p = (mass.array() * (f.array() - out.a_p).abs()).sum();
  out.residual = 0.0;
  return out;
}

}  // namespace

double lp_norm(const Vector& mass, const Vector& f, double p) {
  const double top = f.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0.0;
  if (p == 2.0) return top * std::sqrt((mass.array() * (f.array() / top).square()).sum());
  return top * std::pow((mass.array() * (f.array().abs() / top).pow(p)).sum(), 1.0 / p);
}

CenteredNorm centered_norm(const Vector& mass, const Vector& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw Error(ErrorKind::InvalidExponent, kModule, "centered_norm", "p must be finite and >= 1");
  }
  if (p == 1.0) return median_norm(mass, f);

  CenteredNorm out;
  out.p = p;
  const double lo_f = f.minCoeff(), hi_f = f.maxCoeff();
  if (lo_f == hi_f) {
    out.a_p = lo_f;
    return out;
  }
  const double mid = 0.5 * (lo_f + hi_f);
  const double half = 0.5 * (hi_f - lo_f);
  const Eigen::ArrayXd g = (f.array() - mid) / half;  // in [-1, 1]
  const Eigen::ArrayXd m = mass.array();

  struct Eval {
    double r = 0.0;      // residual
    double slope = 0.0;  // -(d residual / dt), +inf at data points when p < 2
    double scale = 0.0;  // sum m |g - t|^(p-1), the residual's natural size
  };
  const auto evaluate = [&](double t) {
    const Eigen::ArrayXd diff = g - t;
    const Eigen::ArrayXd ad = diff.abs();
    Eval e;
    if (p == 2.0) {
      e.r = (m * diff).sum();
      e.slope = m.sum();
      e.scale = (m * ad).sum();
      return e;
    }
    const Eigen::ArrayXd w = (ad > 0.0).select(m * ad.pow(p - 2.0), 0.0);
    e.r = (w * diff).sum();
    e.scale = (w * ad).sum();
    e.slope = (p < 2.0 && (ad == 0.0).any()) ? std::numeric_limits<double>::infinity() : (p - 1.0) * w.sum();
    return e;
  };

  if (p == 2.0) {
    // least-squares shift is the weighted mean
    const double t = (m * g).sum() / m.sum();
    out.a_p = mid + half * t;
    out.c_p = half * std::sqrt((m * (g - t).square()).sum());
    out.residual = half * evaluate(t).r;
    return out;
  }

  // Safeguarded Newton on the strictly decreasing residual, started at the
  // weighted mean. The bracket [a, b] always holds the root; a step that
  // leaves it, or fails to halve it every other iteration, becomes a
  // bisection. Stops once the residual is at rounding level relative to its
  // scale or the bracket is a few ulps wide.
  constexpr double kWidth = 4.0 * std::numeric_limits<double>::epsilon();
  constexpr double kRelResidual = 1e-14;
  double a = -1.0, b = 1.0;
  double t = std::clamp((m * g).sum() / m.sum(), a, b);
  double best_t = t;
  double best_r = std::numeric_limits<double>::infinity();
  double width_before = b - a;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    const Eval e = evaluate(t);
    if (std::abs(e.r) < best_r) {
      best_r = std::abs(e.r);
      best_t = t;
    }
    if (std::abs(e.r) <= kRelResidual * e.scale) {
      converged = true;
      break;
    }
    if (e.r > 0.0) a = t; else b = t;
    if (b - a <= kWidth) {
      converged = true;
      break;
    }
    double next = std::isfinite(e.slope) && e.slope > 0.0 ? t + e.r / e.slope : a - 1.0;
    if (it % 2 == 1) {
      if (b - a > 0.5 * width_before) next = a - 1.0;
      width_before = b - a;
    }
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    t = next;
  }
  if (!converged) {
    throw Error(ErrorKind::NumericalFailure, kModule, "centered_norm", "root bracket did not collapse in 200 iterations");
  }

  out.a_p = mid + half * best_t;
  out.c_p = half * std::pow((m * (g - best_t).abs().pow(p)).sum(), 1.0 / p);
  out.residual = std::pow(half, p - 1.0) * evaluate(best_t).r;
  return out;
}

CenteredNorm centered_norm(const Space& space, const ScalarField& f, double p) {
  require_field(space, f, kModule, "centered_norm");
  return centered_norm(space.mass(), f.values(), p);
}

double rayleigh_root(const NeighborGraph& graph, const Vector& mass, const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidExponent, kModule, "rayleigh_p", "p must be >= 1");
  const CenteredNorm cn = centered_norm(mass, f.values(), p);
  if (!(cn.c_p > 0.0)) throw Error(ErrorKind::DegenerateField, kModule, "rayleigh_p", "field is constant (c_p = 0)");
  const ScalarField lip = lip_field(graph, f);
  return lp_norm(mass, lip.values(), p) / cn.c_p;
}

double rayleigh_p(const NeighborGraph& graph, const Vector& mass, const ScalarField& f, double p) {
  return std::pow(rayleigh_root(graph, mass, f, p), p);
}

double rayleigh_p(const Space& space, const ScalarField& f, double p, double h) {
  require_field(space, f, kModule, "rayleigh_p");
  if (!(h > 0.0)) throw Error(ErrorKind::InvalidArgument, kModule, "rayleigh_p", "h must be positive");
  return rayleigh_p(NeighborGraph(space, h), space.mass(), f, p);
}

}  // namespace pspectra
