#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "pspectra/mmspace.hpp"

namespace testing {

using pspectra::Index;
using pspectra::Matrix;
using pspectra::Space;
using pspectra::Vector;

inline constexpr double kPi = std::numbers::pi;

// Points on a line with the given masses (normalized).
inline Space line_space(const std::vector<double>& x, std::vector<double> m = {}) {
  const Index n = static_cast<Index>(x.size());
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = std::abs(x[i] - x[j]);
  Vector mass = m.empty() ? Vector(Vector::Constant(n, 1.0)) : Vector(Eigen::Map<Vector>(m.data(), n));
  mass /= mass.sum();
  return Space(d, mass);
}

inline Space random_planar(std::mt19937_64& rng, Index n) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix x(n, 2);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
  Matrix d(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) d(i, j) = (x.row(i) - x.row(j)).norm();
  Vector m(n);
  for (Index i = 0; i < n; ++i) m(i) = 0.2 + unit(rng);
  return Space(d, m / m.sum(), nlohmann::json::object(), {}, x);
}

inline pspectra::ScalarField field_of(const Space& s, double (*g)(double)) {
  Vector v(s.size());
  for (Index i = 0; i < s.size(); ++i) v(i) = g(s.coords()(i, 0));
  return pspectra::ScalarField(v);
}

}  // namespace testing
