#include "pspectra/oracles/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pspectra::oracles {

namespace {

using State = std::array<double, 2>;  // (u, w), w = |u'|^(p-2) u'

double signed_pow(double x, double e) { return std::copysign(std::pow(std::abs(x), e), x); }

}  // namespace

double shooting_half_period(double p, double tol) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("shooting_half_period: p must be in (1, inf)");
  namespace odeint = boost::numeric::odeint;
  const auto rhs = [p](const State& s, State& ds, double) {
    ds[0] = signed_pow(s[1], 1.0 / (p - 1.0));
    ds[1] = -signed_pow(s[0], p - 1.0);
  };
  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(State{1.0, 0.0}, 0.0, 1e-3);

  // w leaves 0 downward; the first return of w to 0 is the half period
  for (int steps = 0; steps < 1000000; ++steps) {
    const auto [t0, t1] = stepper.do_step(rhs);
    const State end = stepper.current_state();
    if (t0 > 0.0 && end[1] >= 0.0) {
      State s{};
      stepper.calc_state(t0, s);
      if (s[1] < 0.0) {
        double a = t0, b = t1;
        for (int k = 0; k < 200 && b - a > 1e-15 * b; ++k) {
          const double mid = 0.5 * (a + b);
          stepper.calc_state(mid, s);
          (s[1] < 0.0 ? a : b) = mid;
        }
        return 0.5 * (a + b);
      }
    }
    if (t1 > 100.0) break;
  }
  throw std::runtime_error("shooting_half_period: no return of w to zero");
}

double interval_neumann_eigenvalue(double p, double length) {
  return std::pow(shooting_half_period(p) / length, p);
}

double circle_eigenvalue(double p, double r) { return interval_neumann_eigenvalue(p, std::numbers::pi * r); }

double circle_closed_form(double p) {
  const double pi = std::numbers::pi;
  return 2.0 * pi * std::pow(p - 1.0, 1.0 / p) / (p * std::sin(pi / p));
}

double fd_circle_eigenvalue(int n, double r) {
  if (n < 3) throw std::invalid_argument("fd_circle_eigenvalue: n >= 3 required");
  const double step = 2.0 * std::numbers::pi * r / n;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 / (step * step);
    a(i, (i + 1) % n) -= 1.0 / (step * step);
    a(i, (i + n - 1) % n) -= 1.0 / (step * step);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

double sphere_radial_integral(const std::function<double(double)>& g) {
  const auto integrand = [&](double t) { return g(t) * std::sin(t); };
  return 0.5 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numbers::pi, 15, 1e-14);
}

}  // namespace pspectra::oracles
