#pragma once

// Reference values computed independently of the discrete solvers.

#include <Eigen/Dense>

#include <functional>

namespace pspectra::oracles {

/// First zero T1 > 0 of w for u' = sign(w)|w|^(1/(p-1)), w' = -|u|^(p-2) u,
/// u(0) = 1, w(0) = 0, by adaptive Dormand-Prince integration and bisection
/// on the dense output. The first Neumann eigenvalue of the 1-D p-Laplacian
/// on [0, L] is (T1 / L)^p.
double shooting_half_period(double p, double tol = 1e-12);

/// First Neumann p-eigenvalue of an interval of length L (shooting).
double interval_neumann_eigenvalue(double p, double length);

/// First p-eigenvalue of a circle of radius r: Neumann on a half circle.
double circle_eigenvalue(double p, double r);

/// 2 pi (p - 1)^(1/p) / (p sin(pi / p)), the value of diam * lambda^(1/p) on
/// any circle.
double circle_closed_form(double p);

/// Smallest nonzero eigenvalue of the periodic second-difference matrix on
/// n equally spaced points of a circle of radius r, from a dense solve.
double fd_circle_eigenvalue(int n, double r);

/// (1/2) int_0^pi g(t) sin t dt: the normalized radial integral of g(d(w, .))
/// on the round unit 2-sphere, by adaptive Gauss-Kronrod quadrature.
double sphere_radial_integral(const std::function<double(double)>& g);

}  // namespace pspectra::oracles
