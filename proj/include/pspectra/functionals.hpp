#pragma once

#include "pspectra/mmspace.hpp"

namespace pspectra {

/// Best L^p approximation of a field by a constant.
struct CenteredNorm {
  double p = 2.0;
  double c_p = 0.0;       ///< min_c ||f - c||_p
  double a_p = 0.0;       ///< minimizing shift (a median when p == 1)
  double residual = 0.0;  ///< sum m |f - a_p|^(p-2) (f - a_p); 0 for p == 1
};

/// For p > 1, a_p is the unique root of t -> sum m |f - t|^(p-2) (f - t),
/// found by bracketed Newton (bisection fallback) on [min f, max f]. For p == 1, a_1 is the midpoint of
/// the interval of weighted medians.
/// Throws InvalidExponent for p < 1.
CenteredNorm centered_norm(const Space& space, const ScalarField& f, double p);
CenteredNorm centered_norm(const Vector& mass, const Vector& f, double p);

/// ||f||_p with respect to the space's measure, computed with a max-scaling
/// so large p does not overflow.
double lp_norm(const Vector& mass, const Vector& f, double p);

/// Scale-invariant p-Rayleigh quotient sum m (Lip f)^p / c_p(f)^p with
/// Lip f taken at scale h. Throws DegenerateField for constant f.
double rayleigh_p(const Space& space, const ScalarField& f, double p, double h);
double rayleigh_p(const NeighborGraph& graph, const Vector& mass, const ScalarField& f, double p);

/// (rayleigh_p)^(1/p), evaluated without forming the p-th powers.
double rayleigh_root(const NeighborGraph& graph, const Vector& mass, const ScalarField& f, double p);

}  // namespace pspectra
