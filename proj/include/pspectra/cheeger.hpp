#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pspectra/generators.hpp"
#include "pspectra/mmspace.hpp"

namespace pspectra {

enum class CutMethod { brute_force, sweep, explicit_set };

std::string_view to_string(CutMethod method);

struct CutResult {
  std::vector<Index> subset;  ///< sorted point indices of A
  double mass = 0.0;          ///< in (0, 1/2]
  double boundary = 0.0;      ///< Minkowski quotient at scale epsilon
  double ratio = 0.0;         ///< boundary / mass
  double epsilon = 0.0;
  CutMethod method = CutMethod::explicit_set;
};

/// (mass of the closed epsilon-neighborhood of A minus mass(A)) / r. Points at
/// distance exactly r (within the space tolerance) belong to the
/// neighborhood, which is the r -> r+ limit of the open-ball quotient.
/// Throws InvalidCut for empty or full A.
double minkowski_boundary(const Space& space, std::span<const Index> subset, double r);

/// Evaluates A as a CutResult (method explicit_set). A must have mass <= 1/2.
CutResult evaluate_cut(const Space& space, std::span<const Index> subset, double epsilon);

/// Minimum over all subsets with 0 < mass <= 1/2; ties go to the smaller
/// subset, then the lexicographically smaller index list. n <= 20.
CutResult exact_cheeger(const Space& space, double epsilon);

/// Best superlevel cut {f > t} (or its complement, whichever has mass <= 1/2)
/// over thresholds between consecutive distinct values of f.
CutResult sweep_cheeger(const Space& space, const ScalarField& f, double epsilon);

/// exact_cheeger for n <= 20; otherwise the best sweep over the hint (default:
/// the p = 2 eigenfunction at scale epsilon) and 8 seeded distance fields.
CutResult cheeger(const Space& space, double epsilon, const std::optional<ScalarField>& hint = std::nullopt,
                  std::uint64_t seed = kDefaultSeed);

}  // namespace pspectra
