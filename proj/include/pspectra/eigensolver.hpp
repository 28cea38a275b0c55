#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "pspectra/generators.hpp"
#include "pspectra/mmspace.hpp"

namespace pspectra {

enum class SolveStatus { converged, max_iter, degenerate };

std::string_view to_string(SolveStatus status);

struct SpectralResult {
  double p = 2.0;
  double lambda = 0.0;       ///< upper estimate of the first p-eigenvalue
  double lambda_root = 0.0;  ///< lambda^(1/p), computed without forming lambda
  ScalarField eigenfunction;  ///< normalized to c_p = ||f||_p = 1
  int iterations = 0;
  std::vector<double> energy_trace;
  double h = 0.0;
  int restarts = 0;
  SolveStatus status = SolveStatus::converged;
  std::string start;      ///< label of the winning start
  std::string error;      ///< set by sweep_p when a grid point failed
  double constraint_residual = 0.0;  ///< sum m |f|^(p-2) f at the minimizer
};

struct SolveOptions {
  int max_iter = 2000;
  int restarts = 2;
  std::uint64_t seed = kDefaultSeed;
  double step_init = 1.0;
  double step_factor = 0.5;
  double step_floor = 1e-12;
  int window = 50;
  double window_tol = 1e-9;
  bool use_p2_start = true;
  int threads = 1;
};

/// Reusable solver state for one space at one scale h: the neighbor graph,
/// the edge-based quadratic surrogate and the cached p = 2 solution.
class PLaplacianProblem {
 public:
  /// Throws Disconnected when the h-graph has more than one component.
  PLaplacianProblem(const Space& space, double h);
  ~PLaplacianProblem();
  PLaplacianProblem(PLaplacianProblem&&) noexcept;
  PLaplacianProblem& operator=(PLaplacianProblem&&) noexcept;

  const Space& space() const noexcept { return *space_; }
  const NeighborGraph& graph() const noexcept { return graph_; }
  double h() const noexcept { return graph_.scale(); }

  /// Smallest nonzero eigenpair of the surrogate (computed once).
  const SpectralResult& p2_exact();
  /// Raw generalized eigenvalue of the surrogate for the p2 eigenvector.
  double surrogate_eigenvalue();

  /// Minimizes the p-Rayleigh quotient from the default starts plus `extra_starts`.
  SpectralResult solve(double p, const SolveOptions& options, std::span<const ScalarField> extra_starts = {});

  /// Runs one descent from `start` (no multi-start).
  SpectralResult descend(double p, const ScalarField& start, const SolveOptions& options, const std::string& label);

 private:
  struct Surrogate;
  /// M + max(1, p-1) K / mu_1, factored on first use.
  const Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>& preconditioner(double p);

  const Space* space_;
  NeighborGraph graph_;
  std::unique_ptr<Surrogate> surrogate_;
  std::optional<SpectralResult> p2_;
};

/// p = 2 oracle: lowest nonzero mode of the edge surrogate
/// sum_{d(x,y) <= h} m_x m_y / (deg d^2) (f(x) - f(y))^2 against the mass
/// matrix, reported with lambda recomputed as rayleigh_p(eigvec, 2, h).
SpectralResult solve_p2_exact(const Space& space, double h);

/// Throws InvalidExponent unless 1.1 <= p < inf, DegenerateField when every
/// start is constant after centering.
SpectralResult solve(const Space& space, double p, double h, const SolveOptions& options = {});

/// Continuation along an increasing grid; each point also starts from the
/// previous point's eigenfunction. Failed points carry `error` and the sweep
/// continues.
std::vector<SpectralResult> sweep_p(const Space& space, std::span<const double> p_grid, double h,
                                    const SolveOptions& options = {});
std::vector<SpectralResult> sweep_p(PLaplacianProblem& problem, std::span<const double> p_grid,
                                    const SolveOptions& options = {});

}  // namespace pspectra
