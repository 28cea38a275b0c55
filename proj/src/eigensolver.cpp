#include "pspectra/eigensolver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include "pspectra/error.hpp"
#include "pspectra/functionals.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "eigensolver";
using SparseMatrix = Eigen::SparseMatrix<double>;

[[noreturn]] void fail(ErrorKind kind, const char* op, const std::string& what) {
  throw Error(kind, kModule, op, what);
}

void require_exponent(double p, const char* op) {
  if (!(p >= 1.1) || !std::isfinite(p)) {
    fail(ErrorKind::InvalidExponent, op, "p must satisfy 1.1 <= p < inf (the p -> 1 endpoint is the Cheeger constant)");
  }
}

Vector lip_values(const NeighborGraph& graph, const Vector& f) {
  const Index n = graph.size();
  Vector out(n);
  for (Index x = 0; x < n; ++x) {
    const auto nb = graph.neighbors(x);
    const auto len = graph.lengths(x);
    double best = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) best = std::max(best, std::abs(f(x) - f(nb[k])) / len[k]);
    out(x) = best;
  }
  return out;
}

// Gradient of log ||Lip f||_p - log c_p(f), using the averaged subgradient of
// each Lip entry over its eta-active neighbors.
Vector log_quotient_gradient(const NeighborGraph& graph, const Vector& mass, const Vector& f, const Vector& lip,
                             const CenteredNorm& cn, double p, double eta) {
  const Index n = f.size();
  Vector grad = Vector::Zero(n);

  const double lmax = lip.maxCoeff();
  if (lmax > 0.0) {
    const Eigen::ArrayXd scaled = lip.array() / lmax;
    const double denom = lmax * (mass.array() * scaled.pow(p)).sum();
    for (Index x = 0; x < n; ++x) {
      if (lip(x) <= 0.0) continue;
      const double weight = mass(x) * std::pow(scaled(x), p - 1.0) / denom;
      if (weight == 0.0) continue;
      const auto nb = graph.neighbors(x);
      const auto len = graph.lengths(x);
      const double threshold = lip(x) * (1.0 - eta) * (1.0 - 1e-12);
      int active = 0;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        if (std::abs(f(x) - f(nb[k])) / len[k] >= threshold) ++active;
      }
      const double share = weight / active;
      for (std::size_t k = 0; k < nb.size(); ++k) {
        const double diff = f(x) - f(nb[k]);
        if (std::abs(diff) / len[k] < threshold) continue;
        const double g = share * (diff > 0.0 ? 1.0 : -1.0) / len[k];
        grad(x) += g;
        grad(nb[k]) -= g;
      }
    }
  }

  const Eigen::ArrayXd centered = f.array() - cn.a_p;
  const double top = centered.abs().maxCoeff();
  if (top > 0.0) {
    const Eigen::ArrayXd u = centered / top;
    const double denom = top * (mass.array() * u.abs().pow(p)).sum();
    grad.array() -= mass.array() * u.sign() * u.abs().pow(p - 1.0) / denom;
  }
  return grad;
}

struct Evaluated {
  Vector f;         // normalized: a_p(f) = 0, c_p(f) = 1
  double root = 0;  // (rayleigh_p)^(1/p)
  bool degenerate = false;
};

Evaluated evaluate(const NeighborGraph& graph, const Vector& mass, const Vector& raw, double p) {
  Evaluated out;
  const CenteredNorm cn = centered_norm(mass, raw, p);
  if (!(cn.c_p > 0.0) || !std::isfinite(cn.c_p)) {
    out.degenerate = true;
    return out;
  }
  out.f = (raw.array() - cn.a_p) / cn.c_p;
  out.root = lp_norm(mass, lip_values(graph, out.f), p);
  return out;
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

struct PLaplacianProblem::Surrogate {
  SparseMatrix stiffness;  // graph Laplacian of the edge surrogate
  Vector mass;
  double eigenvalue = 0.0;
  int iterations = 0;
  std::map<double, std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>>> preconditioners;
};

PLaplacianProblem::PLaplacianProblem(const Space& space, double h)
    : space_(&space), graph_(space, h), surrogate_(std::make_unique<Surrogate>()) {
  const auto labels = graph_.components();
  const Index components = *std::max_element(labels.begin(), labels.end()) + 1;
  if (components > 1) {
    fail(ErrorKind::Disconnected, "solve_p2_exact",
         "h-graph has " + std::to_string(components) + " components (zero eigenvalue multiplicity > 1)");
  }
  const Index n = space.size();
  const Vector& m = space.mass();
  Vector local_mass = Vector::Zero(n);
  for (Index x = 0; x < n; ++x) {
    for (Index y : graph_.neighbors(x)) local_mass(x) += m(y);
  }
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(graph_.edge_count() * 2 + n);
  Vector diagonal = Vector::Zero(n);
  for (Index x = 0; x < n; ++x) {
    const auto nb = graph_.neighbors(x);
    const auto len = graph_.lengths(x);
    for (std::size_t k = 0; k < nb.size(); ++k) {
      const Index y = nb[k];
      if (y < x) continue;
      const double deg = 0.5 * (local_mass(x) + local_mass(y));
      const double w = m(x) * m(y) / (deg * len[k] * len[k]);
      entries.emplace_back(x, y, -w);
      entries.emplace_back(y, x, -w);
      diagonal(x) += w;
      diagonal(y) += w;
    }
  }
  for (Index x = 0; x < n; ++x) entries.emplace_back(x, x, diagonal(x));
  surrogate_->stiffness.resize(n, n);
  surrogate_->stiffness.setFromTriplets(entries.begin(), entries.end());
  surrogate_->mass = m;
}

PLaplacianProblem::~PLaplacianProblem() = default;
PLaplacianProblem::PLaplacianProblem(PLaplacianProblem&&) noexcept = default;
PLaplacianProblem& PLaplacianProblem::operator=(PLaplacianProblem&&) noexcept = default;

const SpectralResult& PLaplacianProblem::p2_exact() {
  if (p2_) return *p2_;
  const Index n = space_->size();
  const SparseMatrix& K = surrogate_->stiffness;
  const Vector& m = surrogate_->mass;
  const Vector sqrt_m = m.cwiseSqrt();

  const double shift = 1e-6 * K.diagonal().sum() / m.sum();
  SparseMatrix shifted = K;
  for (Index i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift * m(i);
  Eigen::SimplicialLDLT<SparseMatrix> solver(shifted);
  if (solver.info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "solve_p2_exact", "factorization failed");

  // block shift-invert subspace iteration, deflated against constants
  const Index block = std::min<Index>(8, n - 1);
  std::mt19937_64 rng(0xb10c5eedULL);
  std::normal_distribution<double> gauss;
  Matrix X(n, block);
  for (Index i = 0; i < X.size(); ++i) X.data()[i] = gauss(rng);
  const auto deflate = [&](Matrix& Y) {
    for (Index c = 0; c < Y.cols(); ++c) Y.col(c).array() -= m.dot(Y.col(c)) / m.sum();
  };
  deflate(X);

  Vector ritz = Vector::Zero(block);
  double previous = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < 2000; ++it) {
    Matrix Y = solver.solve(m.asDiagonal() * X);
    deflate(Y);
    // M-orthonormalize via QR of M^(1/2) Y
    Matrix Z = sqrt_m.asDiagonal() * Y;
    Eigen::HouseholderQR<Matrix> qr(Z);
    Matrix Q = qr.householderQ() * Matrix::Identity(n, block);
    Y = sqrt_m.cwiseInverse().asDiagonal() * Q;
    const Matrix reduced = Y.transpose() * (K * Y);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (reduced + reduced.transpose()));
    X = Y * es.eigenvectors();
    ritz = es.eigenvalues();
    const Vector residual = K * X.col(0) - ritz(0) * m.asDiagonal() * X.col(0);
    const double res_norm = residual.norm() / std::max(1e-300, (K * X.col(0)).norm());
    if (std::abs(ritz(0) - previous) <= 1e-13 * std::abs(ritz(0)) && res_norm < 1e-8) break;
    previous = ritz(0);
  }
  surrogate_->eigenvalue = ritz(0);
  surrogate_->iterations = it + 1;

  const Evaluated ev = evaluate(graph_, m, X.col(0), 2.0);
  if (ev.degenerate) fail(ErrorKind::NumericalFailure, "solve_p2_exact", "surrogate eigenvector is constant");
  SpectralResult result;
  result.p = 2.0;
  result.h = h();
  result.eigenfunction = ScalarField(ev.f);
  result.lambda_root = rayleigh_root(graph_, m, result.eigenfunction, 2.0);
  result.lambda = result.lambda_root * result.lambda_root;
  result.iterations = surrogate_->iterations;
  result.energy_trace = {result.lambda};
  result.status = SolveStatus::converged;
  result.start = "p2_exact";
  result.constraint_residual = (m.array() * ev.f.array()).sum();
  p2_ = std::move(result);
  return *p2_;
}

double PLaplacianProblem::surrogate_eigenvalue() {
  p2_exact();
  return surrogate_->eigenvalue;
}

const Eigen::SimplicialLDLT<SparseMatrix>& PLaplacianProblem::preconditioner(double p) {
  const Index n = space_->size();
  auto it = surrogate_->preconditioners.find(p);
  if (it == surrogate_->preconditioners.end()) {
    // M + c K / mu: Newton-like on high modes for the log-quotient
    const double mu = surrogate_eigenvalue();
    const double c = std::max(1.0, p - 1.0) / mu;
    SparseMatrix P = c * surrogate_->stiffness;
    for (Index i = 0; i < n; ++i) P.coeffRef(i, i) += surrogate_->mass(i);
    auto ldlt = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>(P);
    if (ldlt->info() != Eigen::Success) fail(ErrorKind::NumericalFailure, "solve", "preconditioner factorization failed");
    it = surrogate_->preconditioners.emplace(p, std::move(ldlt)).first;
  }
  return *it->second;
}

SpectralResult PLaplacianProblem::descend(double p, const ScalarField& start, const SolveOptions& options,
                                          const std::string& label) {
  require_exponent(p, "solve");
  const Vector& m = surrogate_->mass;

  SpectralResult result;
  result.p = p;
  result.h = h();
  result.start = label;

  if (start.size() != space_->size()) fail(ErrorKind::InvalidArgument, "solve", "start field has the wrong length");
  Evaluated current = evaluate(graph_, m, start.values(), p);
  if (current.degenerate) {
    result.status = SolveStatus::degenerate;
    return result;
  }
  const auto& precond = preconditioner(p);

  result.energy_trace.push_back(std::pow(current.root, p));
  result.status = SolveStatus::max_iter;
  constexpr double kEtas[] = {0.0, 1e-6, 1e-3, 1e-2, 1e-1};
  // learned length of the preconditioned direction, so that the backtracking
  // from step_init usually succeeds after one or two trials
  double gain = 1.0;
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const Vector lip = lip_values(graph_, current.f);
    const CenteredNorm cn = centered_norm(m, current.f, p);
    const double scale = (m.array() * current.f.array().square()).sum();

    bool accepted = false;
    bool stationary = false;
    for (double eta : kEtas) {
      const Vector grad = log_quotient_gradient(graph_, m, current.f, lip, cn, p, eta);
      if (eta == 0.0 && grad.cwiseAbs().maxCoeff() == 0.0) {
        stationary = true;
        break;
      }
      const Vector direction = -scale * precond.solve(grad);
      for (double step = options.step_init; step * gain >= options.step_floor; step *= options.step_factor) {
        Evaluated trial = evaluate(graph_, m, current.f + (step * gain) * direction, p);
        if (!trial.degenerate && trial.root < current.root) {
          current = std::move(trial);
          accepted = true;
          gain = std::clamp(gain * step * 2.0, 1e-8, 1e8);
          break;
        }
      }
      if (accepted) break;
    }
    if (stationary || !accepted) {
      result.status = SolveStatus::converged;
      break;
    }
    result.energy_trace.push_back(std::pow(current.root, p));
    const std::size_t k = result.energy_trace.size();
    if (k > static_cast<std::size_t>(options.window)) {
      const double old = result.energy_trace[k - 1 - options.window];
      const double now = result.energy_trace.back();
      if ((old - now) <= options.window_tol * std::abs(now)) {
        result.status = SolveStatus::converged;
        ++it;
        break;
      }
    }
  }
  result.iterations = it;
  result.eigenfunction = ScalarField(current.f);
  result.lambda_root = rayleigh_root(graph_, m, result.eigenfunction, p);
  result.lambda = std::pow(result.lambda_root, p);
  const Eigen::ArrayXd f = current.f.array();
  result.constraint_residual = (m.array() * f.sign() * f.abs().pow(p - 1.0)).sum();
  return result;
}

SpectralResult PLaplacianProblem::solve(double p, const SolveOptions& options, std::span<const ScalarField> extra_starts) {
  require_exponent(p, "solve");
  const Index n = space_->size();

  std::vector<std::pair<std::string, ScalarField>> starts;
  if (options.use_p2_start) starts.emplace_back("p2_exact", p2_exact().eigenfunction);
  for (std::size_t k = 0; k < extra_starts.size(); ++k) starts.emplace_back("warm#" + std::to_string(k), extra_starts[k]);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < options.restarts; ++k) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = gauss(rng);
    starts.emplace_back("random#" + std::to_string(k), ScalarField(std::move(v)));
  }
  if (starts.empty()) fail(ErrorKind::InvalidArgument, "solve", "no starting fields");

  preconditioner(p);  // built once here, before the parallel descents read it

  std::vector<SpectralResult> results(starts.size());
  parallel_for(starts.size(), options.threads,
               [&](std::size_t i) { results[i] = descend(p, starts[i].second, options, starts[i].first); });

  const SpectralResult* best = nullptr;
  for (const auto& r : results) {
    if (r.status == SolveStatus::degenerate) continue;
    if (!best || r.lambda_root < best->lambda_root) best = &r;
  }
  if (!best) fail(ErrorKind::DegenerateField, "solve", "every start is constant after centering");
  SpectralResult out = *best;
  out.restarts = options.restarts;
  return out;
}

SpectralResult solve_p2_exact(const Space& space, double h) {
  if (space.size() > 4000) fail(ErrorKind::TooLarge, "solve_p2_exact", "n exceeds the 4000-point budget");
  PLaplacianProblem problem(space, h);
  return problem.p2_exact();
}

SpectralResult solve(const Space& space, double p, double h, const SolveOptions& options) {
  require_exponent(p, "solve");
  PLaplacianProblem problem(space, h);
  return problem.solve(p, options);
}

std::vector<SpectralResult> sweep_p(PLaplacianProblem& problem, std::span<const double> p_grid,
                                    const SolveOptions& options) {
  if (p_grid.empty()) fail(ErrorKind::InvalidArgument, "sweep_p", "p grid is empty");
  if (!std::is_sorted(p_grid.begin(), p_grid.end())) fail(ErrorKind::InvalidArgument, "sweep_p", "p grid must be sorted");
  std::vector<SpectralResult> out;
  std::optional<ScalarField> previous;
  for (double p : p_grid) {
    try {
      std::vector<ScalarField> warm;
      if (previous) warm.push_back(*previous);
      out.push_back(problem.solve(p, options, warm));
      previous = out.back().eigenfunction;
    } catch (const Error& e) {
      SpectralResult failed;
      failed.p = p;
      failed.h = problem.h();
      failed.status = SolveStatus::degenerate;
      failed.error = e.what();
      out.push_back(std::move(failed));
    }
  }
  return out;
}

std::vector<SpectralResult> sweep_p(const Space& space, std::span<const double> p_grid, double h,
                                    const SolveOptions& options) {
  PLaplacianProblem problem(space, h);
  return sweep_p(problem, p_grid, options);
}

}  // namespace pspectra
