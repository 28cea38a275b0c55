#include "pspectra/cheeger.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>

#include "pspectra/eigensolver.hpp"
#include "pspectra/error.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "cheeger";
constexpr double kHalf = 0.5 + 1e-12;

void require_epsilon(double epsilon, const char* op) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw Error(ErrorKind::InvalidArgument, kModule, op, "epsilon must be positive");
}

// closed epsilon-neighbors of each point, itself included
std::vector<std::vector<Index>> closed_neighbors(const Space& space, double epsilon) {
  const Index n = space.size();
  const double reach = epsilon + space.tolerance();
  std::vector<std::vector<Index>> out(n);
  for (Index x = 0; x < n; ++x) {
    for (Index y = 0; y < n; ++y) {
      if (space.distance(x, y) <= reach) out[x].push_back(y);
    }
  }
  return out;
}

bool better(double ratio, const std::vector<Index>& subset, double best_ratio, const std::vector<Index>& best_subset) {
  const double tie = 1e-12 * std::max(std::abs(ratio), std::abs(best_ratio));
  if (ratio < best_ratio - tie) return true;
  if (ratio > best_ratio + tie) return false;
  if (subset.size() != best_subset.size()) return subset.size() < best_subset.size();
  return subset < best_subset;
}

}  // namespace

std::string_view to_string(CutMethod method) {
  switch (method) {
    case CutMethod::brute_force: return "brute_force";
    case CutMethod::sweep: return "sweep";
    case CutMethod::explicit_set: return "explicit";
  }
  return "unknown";
}

double minkowski_boundary(const Space& space, std::span<const Index> subset, double r) {
  require_epsilon(r, "minkowski_boundary");
  const Index n = space.size();
  std::vector<char> in(n, 0);
  for (Index i : subset) {
    if (i < 0 || i >= n) throw Error(ErrorKind::InvalidCut, kModule, "minkowski_boundary", "index out of range");
    in[i] = 1;
  }
  const Index count = std::count(in.begin(), in.end(), 1);
  if (count == 0 || count == n) throw Error(ErrorKind::InvalidCut, kModule, "minkowski_boundary", "A must be nonempty and proper");
  const double reach = r + space.tolerance();
  double gained = 0.0;
  for (Index y = 0; y < n; ++y) {
    if (in[y]) continue;
    for (Index x = 0; x < n; ++x) {
      if (in[x] && space.distance(x, y) <= reach) {
        gained += space.mass()(y);
        break;
      }
    }
  }
  return gained / r;
}

CutResult evaluate_cut(const Space& space, std::span<const Index> subset, double epsilon) {
  CutResult out;
  out.subset.assign(subset.begin(), subset.end());
  std::sort(out.subset.begin(), out.subset.end());
  out.subset.erase(std::unique(out.subset.begin(), out.subset.end()), out.subset.end());
  out.boundary = minkowski_boundary(space, out.subset, epsilon);
  for (Index i : out.subset) out.mass += space.mass()(i);
  if (out.mass > kHalf) throw Error(ErrorKind::InvalidCut, kModule, "evaluate_cut", "mass(A) exceeds 1/2");
  out.ratio = out.boundary / out.mass;
  out.epsilon = epsilon;
  out.method = CutMethod::explicit_set;
  return out;
}

CutResult exact_cheeger(const Space& space, double epsilon) {
  require_epsilon(epsilon, "exact_cheeger");
  const Index n = space.size();
  if (n > 20) throw Error(ErrorKind::TooLarge, kModule, "exact_cheeger", "n = " + std::to_string(n) + " exceeds the 2^20 enumeration budget");
  if (n < 2) throw Error(ErrorKind::DegenerateSpace, kModule, "exact_cheeger", "need at least two points");

  const auto nb = closed_neighbors(space, epsilon);
  std::vector<std::uint32_t> nb_mask(n, 0);
  for (Index x = 0; x < n; ++x)
    for (Index y : nb[x]) nb_mask[x] |= 1u << y;

  const std::uint32_t full = (1u << n) - 1;
  std::vector<double> mass(std::size_t(full) + 1, 0.0);
  std::vector<std::uint32_t> cover(std::size_t(full) + 1, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const int low = std::countr_zero(s);
    const std::uint32_t rest = s & (s - 1);
    mass[s] = mass[rest] + space.mass()(low);
    cover[s] = cover[rest] | nb_mask[low];
  }

  CutResult best;
  best.ratio = std::numeric_limits<double>::infinity();
  std::vector<Index> members;
  for (std::uint32_t s = 1; s < full; ++s) {
    if (mass[s] > kHalf) continue;
    const double boundary = (mass[cover[s]] - mass[s]) / epsilon;
    const double ratio = boundary / mass[s];
    members.clear();
    for (std::uint32_t bits = s; bits; bits &= bits - 1) members.push_back(std::countr_zero(bits));
    if (best.subset.empty() || better(ratio, members, best.ratio, best.subset)) {
      best.subset = members;
      best.mass = mass[s];
      best.boundary = boundary;
      best.ratio = ratio;
    }
  }
  best.epsilon = epsilon;
  best.method = CutMethod::brute_force;
  return best;
}

CutResult sweep_cheeger(const Space& space, const ScalarField& f, double epsilon) {
  require_epsilon(epsilon, "sweep_cheeger");
  require_field(space, f, kModule, "sweep_cheeger");
  const Index n = space.size();
  if (f.values().minCoeff() == f.values().maxCoeff()) {
    throw Error(ErrorKind::DegenerateField, kModule, "sweep_cheeger", "field is constant");
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return f[a] > f[b]; });

  const auto nb = closed_neighbors(space, epsilon);
  const Vector& m = space.mass();

  // neighborhood mass of each prefix (k points of highest f) and each suffix
  const auto grow = [&](auto begin, auto end) {
    std::vector<int> count(n, 0);
    std::vector<double> inside(n + 1, 0.0), covered(n + 1, 0.0);
    double in_mass = 0.0, cov_mass = 0.0;
    Index k = 0;
    for (auto it = begin; it != end; ++it) {
      in_mass += m(*it);
      for (Index y : nb[*it]) {
        if (count[y]++ == 0) cov_mass += m(y);
      }
      ++k;
      inside[k] = in_mass;
      covered[k] = cov_mass;
    }
    return std::pair{inside, covered};
  };
  const auto [pre_mass, pre_cover] = grow(order.begin(), order.end());
  const auto [suf_mass, suf_cover] = grow(order.rbegin(), order.rend());

  CutResult best;
  best.ratio = std::numeric_limits<double>::infinity();
  Index best_k = -1;
  bool best_prefix = true;
  for (Index k = 1; k < n; ++k) {
    if (f[order[k - 1]] == f[order[k]]) continue;  // one threshold per distinct level
    const double a_mass = pre_mass[k];
    const bool prefix = a_mass <= kHalf;
    const double mass = prefix ? a_mass : suf_mass[n - k];
    const double cover = prefix ? pre_cover[k] : suf_cover[n - k];
    if (mass > kHalf) continue;
    const double boundary = std::max(0.0, cover - mass) / epsilon;
    const double ratio = boundary / mass;
    if (ratio < best.ratio) {
      best.ratio = ratio;
      best.mass = mass;
      best.boundary = boundary;
      best_k = k;
      best_prefix = prefix;
    }
  }
  if (best_k < 0) throw Error(ErrorKind::DegenerateField, kModule, "sweep_cheeger", "no admissible threshold cut");
  if (best_prefix) {
    best.subset.assign(order.begin(), order.begin() + best_k);
  } else {
    best.subset.assign(order.begin() + best_k, order.end());
  }
  std::sort(best.subset.begin(), best.subset.end());
  best.epsilon = epsilon;
  best.method = CutMethod::sweep;
  return best;
}

CutResult cheeger(const Space& space, double epsilon, const std::optional<ScalarField>& hint, std::uint64_t seed) {
  require_epsilon(epsilon, "cheeger");
  if (space.size() <= 20) return exact_cheeger(space, epsilon);

  std::vector<ScalarField> fields;
  if (hint) {
    fields.push_back(*hint);
  } else {
    try {
      fields.push_back(solve_p2_exact(space, epsilon).eigenfunction);
    } catch (const Error&) {
      // disconnected at this scale: distance fields still give valid cuts
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<Index> ids(space.size());
  std::iota(ids.begin(), ids.end(), 0);
  for (int k = 0; k < 8; ++k) {
    std::uniform_int_distribution<Index> pick(k, space.size() - 1);
    std::swap(ids[k], ids[pick(rng)]);
    fields.push_back(distance_field(space, ids[k]));
  }
  std::optional<CutResult> best;
  for (const auto& f : fields) {
    if (f.values().minCoeff() == f.values().maxCoeff()) continue;
    CutResult cut = sweep_cheeger(space, f, epsilon);
    if (!best || cut.ratio < best->ratio) best = std::move(cut);
  }
  if (!best) throw Error(ErrorKind::DegenerateField, kModule, "cheeger", "no usable sweep field");
  return *best;
}

}  // namespace pspectra
