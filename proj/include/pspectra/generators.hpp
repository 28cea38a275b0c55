#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <json.hpp>

#include "pspectra/mmspace.hpp"

namespace pspectra {

enum class Model { circle, interval, sphere, flat_torus, suspension, file };

std::string_view to_string(Model model);
Model model_from_string(std::string_view name);

inline constexpr std::uint64_t kDefaultSeed = 20140917ULL;

/// Description of a sampled model space. `fill_radius` is an output: the
/// estimated largest distance from a model point to its nearest sample.
struct ModelSpec {
  Model model = Model::circle;
  double r = 1.0;            // circle / sphere radius
  int dim = 2;               // sphere dimension n
  double a = 1.0, b = 1.0;   // torus sides
  double length = 1.0;       // interval length
  double m = -1.0;           // suspension weight exponent; < 0 selects the base dimension
  Index sample_count = 400;  // N (for suspension: the base circle size when no base is given)
  int slices = 32;           // suspension time slices
  bool grid = true;          // torus layout
  std::uint64_t seed = kDefaultSeed;
  std::string path;                    // Model::file
  std::shared_ptr<ModelSpec> base;     // Model::suspension; defaults to a unit circle
  double fill_radius = 0.0;
};

nlohmann::json to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& j);

/// Builds the space for `spec` and writes the fill-radius estimate back.
Space generate(ModelSpec& spec);

/// N equispaced points on the circle of radius r with intrinsic arc distance.
Space gen_circle(double r, Index n);

/// N equispaced points on [0, L].
Space gen_interval(double length, Index n);

/// Samples of S^n(r): Fibonacci lattice for n = 2, seeded uniform otherwise.
Space gen_sphere(int dim, double r, Index n, std::uint64_t seed = kDefaultSeed);

/// Points of S^n(r) at the given embedded coordinates (rows), uniform mass.
Space sphere_from_coords(const Matrix& points, double r);

/// Flat torus [0,a) x [0,b): a near-square grid of exactly N points, or N
/// seeded uniform points when grid == false.
Space gen_flat_torus(double a, double b, Index n, std::uint64_t seed = kDefaultSeed, bool grid = true);

/// Spherical suspension S^0 * Y over `base` with `slices` time cells and
/// weight sin^m(t). m < 0 selects the base's nominal dimension.
/// Throws InvalidBase when diam(base) > pi.
Space gen_suspension(const Space& base, int slices, double m = -1.0);

/// Intrinsic distance between two points of S^n(r) given by embedded coordinates.
double sphere_distance(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& v,
                       double r);

/// arccos(cos s cos t + sin s sin t cos d), evaluated through half-angle
/// terms so that it stays accurate near 0 and pi.
double suspension_distance(double s, double t, double base_distance);

/// JSON space file I/O. `save_space` writes the `dist` form and round-trips
/// bit-exactly. Writes go through a temporary file and a rename.
Space load_space(const std::filesystem::path& path);
void save_space(const Space& space, const std::filesystem::path& path);
Space space_from_json(const nlohmann::json& j);
nlohmann::json space_to_json(const Space& space);

/// Writes `contents` to `path` atomically (temp file in the same directory,
/// then rename). Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace pspectra
