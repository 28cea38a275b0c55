#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <system_error>

#include "pspectra/error.hpp"
#include "pspectra/generators.hpp"

namespace pspectra {

namespace {

constexpr const char* kModule = "generators";

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, kModule, "load_space", what); }

std::vector<double> number_array(const nlohmann::json& j, const char* field) {
  if (!j.contains(field)) parse_fail(std::string("missing field '") + field + "'");
  const auto& arr = j[field];
  if (!arr.is_array()) parse_fail(std::string("field '") + field + "' must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) {
      parse_fail(std::string("field '") + field + "' entry " + std::to_string(i) + " is not a number");
    }
    out.push_back(arr[i].get<double>());
  }
  return out;
}

Matrix coords_matrix(const nlohmann::json& j, const char* field, Index n) {
  const auto& arr = j[field];
  if (!arr.is_array() || static_cast<Index>(arr.size()) != n) {
    parse_fail(std::string("field '") + field + "' must be an array of n rows");
  }
  Index dim = -1;
  Matrix out;
  for (Index i = 0; i < n; ++i) {
    const auto& row = arr[i];
    if (!row.is_array() || row.empty()) parse_fail(std::string("field '") + field + "' row " + std::to_string(i) + " is not a nonempty array");
    if (dim < 0) {
      dim = static_cast<Index>(row.size());
      out.resize(n, dim);
    }
    if (static_cast<Index>(row.size()) != dim) parse_fail(std::string("field '") + field + "' rows differ in length");
    for (Index c = 0; c < dim; ++c) {
      if (!row[c].is_number()) parse_fail(std::string("field '") + field + "' row " + std::to_string(i) + " has a non-number");
      out(i, c) = row[c].get<double>();
    }
  }
  return out;
}

Matrix distances_from_coords(const Matrix& x, const std::string& metric, const nlohmann::json& meta) {
  const Index n = x.rows();
  Matrix d = Matrix::Zero(n, n);
  if (metric == "euclidean") {
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = (x.row(i) - x.row(j)).norm();
  } else if (metric == "sphere_intrinsic") {
    const double r = x.row(0).norm();
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = sphere_distance(x.row(i).transpose(), x.row(j).transpose(), r);
  } else if (metric == "torus_flat") {
    if (x.cols() != 2) parse_fail("torus_flat coords must have two columns");
    if (!meta.is_object() || !meta.contains("a") || !meta.contains("b")) {
      parse_fail("torus_flat metric needs meta.a and meta.b (side lengths)");
    }
    const double a = meta["a"].get<double>(), b = meta["b"].get<double>();
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        double du = std::abs(x(i, 0) - x(j, 0)), dv = std::abs(x(i, 1) - x(j, 1));
        du = std::fmod(du, a);
        dv = std::fmod(dv, b);
        d(i, j) = d(j, i) = std::hypot(std::min(du, a - du), std::min(dv, b - dv));
      }
    }
  } else {
    parse_fail("unknown metric tag '" + metric + "'");
  }
  return d;
}

}  // namespace

nlohmann::json space_to_json(const Space& space) {
  const Index n = space.size();
  std::vector<double> dist(static_cast<std::size_t>(n * n));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) dist[static_cast<std::size_t>(i * n + j)] = space.distance(i, j);
  nlohmann::json j;
  j["n"] = n;
  j["mass"] = std::vector<double>(space.mass().data(), space.mass().data() + n);
  j["dist"] = std::move(dist);
  j["meta"] = space.meta();
  if (!space.labels().empty()) j["labels"] = space.labels();
  if (space.has_coords()) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < n; ++i) {
      rows.push_back(std::vector<double>(space.coords().cols()));
      for (Index c = 0; c < space.coords().cols(); ++c) rows.back()[c] = space.coords()(i, c);
    }
    j["model_coords"] = std::move(rows);
  }
  return j;
}

Space space_from_json(const nlohmann::json& j) {
  if (!j.is_object()) parse_fail("top level must be an object");
  if (!j.contains("n") || !j["n"].is_number_integer()) parse_fail("field 'n' missing or not an integer");
  const Index n = j["n"].get<Index>();
  if (n < 1) parse_fail("field 'n' must be positive");
  const auto mass_raw = number_array(j, "mass");
  if (static_cast<Index>(mass_raw.size()) != n) parse_fail("field 'mass' has " + std::to_string(mass_raw.size()) + " entries, expected n");
  Vector mass = Eigen::Map<const Vector>(mass_raw.data(), n);
  const nlohmann::json meta = j.contains("meta") ? j["meta"] : nlohmann::json::object();

  Matrix dist;
  Matrix model_coords;
  if (j.contains("dist")) {
    const auto raw = number_array(j, "dist");
    if (static_cast<Index>(raw.size()) != n * n) parse_fail("field 'dist' must hold n*n entries");
    dist.resize(n, n);
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c) dist(r, c) = raw[static_cast<std::size_t>(r * n + c)];
  } else if (j.contains("coords")) {
    if (!j.contains("metric") || !j["metric"].is_string()) parse_fail("field 'metric' required with 'coords'");
    model_coords = coords_matrix(j, "coords", n);
    dist = distances_from_coords(model_coords, j["metric"].get<std::string>(), meta);
  } else {
    parse_fail("either 'dist' or 'coords' + 'metric' is required");
  }
  if (j.contains("model_coords")) model_coords = coords_matrix(j, "model_coords", n);

  std::vector<std::string> labels;
  if (j.contains("labels")) {
    if (!j["labels"].is_array()) parse_fail("field 'labels' must be an array");
    for (const auto& l : j["labels"]) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
  }
  try {
    return Space(std::move(dist), std::move(mass), meta, std::move(labels), std::move(model_coords));
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, kModule, "load_space", e.what());
  }
}

Space load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, kModule, "load_space", "cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail("'" + path.string() + "': " + e.what());
  }
  return space_from_json(j);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::random_device rd;
  const fs::path tmp = dir / (path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, "io", "write", "cannot open '" + tmp.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::IoError, "io", "write", "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::IoError, "io", "write", "cannot rename onto '" + path.string() + "'");
  }
}

void save_space(const Space& space, const std::filesystem::path& path) {
  write_file_atomic(path, space_to_json(space).dump() + "\n");
}

}  // namespace pspectra
