#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pspectra/generators.hpp"

namespace pspectra {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;                      ///< one-line summary of the measured values
  nlohmann::json data = nlohmann::json::object();
};

struct AcceptanceOptions {
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
  std::set<int> only;             ///< empty: all criteria
  std::ostream* progress = nullptr;  ///< timing lines; never part of the report
};

/// Runs the numbered acceptance experiments. Results are deterministic for a
/// fixed seed.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3  sphere lichnerowicz value: ..." per criterion.
std::string format_line(const CriterionResult& result);
nlohmann::json to_json(const std::vector<CriterionResult>& results);

}  // namespace pspectra
