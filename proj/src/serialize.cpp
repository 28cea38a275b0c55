#include "pspectra/serialize.hpp"

#include <cmath>
#include <sstream>

namespace pspectra {

namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

nlohmann::json field(const ScalarField& f) {
  return std::vector<double>(f.values().data(), f.values().data() + f.size());
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::json to_json(const CenteredNorm& cn) {
  return {{"p", cn.p}, {"c_p", number(cn.c_p)}, {"a_p", number(cn.a_p)}, {"residual", number(cn.residual)}};
}

nlohmann::json to_json(const SpectralResult& r) {
  nlohmann::json j = {{"p", r.p},
                      {"lambda", number(r.lambda)},
                      {"lambda_root", number(r.lambda_root)},
                      {"eigenfunction", field(r.eigenfunction)},
                      {"iterations", r.iterations},
                      {"energy_trace", numbers(r.energy_trace)},
                      {"h", r.h},
                      {"restarts", r.restarts},
                      {"status", to_string(r.status)},
                      {"start", r.start},
                      {"constraint_residual", number(r.constraint_residual)}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

nlohmann::json to_json(const CutResult& c) {
  return {{"subset", c.subset}, {"mass", c.mass},         {"boundary", c.boundary},
          {"ratio", c.ratio},   {"epsilon", c.epsilon}, {"method", to_string(c.method)}};
}

nlohmann::json to_json(const FValue& v) {
  nlohmann::json j = {{"p", v.p == kPInfinity ? nlohmann::json("inf") : nlohmann::json(v.p)},
                      {"value", v.infinite ? nlohmann::json("inf") : number(v.value)},
                      {"infinite", v.infinite},
                      {"provenance", to_string(v.provenance)}};
  if (v.cut) j["cut"] = to_json(*v.cut);
  if (v.spectral) {
    j["spectral"] = to_json(*v.spectral);
    j["spectral"].erase("eigenfunction");
  }
  return j;
}

nlohmann::json to_json(const InequalityReport& r) {
  nlohmann::json j = {{"name", to_string(r.name)}, {"subject", r.subject},    {"p_values", numbers(r.p_values)},
                      {"lhs", numbers(r.lhs)},     {"rhs", numbers(r.rhs)},   {"slack", numbers(r.slack)},
                      {"satisfied", r.satisfied},  {"tolerance", r.tolerance}, {"extras", r.extras}};
  if (!r.equality.empty()) j["equality"] = r.equality;
  j["fitted_constant"] = r.fitted_constant ? number(*r.fitted_constant) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const ConvergenceReport& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.sequence) {
    stages.push_back({{"id", s.id},
                      {"spec", to_json(s.spec)},
                      {"status", s.status},
                      {"n", s.size},
                      {"h", s.h},
                      {"epsilon", s.epsilon},
                      {"diameter", s.diameter}});
  }
  nlohmann::json table = nlohmann::json::array();
  for (const auto& row : r.F_table) table.push_back(numbers(row));
  return {{"sequence", stages},
          {"p_grid", r.p_grid},
          {"distortions", numbers(r.distortions)},
          {"measure_discrepancies", numbers(r.measure_discrepancies)},
          {"epsilons", numbers(r.epsilons)},
          {"gh_upper", numbers(r.gh_upper)},
          {"gh_lower", numbers(r.gh_lower)},
          {"F_table", table}};
}

std::string to_csv(const std::vector<InequalityReport>& reports) {
  std::ostringstream os;
  os << "name,subject,p,lhs,rhs,slack,satisfied\n";
  for (const auto& r : reports) {
    for (std::size_t i = 0; i < r.p_values.size(); ++i) {
      os << to_string(r.name) << ',' << r.subject << ',' << csv_number(r.p_values[i]) << ',' << csv_number(r.lhs[i])
         << ',' << csv_number(r.rhs[i]) << ',' << csv_number(r.slack[i]) << ',' << (r.satisfied[i] ? "true" : "false")
         << '\n';
    }
  }
  return os.str();
}

std::string to_csv(const ConvergenceReport& r) {
  std::ostringstream os;
  os << "stage,p,F,distortion,discrepancy,epsilon\n";
  for (std::size_t s = 0; s < r.sequence.size(); ++s) {
    for (std::size_t k = 0; k < r.p_grid.size(); ++k) {
      os << s << ',' << csv_number(r.p_grid[k]) << ',' << csv_number(r.F_table[s][k]) << ','
         << csv_number(r.distortions[s]) << ',' << csv_number(r.measure_discrepancies[s]) << ','
         << csv_number(r.epsilons[s]) << '\n';
    }
  }
  return os.str();
}

}  // namespace pspectra
