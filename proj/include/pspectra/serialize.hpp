#pragma once

#include <string>

#include <json.hpp>

#include "pspectra/bounds.hpp"
#include "pspectra/cheeger.hpp"
#include "pspectra/eigensolver.hpp"
#include "pspectra/functionals.hpp"
#include "pspectra/ghseq.hpp"

namespace pspectra {

nlohmann::json to_json(const CenteredNorm& cn);
nlohmann::json to_json(const SpectralResult& result);
nlohmann::json to_json(const CutResult& cut);
nlohmann::json to_json(const FValue& value);
nlohmann::json to_json(const InequalityReport& report);
nlohmann::json to_json(const ConvergenceReport& report);

/// Lossy tabular exports.
std::string to_csv(const std::vector<InequalityReport>& reports);  // name,subject,p,lhs,rhs,slack,satisfied
std::string to_csv(const ConvergenceReport& report);               // stage,p,F,distortion,discrepancy,epsilon

}  // namespace pspectra
