#include "pspectra/error.hpp"

namespace pspectra {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateSpace: return "DegenerateSpace";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::InvalidBase: return "InvalidBase";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::DegenerateField: return "DegenerateField";
    case ErrorKind::InvalidCut: return "InvalidCut";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidCorrespondence: return "InvalidCorrespondence";
    case ErrorKind::IncompatibleModels: return "IncompatibleModels";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string_view module, std::string_view operation, const std::string& what)
    : std::runtime_error(std::string(module) + "::" + std::string(operation) + ": " + std::string(to_string(kind)) +
                         ": " + what),
      kind_(kind),
      module_(module),
      operation_(operation) {}

}  // namespace pspectra
