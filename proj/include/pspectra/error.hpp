#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pspectra {

enum class ErrorKind {
  DegenerateSpace,
  InvalidArgument,
  Disconnected,
  ParseError,
  ValidationError,
  InvalidBase,
  InvalidExponent,
  NumericalFailure,
  DegenerateField,
  InvalidCut,
  TooLarge,
  InvalidCorrespondence,
  IncompatibleModels,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library. The message is prefixed with
/// "<module>::<operation>" so the origin survives up to the CLI.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string_view module, std::string_view operation, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  ErrorKind kind_;
  std::string module_;
  std::string operation_;
};

}  // namespace pspectra
