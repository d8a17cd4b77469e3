#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace hsadapt {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, channel counts or group counts that do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A scalar or enumerated parameter outside its valid range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Rank-deficient parametrization or data without enough non-degenerate directions.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Malformed HSB/HSM byte stream. Carries the byte offset where parsing stopped.
class FormatError : public Error {
 public:
  FormatError(std::uint64_t offset, const std::string& what)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// Failure while running an external denoiser process.
class BridgeError : public Error {
 public:
  BridgeError(const std::string& what, int exit_code, std::string diagnostics)
      : Error(what), exit_code_(exit_code), diagnostics_(std::move(diagnostics)) {}
  /// Child exit status, or -1 when the child never exited normally.
  int exit_code() const noexcept { return exit_code_; }
  /// Captured standard error of the child.
  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  int exit_code_;
  std::string diagnostics_;
};

/// Iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Non-finite values appeared in an iterate.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// Gradient estimator incompatible with the inner denoiser.
class ModeError : public Error {
 public:
  using Error::Error;
};

/// Band-directory ingestion problem. Names the offending file.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::filesystem::path path)
      : Error(what + ": " + path.string()), path_(std::move(path)) {}
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace hsadapt
