#pragma once

#include <stdexcept>
#include <string>

namespace ffmlp {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kParameter = 2,
  kData = 3,
  kNumeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ExitCode::kParameter, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Malformed model or data file; carries the offending location in the message.
class FormatError : public DataError {
 public:
  explicit FormatError(const std::string& what) : DataError(what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ExitCode::kNumeric, what) {}
};

// Two blobs with identical means and covariances cannot be separated.
class DegeneratePairError : public NumericError {
 public:
  explicit DegeneratePairError(const std::string& what) : NumericError(what) {}
};

// A violated internal invariant, never the caller's fault.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ExitCode::kInternal, what) {}
};

}  // namespace ffmlp
