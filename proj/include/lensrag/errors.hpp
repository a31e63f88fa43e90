#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lensrag {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

class Timeout : public Error {
 public:
  using Error::Error;
};

class HttpError : public Error {
 public:
  HttpError(int status, const std::string& what)
      : Error("HTTP " + std::to_string(status) + ": " + what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class InvalidUrl : public Error {
 public:
  using Error::Error;
};

class QuotaExceeded : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyRegion : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

class ImageDecodeError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class DisjointTaskSets : public Error {
 public:
  using Error::Error;
};

class MissingAnnotation : public Error {
 public:
  using Error::Error;
};

enum class ViolationKind { WeightSum, Range };

struct ConfigViolation {
  ViolationKind kind;
  std::string field;
  std::string message;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigViolation> violations);
  const std::vector<ConfigViolation>& violations() const noexcept { return violations_; }

 private:
  std::vector<ConfigViolation> violations_;
};

}  // namespace lensrag
