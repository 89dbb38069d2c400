#pragma once

#include <stdexcept>
#include <string>

namespace emocap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A document did not match its expected schema. `field()` names the
/// offending JSON path.
class SchemaError : public Error {
 public:
  SchemaError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class LexiconError : public Error {
 public:
  using Error::Error;
};

class RenderError : public Error {
 public:
  using Error::Error;
};

class ReferenceError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

/// Backend failures. Subclasses let callers tell transport problems,
/// throttling and cache misses apart.
class BackendError : public Error {
 public:
  using Error::Error;
};

class NetworkError : public BackendError {
 public:
  using BackendError::BackendError;
};

class RateLimitError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

class ReplayMissError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace emocap
