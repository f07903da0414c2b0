#pragma once

#include <stdexcept>
#include <string>

namespace sgnls {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested level exceeds the configured maximum.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ForbiddenEigenvalueError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class LevelMismatchError : public Error {
 public:
  using Error::Error;
};

// A constructed object failed its own invariant check.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class CacheVersionError : public Error {
 public:
  using Error::Error;
};

class CacheCorruptionError : public Error {
 public:
  using Error::Error;
};

// Cache header is valid but describes a different basis than requested.
class CacheMismatchError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double last_valid_time);
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

}  // namespace sgnls
