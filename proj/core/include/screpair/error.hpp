#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace screpair {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that violates a documented invariant. `field` names the offender.
class InvalidInput : public Error {
 public:
  InvalidInput(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// An operation was called outside its precondition (e.g. IIS on a feasible model).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class NameResolutionError : public Error {
 public:
  NameResolutionError(std::string name, std::vector<std::string> near_misses);
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& near_misses() const noexcept { return near_misses_; }

 private:
  std::string name_;
  std::vector<std::string> near_misses_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

// Persistence / wire-format problems.
class FormatError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

// A component was set up with unusable parameters (missing fix script, bad
// endpoint, dataset request that cannot be met).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

}  // namespace screpair
