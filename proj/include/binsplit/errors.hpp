#pragma once

#include <stdexcept>
#include <string>

namespace binsplit {

// Invalid user configuration. `field` is a dotted path ("policy.mu") or a
// short label ("dimension 2") identifying the offending input.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A declared assumption contradicts a provable bound (e.g. beta > d/alpha).
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// step/observe called out of order.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Internal consistency failure, e.g. a sampled point outside its bin.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numerical diagnostic did not have enough signal to produce an estimate.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query outside the region on which the objective may be evaluated.
class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace binsplit
