#pragma once

#include <stdexcept>
#include <string>

namespace bgcoh {

/// Bad input: rejected before any computation starts.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure did not deliver a certified answer.
class ComputeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bgcoh
