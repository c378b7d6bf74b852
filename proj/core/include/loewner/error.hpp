#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loewner {

// Raised when an operation's input violates its precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A composition of slit maps left the open upper half-plane.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Unzipping hit a point on or below the real axis: the input curve is not simple.
class ZipperError : public std::runtime_error {
 public:
  ZipperError(const std::string& what, std::size_t step)
      : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Smoothing could not reach the requested energy gap.
class MollifyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace loewner
