#pragma once

#include <stdexcept>
#include <string>

namespace cslink {

/// Bad user input: malformed descriptors, violated preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Two evaluation points closer than the singularity floor.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(double distance)
      : std::runtime_error("cycles intersect: |x - y| = " +
                           std::to_string(distance) +
                           " is below the singularity floor"),
        distance_(distance) {}

  double distance() const noexcept { return distance_; }

 private:
  double distance_;
};

/// Push-off self-linking changed between epsilon and epsilon/2.
class FramingInstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The intersection oracle hit a tangential or boundary crossing.
class DegenerateConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linking integral failed to converge or to round to an integer.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Level or charge quantization violated.
class QuantizationError : public InputError {
 public:
  using InputError::InputError;
};

}  // namespace cslink
