#pragma once

#include <stdexcept>
#include <string>

namespace se3filter {

/// A caller violated an operation's precondition.
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// An attitude reached the Rodriguez-vector pole (rotation angle pi,
/// Tr(R) = -1), where the vector parameterization has no finite value.
struct SingularAttitude : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A vector set is rank-deficient (collinear directions, degenerate Wahba
/// input) and cannot determine an attitude.
struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scenario file could not be parsed or failed validation.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Filesystem failure while reading or writing outputs.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace se3filter
