#pragma once

#include <stdexcept>
#include <string>

namespace dic {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inverse kinematics target outside the leg workspace.
struct UnreachableError : Error {
  using Error::Error;
};

// Gap-world generation called with W_max < W_min.
struct InvalidWidthError : Error {
  using Error::Error;
};

// Depth preprocessing input is not the expected raw sensor shape.
struct BadShapeError : Error {
  using Error::Error;
};

// Variable/unconstrained gait queried without the contact bits it needs.
struct MissingContactBitsError : Error {
  using Error::Error;
};

// Commanded velocity outside the actuator-safe box.
struct ActionOutOfBoundsError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace dic
