#pragma once

#include <stdexcept>
#include <string>

namespace trl {

/// Bad arguments or a spec that violates its invariants.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The mesher could not produce an acceptable discretization.
class MeshingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solve failed: mechanism, singular element, or no convergence.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File or stream could not be written/read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trl
