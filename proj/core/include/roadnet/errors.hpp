#pragma once

#include <stdexcept>
#include <string>

namespace roadnet {

/// Bad user-supplied data: malformed files, out-of-range values, violated
/// preconditions on caller input.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A linear system or fit could not be solved for the given data
/// (duplicate locations, collinear samples).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Broken internal invariant. Reaching this is a bug.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace roadnet
