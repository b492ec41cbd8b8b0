#pragma once

/// \file errors.hpp
/// Exception types thrown by the library.

#include <stdexcept>
#include <string>

namespace hpmg {

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied arguments was violated.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A local block could not be factorized (e.g. penalty too small).
class AssemblyError : public Error {
public:
  using Error::Error;
};

/// An iterative coarse solve diverged.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// Internal traversal/ordering bug detected at runtime.
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace hpmg
