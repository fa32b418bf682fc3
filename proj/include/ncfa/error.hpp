#pragma once

#include <stdexcept>
#include <string>

namespace ncfa {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Operand validation failed (non-finite entries, mismatched bases, ...).
struct InvalidOperandError : Error {
  using Error::Error;
};

// Requested norm/operation not defined for this basis or field shape.
struct UnsupportedOperationError : Error {
  using Error::Error;
};

// A coefficient shift would move mass outside the truncation window.
struct TruncationOverflowError : Error {
  using Error::Error;
};

// Group element does not live on the discretization lattice of the rep.
struct GridIncompatibleError : Error {
  using Error::Error;
};

// Triangle-degenerate angle map (rho ~ 0), spiral radius ~ 0, etc.
struct DegenerateGeometryError : Error {
  using Error::Error;
};

// Parameter excluded from the dual object (e.g. t = 0 for Heisenberg).
struct ExcludedParameterError : Error {
  using Error::Error;
};

// Derivation direction not meaningful for the requested group.
struct UnsupportedDirectionError : Error {
  using Error::Error;
};

// Module-space weight violating w(rho) <= rho or positivity.
struct InvalidWeightError : Error {
  using Error::Error;
};

// Malformed CLI usage / config file.
struct ConfigError : Error {
  using Error::Error;
};

// Malformed serialized field.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace ncfa
