#pragma once

#include <stdexcept>
#include <string>

// Error kinds raised by the library. Bad inputs use std::invalid_argument
// directly; the types below cover the domain-specific failure modes.
namespace horolab {

// Iteration caps that should never trigger on valid input.
class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation would exceed a hard size cap (grid nodes, hash size, N).
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Orbit time beyond what double precision resolves.
class PrecisionLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedIndex : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UndefinedDistribution : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The right-hand side is not annihilated by the invariant distribution.
class NotACoboundary : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NotAMapCoboundary : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// lambda == 0 requested from the twisted integrator.
class UseUntwistedPath : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutOfRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace horolab
