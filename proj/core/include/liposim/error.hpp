#pragma once

#include <stdexcept>
#include <string>

namespace liposim {

// Thrown when an argument violates a documented precondition
// (nonpositive diameter, negative amount, bad generator parameters, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A constructed object would break a structural invariant: packing,
// depth bound, mode purity, morphology/height mismatch.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Operation requested in the wrong simulation mode.
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Lookup of a species, compartment or MVL id that does not exist.
class UnknownIdError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Population sampling could not satisfy its packing constraint.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operation on a compartment whose membrane has already been destroyed.
class LysedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulation run failed; the message carries the step index.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace liposim
