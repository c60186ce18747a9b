#pragma once

#include <stdexcept>

namespace momhier {

// Base class for every error the library throws deliberately.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed call: bad sizes, invalid indices, inconsistent arguments.
struct InvalidArgument : Error {
  using Error::Error;
};

// A declared quantum state fails the density-matrix requirements
// (Hermiticity, unit trace, positivity) beyond tolerance.
struct InvalidState : Error {
  using Error::Error;
};

// The truncated number basis is too small for the requested state or
// moment order; results would be corrupted by truncation.
struct CutoffTooSmall : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// A phase-space grid fails its extent or normalization preconditions.
struct GridTooSmall : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// A job or state description violates the input schema.
struct ParseError : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// An internal numerical consistency check failed (structure residues,
// eigenvalue pairing). Indicates ill conditioning, not bad input shape.
struct NumericalFailure : Error {
  using Error::Error;
};

// The leading second-moment block is singular to tolerance; the
// closed-form inverse is unavailable and callers must take the
// null-space-aware reduction instead.
struct SingularBlock : Error {
  using Error::Error;
};

}  // namespace momhier
