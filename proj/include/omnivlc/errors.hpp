#pragma once

#include <stdexcept>

namespace omnivlc {

/// A matrix row with zero norm cannot be scaled onto the unit sphere.
class DegenerateRowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The channel carries no power anywhere, so there is nothing to optimize.
class NoSignalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A receiver whose effective gain is zero on every stream; no detector can
/// do better than guessing for such a user.
class UncoverableUserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The configuration document is not syntactically valid JSON.
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The configuration parsed but a field is missing, unknown, or out of range.
/// The message names the offending field.
class ConfigValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An output file could not be created or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace omnivlc
