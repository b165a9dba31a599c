#pragma once

#include <stdexcept>
#include <string>

namespace hpccarbon {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input: bad specs, bad files, unresolved ids.
/// CLI exit code 2.
class ValidationError : public Error {
public:
  using Error::Error;
};

/// A computation needs a value the inputs do not carry, e.g. a registry
/// field marked UNKNOWN or a missing performance figure. CLI exit code 3.
class MissingDataError : public Error {
public:
  using Error::Error;
};

/// An analysis precondition is not met, e.g. too few traces for a winner
/// comparison or a window that does not overlap a trace. CLI exit code 4.
class AnalysisError : public Error {
public:
  using Error::Error;
};

} // namespace hpccarbon
