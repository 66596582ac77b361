#pragma once

#include <stdexcept>
#include <string>

namespace ldptop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A frame, landmark or manifest file could not be read or decoded.
class LoadError : public Error {
public:
    using Error::Error;
};

/// A file is readable but does not follow its interchange format.
class FormatError : public Error {
public:
    using Error::Error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

/// Landmark track is missing a frame index.
class GapError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Manifest content violates a record-level invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid numeric parameter (window length, order, C, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input too small for the requested operation (descriptor support, area split).
class TooSmallError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition (e.g. out-of-bounds derivative neighbor).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace ldptop
