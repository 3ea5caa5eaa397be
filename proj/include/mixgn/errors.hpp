#pragma once

#include <stdexcept>
#include <string>

namespace mixgn {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric argument violates a stated bound; the message names the bound.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input is structurally valid but degenerate (zero field, zero mass, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Field file is malformed (magic, version, length).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace mixgn
