#pragma once

#include <stdexcept>
#include <string>

namespace rcsep {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs violate an operation's precondition (length, dimension, range).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (divergence, non-convergence, singular system).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Bad or incomplete run configuration.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Filesystem failure (unwritable directory, unreadable file).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace rcsep
