#pragma once

#include <stdexcept>
#include <string>

namespace vrb {

// Error taxonomy used across the library. Callers can catch the base type or
// a specific one; messages always name the offending quantity.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dimension / length mismatches.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Bad configuration files, schema/database inconsistencies.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Operations applied to an object in the wrong state (e.g. stepping a
// finished dialog).
class StateError : public Error {
public:
    using Error::Error;
};

// Actions referencing unknown domains/slots/entities.
class ProtocolError : public Error {
public:
    using Error::Error;
};

// File system problems; message names the path.
class IoError : public Error {
public:
    using Error::Error;
};

// Corrupt or truncated serialized data.
class IntegrityError : public Error {
public:
    using Error::Error;
};

// Serialized data from an unsupported format version.
class VersionError : public Error {
public:
    using Error::Error;
};

// Command line misuse; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

} // namespace vrb
