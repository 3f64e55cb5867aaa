#pragma once

#include <stdexcept>
#include <string>

namespace bootood {

// Error categories map onto the CLI exit codes: ConfigError -> 1,
// NumericError -> 2, IoError -> 3. Messages start with a stable condition
// token ("ZeroNorm: ...", "DimensionMismatch: ...") so callers and tests can
// match on it.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace bootood
