#ifndef POQG_ERRORS_HPP
#define POQG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace poqg {

// Error taxonomy mirrors the CLI exit codes: ConfigError -> 2, DataError
// (including ParseError) -> 3, InternalError -> 4.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters or CLI usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Input data that cannot be used (too small, single class, non-finite...).
class DataError : public Error {
public:
    using Error::Error;
};

// Malformed input files; messages carry line numbers where possible.
class ParseError : public DataError {
public:
    using DataError::DataError;
};

// Broken internal invariant. Reaching one of these is a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace poqg

#endif
