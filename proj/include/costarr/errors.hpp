#pragma once

#include <stdexcept>
#include <string>

namespace costarr {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// exit codes: ArgumentError -> 2, DataError (and subclasses) -> 3, IoError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user-supplied arguments or preconditions (wrong flags, empty inputs).
struct ArgumentError : Error {
    using Error::Error;
};

// Malformed or inconsistent data: bad file contents, shape mismatches,
// degenerate fits.
struct DataError : Error {
    using Error::Error;
};

// Unparseable file contents (bad magic, unknown dtype, ragged CSV).
struct FormatError : DataError {
    using DataError::DataError;
};

// Dimension or shape inconsistencies between tensors.
struct ShapeError : DataError {
    using DataError::DataError;
};

// Model fitting failures (empty class, degenerate logit range).
struct FitError : DataError {
    using DataError::DataError;
};

// Filesystem and stream failures, including truncated payloads.
struct IoError : Error {
    using Error::Error;
};

} // namespace costarr
