#pragma once

#include <stdexcept>
#include <string>

namespace lsm {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration value; the message names the offending field.
struct ConfigError : Error {
    using Error::Error;
};

/// Dimension mismatch; the message states expected vs. actual.
struct ShapeError : Error {
    using Error::Error;
};

/// Non-finite values or failed numeric computation.
struct NumericError : Error {
    using Error::Error;
};

/// Normal equations not solvable without regularization.
struct RankDeficiencyError : NumericError {
    using NumericError::NumericError;
};

/// Malformed text input (CSV, JSON); carries a line number where known.
struct ParseError : Error {
    using Error::Error;
};

/// File could not be read or written.
struct IoError : Error {
    using Error::Error;
};

/// Structurally invalid model or cache document.
struct FormatError : Error {
    using Error::Error;
};

/// File carries a format tag this build does not support.
struct UnsupportedVersionError : FormatError {
    using FormatError::FormatError;
};

/// Truncated file or checksum mismatch.
struct CorruptFileError : FormatError {
    using FormatError::FormatError;
};

/// Retraining requested on a model without a retained state cache.
struct CacheMissingError : Error {
    using Error::Error;
};

}  // namespace lsm
