#pragma once

#include <stdexcept>
#include <string>

namespace p2p {

// Base error. The three category bases below drive the CLI exit-code mapping:
// usage problems exit 1, data problems exit 2, training problems exit 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct TrainError : Error {
    using Error::Error;
};

// --- data errors ---

struct IoError : DataError {
    using DataError::DataError;
};

struct ParseError : DataError {
    size_t row = 0;  // 1-based row number when known, 0 otherwise
    ParseError(const std::string& msg, size_t row_number = 0)
        : DataError(row_number ? msg + " (row " + std::to_string(row_number) + ")" : msg),
          row(row_number) {}
};

struct SchemaError : DataError {
    using DataError::DataError;
};

struct EmptyInputError : DataError {
    using DataError::DataError;
};

struct ZeroIncomeError : DataError {
    using DataError::DataError;
};

struct OneClassOnlyError : DataError {
    using DataError::DataError;
};

struct TooFewMinorityError : DataError {
    using DataError::DataError;
};

struct RateOutOfDomainError : DataError {
    using DataError::DataError;
};

struct NoSignChangeError : DataError {
    using DataError::DataError;
};

struct NonConvergenceError : DataError {
    using DataError::DataError;
};

struct VersionMismatchError : DataError {
    using DataError::DataError;
};

struct ChecksumMismatchError : DataError {
    using DataError::DataError;
};

// --- training errors ---

struct ShapeMismatchError : TrainError {
    using TrainError::TrainError;
};

struct TaskMismatchError : TrainError {
    using TrainError::TrainError;
};

struct NonFiniteGradientError : TrainError {
    size_t step = 0;
    NonFiniteGradientError(const std::string& msg, size_t step_index)
        : TrainError(msg + " (step " + std::to_string(step_index) + ")"), step(step_index) {}
};

}  // namespace p2p
