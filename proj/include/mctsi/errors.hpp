#ifndef MCTSI_ERRORS_HPP
#define MCTSI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mctsi {

// Exit-code mapping used by the CLI: parse 2, invariant 3, precondition 4, io 5.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input that never became a structured object (bad JSON, bad CSV).
struct ParseError : Error {
    using Error::Error;
};

// A structured object violates one of its documented invariants
// (non-stochastic kernel row, disconnected edge list, pmf not summing to 1).
struct InvariantError : Error {
    using Error::Error;
};

// A well-formed value passed to an operation outside its documented domain
// (invalid marginal key, k < 2 partition, bias >= delta/2).
struct PreconditionError : Error {
    using Error::Error;
};

// A computation would exceed a hard resource guard (state count, Bell number).
struct SizeLimitError : PreconditionError {
    using PreconditionError::PreconditionError;
};

// KL divergence query where p puts mass outside q's support.
struct DivergenceInfiniteError : PreconditionError {
    using PreconditionError::PreconditionError;
};

// Filesystem failure (unreadable input, unwritable output directory).
struct IoError : Error {
    using Error::Error;
};

// Internal cross-check failed; indicates a bug, not a user error.
struct InternalConsistencyError : Error {
    using Error::Error;
};

}  // namespace mctsi

#endif
