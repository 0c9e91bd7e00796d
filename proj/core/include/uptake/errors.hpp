#pragma once

#include <stdexcept>
#include <string>

namespace uptake {

// Root of the library's exception hierarchy. The three direct children
// correspond to the CLI exit codes: ParseError -> 1, PreconditionError -> 2,
// NumericError -> 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input: unreadable files, bad CSV rows, bad dates, bad JSON.
class ParseError : public Error {
public:
    using Error::Error;
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what) {}
};

// Statistical preconditions not met by otherwise well-formed input.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Iterative numerics failed to produce a usable result.
class NumericError : public Error {
public:
    using Error::Error;
};

#define UPTAKE_PRECONDITION_ERROR(NAME)                                        \
    class NAME : public PreconditionError {                                    \
    public:                                                                    \
        using PreconditionError::PreconditionError;                            \
    }

UPTAKE_PRECONDITION_ERROR(EmptyOverlap);
UPTAKE_PRECONDITION_ERROR(ZeroDenominator);
UPTAKE_PRECONDITION_ERROR(MissingCohort);
UPTAKE_PRECONDITION_ERROR(MissingMonth);
UPTAKE_PRECONDITION_ERROR(UnknownStance);
UPTAKE_PRECONDITION_ERROR(ConstantInput);
UPTAKE_PRECONDITION_ERROR(LengthMismatch);
UPTAKE_PRECONDITION_ERROR(RankDeficient);
UPTAKE_PRECONDITION_ERROR(TooFewRows);
UPTAKE_PRECONDITION_ERROR(SegmentTooShort);
UPTAKE_PRECONDITION_ERROR(ConstantSegment);
UPTAKE_PRECONDITION_ERROR(TooShort);
UPTAKE_PRECONDITION_ERROR(DegenerateTarget);
UPTAKE_PRECONDITION_ERROR(DimensionMismatch);

#undef UPTAKE_PRECONDITION_ERROR

class NotConverged : public NumericError {
public:
    using NumericError::NumericError;
};

class NotPositiveDefinite : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace uptake
