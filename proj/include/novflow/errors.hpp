#pragma once

#include <stdexcept>
#include <string>

namespace novflow {

/// Base class for every error raised by the library. `code()` is the stable
/// machine-readable name that appears in CLI reports.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define NOVFLOW_DEFINE_ERROR(Name)                                        \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name, what) {}    \
    };

// novikov
NOVFLOW_DEFINE_ERROR(NotAUnit)
NOVFLOW_DEFINE_ERROR(TruncationTooCoarse)
NOVFLOW_DEFINE_ERROR(NotAComplex)
NOVFLOW_DEFINE_ERROR(NonIntegralInvariantFactor)
NOVFLOW_DEFINE_ERROR(DimensionMismatch)
// strata
NOVFLOW_DEFINE_ERROR(InvariantViolation)
// flowcat
NOVFLOW_DEFINE_ERROR(DSquaredNonzero)
NOVFLOW_DEFINE_ERROR(MissingCount)
NOVFLOW_DEFINE_ERROR(InvalidCategory)
NOVFLOW_DEFINE_ERROR(SplitInvalid)
NOVFLOW_DEFINE_ERROR(NoHomotopyAtTruncation)
NOVFLOW_DEFINE_ERROR(NegativeValuationEntry)
NOVFLOW_DEFINE_ERROR(DegreeMismatch)
NOVFLOW_DEFINE_ERROR(ValuationNotPositive)
// perturb
NOVFLOW_DEFINE_ERROR(IncompatibleBoundary)
NOVFLOW_DEFINE_ERROR(BudgetExceeded)
NOVFLOW_DEFINE_ERROR(NotTransverse)
NOVFLOW_DEFINE_ERROR(CurveTrackingFailure)
NOVFLOW_DEFINE_ERROR(OutOfScope)
// io
NOVFLOW_DEFINE_ERROR(ParseError)
NOVFLOW_DEFINE_ERROR(SchemaError)

#undef NOVFLOW_DEFINE_ERROR

}  // namespace novflow
