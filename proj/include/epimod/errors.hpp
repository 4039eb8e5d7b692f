#pragma once

#include <stdexcept>
#include <string>

namespace epimod {

/// Error categories raised by the library. Each maps to one failure mode of
/// a public operation so callers (and tests) can distinguish them.
enum class Errc {
    NegativeValue,
    NonFiniteValue,
    EmptySeries,
    OriginBeyondTruth,
    InsufficientHistory,
    DegenerateSeries,
    NegativeForecastInput,
    NoQuantiles,
    EmptyInput,
    ZeroBaseline,
    AsymmetricQuantiles,
    NoOverlap,
    ParseError,
    NonMonotoneDates,
    UnparseableTarget,
    InconsistentHorizons,
    NoRetrospectiveOrigins,
    InvalidArgument,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void throw_error(Errc code, const std::string& what) {
    throw Error(code, what);
}

} // namespace epimod
