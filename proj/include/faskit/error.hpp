#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace faskit {

enum class ErrorKind {
    RankDeficient,
    DimensionMismatch,
    InsufficientObservations,
    TooManyInstruments,
    InvalidCount,
    DegenerateInstrument,
    ZeroFirstStage,
    WeakIdentification,
    SingularSigma,
    InvalidVariance,
    InvalidModel,
    InvalidArgument,
    FileNotFound,
    MissingColumn,
    ParseError,
    EmptyAfterFiltering,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the kinds above so
// callers (and the CLI) can branch on it without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace faskit
