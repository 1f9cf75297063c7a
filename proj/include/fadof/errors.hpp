#pragma once

#include <stdexcept>
#include <string>

namespace fadof {

// Error categories map one-to-one onto CLI exit codes (see cli.hpp).
enum class ErrorKind {
    Domain,            // argument outside the valid domain
    InvalidCoefficients,
    Config,
    Io,
    Numeric,
    NoPeak,
    GridTooNarrow,
    Infeasible,
    InsufficientData,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::InvalidCoefficients: return "invalid-coefficients";
    case ErrorKind::Config: return "config";
    case ErrorKind::Io: return "io";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::NoPeak: return "no-peak";
    case ErrorKind::GridTooNarrow: return "grid-too-narrow";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::InsufficientData: return "insufficient-data";
    }
    return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace fadof
