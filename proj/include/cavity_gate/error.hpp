#pragma once

#include <stdexcept>
#include <string>

namespace cgate {

enum class ErrorKind {
    InvalidArgument,
    NonFinite,
    ConvergenceFailure,
    DivergentDenominator,
    QuadratureNotConverged,
    ZeroDecoherence,
    StepNotConverged,
    DegenerateBranch,
    NonPhysical,
    BoundaryMaximum,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::DivergentDenominator: return "DivergentDenominator";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::ZeroDecoherence: return "ZeroDecoherence";
    case ErrorKind::StepNotConverged: return "StepNotConverged";
    case ErrorKind::DegenerateBranch: return "DegenerateBranch";
    case ErrorKind::NonPhysical: return "NonPhysical";
    case ErrorKind::BoundaryMaximum: return "BoundaryMaximum";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so callers (sweeps, CLI)
/// can map it to NaN cells or exit codes without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw Error(ErrorKind::InvalidArgument, what);
}

} // namespace cgate
