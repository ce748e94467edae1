#pragma once

#include <stdexcept>
#include <string>

namespace gabor {

enum class Errc {
    Validation,
    OutOfRange,
    TailNotCertifiable,
    DegenerateDenominator,
    EndpointZero,
    QuadratureNotConverged,
    ZeroFunction,
    DensityTooLow,
    ConditionNotMet,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::Validation: return "Validation";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::TailNotCertifiable: return "TailNotCertifiable";
        case Errc::DegenerateDenominator: return "DegenerateDenominator";
        case Errc::EndpointZero: return "EndpointZero";
        case Errc::QuadratureNotConverged: return "QuadratureNotConverged";
        case Errc::ZeroFunction: return "ZeroFunction";
        case Errc::DensityTooLow: return "DensityTooLow";
        case Errc::ConditionNotMet: return "ConditionNotMet";
    }
    return "Unknown";
}

// Numeric failures as opposed to bad input.
inline bool is_certification_failure(Errc c) {
    return c == Errc::TailNotCertifiable || c == Errc::DegenerateDenominator ||
           c == Errc::EndpointZero || c == Errc::QuadratureNotConverged;
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace gabor
