#pragma once

// Physical parameters shared by every gate scheme.
//
// Rates are angular frequencies. Any consistent unit works: rad/s for
// absolute results, or units of the emitter decay rate gamma (gamma = 1) for
// the dimensionless figure-style computations.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "cavity_gate/error.hpp"

namespace cgate {

inline constexpr double pi = std::numbers::pi;

/// Ordinary frequency (Hz) to angular rate (rad/s).
inline constexpr double from_hz(double hz) { return 2.0 * pi * hz; }

/// Decoherence contribution of a coherence time, 1/(2 T2).
inline double rate_from_t2(double t2) {
    require(t2 > 0.0 && std::isfinite(t2), "T2 must be positive and finite");
    return 1.0 / (2.0 * t2);
}

class CavitySystem {
public:
    CavitySystem(double g, double kappa, double gamma) : g_(g), kappa_(kappa), gamma_(gamma) {
        require(std::isfinite(g) && g > 0.0, "cavity coupling g must be positive");
        require(std::isfinite(kappa) && kappa > 0.0, "cavity decay kappa must be positive");
        require(std::isfinite(gamma) && gamma > 0.0, "emitter decay gamma must be positive");
    }

    /// Builds the system with C = 4 g^2 / (kappa gamma) and the given g/kappa.
    static CavitySystem from_cooperativity(double cooperativity, double g_over_kappa, double gamma) {
        require(cooperativity > 0.0 && std::isfinite(cooperativity), "cooperativity must be positive");
        require(g_over_kappa > 0.0 && std::isfinite(g_over_kappa), "g/kappa must be positive");
        const double kappa = cooperativity * gamma / (4.0 * g_over_kappa * g_over_kappa);
        return {g_over_kappa * kappa, kappa, gamma};
    }

    double g() const { return g_; }
    double kappa() const { return kappa_; }
    double gamma() const { return gamma_; }
    double g_over_kappa() const { return g_ / kappa_; }

    double cooperativity() const { return 4.0 * g_ * g_ / (kappa_ * gamma_); }

    /// All rates divided by gamma.
    CavitySystem dimensionless() const { return scaled(1.0 / gamma_); }

    CavitySystem scaled(double factor) const {
        require(factor > 0.0, "scale factor must be positive");
        return {g_ * factor, kappa_ * factor, gamma_ * factor};
    }

private:
    double g_;
    double kappa_;
    double gamma_;
};

inline double cooperativity(const CavitySystem& sys) { return sys.cooperativity(); }

enum class Scheme { Scattering, SimpleExchange, Raman };

inline const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::Scattering: return "scattering";
    case Scheme::SimpleExchange: return "simple";
    case Scheme::Raman: return "raman";
    }
    return "unknown";
}

/// Additional (non-radiative) decoherence processes, all as rates.
struct DecoherenceSpec {
    double qubit_relaxation = 0.0;      // gamma_updown
    double qubit_dephasing = 0.0;       // gamma*_updown
    double optical_dephasing = 0.0;     // gamma*
    double shelving_decay = 0.0;        // gamma_s
    double t2 = 0.0;                    // qubit coherence time; 0 = not given

    void validate() const {
        for (double r : {qubit_relaxation, qubit_dephasing, optical_dephasing, shelving_decay, t2})
            require(std::isfinite(r) && r >= 0.0, "decoherence rates must be finite and non-negative");
    }
};

/// Single effective decoherence rate Gamma for a scheme.
///
/// Qubit part: gamma_updown/8 + gamma*_updown/4, raised to at least 1/(2 T2)
/// when a coherence time is given. The simple exchange adds half the optical
/// pure dephasing; the Raman exchange adds an eighth of the shelving decay.
inline double effective_gamma(const DecoherenceSpec& spec, Scheme scheme) {
    spec.validate();
    double rate = spec.qubit_relaxation / 8.0 + spec.qubit_dephasing / 4.0;
    if (spec.t2 > 0.0) rate = std::max(rate, rate_from_t2(spec.t2));
    switch (scheme) {
    case Scheme::Scattering: break;
    case Scheme::SimpleExchange: rate += spec.optical_dephasing / 2.0; break;
    case Scheme::Raman: rate += spec.shelving_decay / 8.0; break;
    }
    return rate;
}

enum class Method { Analytic, NumericAmplitude, NonHermitian, Lindblad };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::Analytic: return "analytic";
    case Method::NumericAmplitude: return "numeric_amplitude";
    case Method::NonHermitian: return "non_hermitian";
    case Method::Lindblad: return "lindblad";
    }
    return "unknown";
}

struct GateResult {
    double fidelity = 0.0;
    double gate_time = 0.0;              // same time unit as 1/rates
    double success_probability = 1.0;
    Method method = Method::Analytic;
    std::vector<std::string> warnings;   // validity-domain notes, never fatal
};

/// Clamps into [0, 1], recording a warning when the raw value was outside.
inline double clamp_fidelity(double f, std::vector<std::string>& warnings) {
    if (f < 0.0 || f > 1.0) {
        warnings.push_back("fidelity " + std::to_string(f) + " outside [0,1]; clamped");
        return std::clamp(f, 0.0, 1.0);
    }
    return f;
}

} // namespace cgate
