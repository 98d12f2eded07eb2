#pragma once

// Simple virtual-photon-exchange phase gate.
//
// Emitter A is optically excited; in the up-down branch its excitation is
// resonantly swapped with emitter B through a dispersively detuned cavity,
// which after one full exchange cycle returns with a pi phase relative to
// the up-up branch. Excitation pulses are instantaneous and perfect.

#include <cmath>
#include <limits>

#include "cavity_gate/dense.hpp"
#include "cavity_gate/error.hpp"
#include "cavity_gate/qed_params.hpp"

namespace cgate {

/// Which pair of transitions is brought into resonance.
enum class ExchangeMode {
    OppositeSpin,  // Delta_A - Delta_B ~ delta_eg: the up-down branch takes the pi phase
    SameSpin,      // Delta_A - Delta_B ~ 0: the up-up branch takes the pi phase
};

struct ExchangeConfig {
    CavitySystem cavity;
    double Delta = 1.0;                // cavity detuning of emitter A's driven transition
    double delta_eg = std::numeric_limits<double>::infinity();  // infinite = ideal spectator
    double Delta_eps = 0.0;            // resonance error on top of the optimal tuning
    double Gamma = 0.0;
    ExchangeMode mode = ExchangeMode::OppositeSpin;
    // Per-transition couplings; NaN means "use cavity.g()".
    double g_upA = std::numeric_limits<double>::quiet_NaN();
    double g_downB = std::numeric_limits<double>::quiet_NaN();
    double g_upB = std::numeric_limits<double>::quiet_NaN();

    double coupling_upA() const { return std::isnan(g_upA) ? cavity.g() : g_upA; }
    double coupling_downB() const { return std::isnan(g_downB) ? cavity.g() : g_downB; }
    double coupling_upB() const { return std::isnan(g_upB) ? cavity.g() : g_upB; }
    bool ideal() const { return std::isinf(delta_eg); }

    /// Coupling of emitter B's transition that is resonant in the chosen mode.
    double resonant_coupling_B() const {
        return mode == ExchangeMode::OppositeSpin ? coupling_downB() : coupling_upB();
    }

    void validate() const {
        require(std::isfinite(Delta) && Delta > 0.0, "cavity detuning Delta must be positive");
        require(!std::isnan(delta_eg) && delta_eg >= 0.0, "delta_eg must be non-negative (inf = ideal)");
        require(std::isfinite(Delta_eps), "Delta_eps must be finite");
        require(std::isfinite(Gamma) && Gamma >= 0.0, "Gamma must be finite and non-negative");
        for (double g : {coupling_upA(), coupling_downB(), coupling_upB()})
            require(std::isfinite(g) && g >= 0.0, "couplings must be finite and non-negative");
    }
};

/// Subspace Hamiltonians. Bases:
///   up-down: {|e2 down 0>, |up down 1>, |up e1 0>}
///   up-up:   {|e2 up 0>,   |up up 1>,   |up e2 0>}
struct ExchangeHamiltonians {
    ComplexMatrix H_updown;
    ComplexMatrix H_upup;
    ComplexMatrix Heff_updown;
    ComplexMatrix Heff_upup;
};

/// Detuning of emitter B that cancels the differential cavity Stark shift.
inline double tune_Delta_B(double Delta, double g_upA, double g_downB, double delta_eg) {
    require(std::isfinite(Delta) && Delta > 0.0, "Delta must be positive");
    if (std::isinf(delta_eg))
        throw Error(ErrorKind::InvalidArgument,
                    "delta_eg is infinite: no finite Delta_B; use the same-spin resonant mode");
    return Delta + (g_upA * g_upA - g_downB * g_downB) / Delta - delta_eg;
}

inline ExchangeHamiltonians build_hamiltonians(const ExchangeConfig& config) {
    config.validate();
    const double d = config.Delta;
    const double gA = config.coupling_upA();
    const double gdB = config.coupling_downB();
    const double guB = config.coupling_upB();
    const double kappa = config.cavity.kappa();
    const double gamma = config.cavity.gamma();

    // Bottom-right entry of the resonant branch: Delta_A - Delta_B (- delta_eg)
    // evaluated at the tuned Delta_B plus the resonance error.
    const double resonant_gB = config.resonant_coupling_B();
    const double resonant_entry = -(gA * gA - resonant_gB * resonant_gB) / d - config.Delta_eps;

    auto make = [d, gA](double gB, double corner) {
        ComplexMatrix h = ComplexMatrix::Zero(3, 3);
        h(0, 1) = h(1, 0) = gA;
        h(1, 1) = d;
        h(1, 2) = h(2, 1) = gB;
        h(2, 2) = corner;
        return h;
    };

    // The off-resonant branch is split from the resonant one by delta_eg; an
    // infinite splitting leaves its third state uncoupled.
    auto spectator = [&](double gB, bool up_down) {
        if (config.ideal()) return make(0.0, 0.0);
        const double shift = up_down ? -config.delta_eg : config.delta_eg;
        return make(gB, resonant_entry + shift);
    };

    ExchangeHamiltonians out;
    if (config.mode == ExchangeMode::OppositeSpin) {
        out.H_updown = make(gdB, resonant_entry);
        out.H_upup = spectator(guB, false);
    } else {
        out.H_upup = make(guB, resonant_entry);
        out.H_updown = spectator(gdB, true);
    }
    const Eigen::Vector3d decay(gamma, kappa, gamma);
    out.Heff_updown = with_decay(out.H_updown, decay);
    out.Heff_upup = with_decay(out.H_upup, decay);
    return out;
}

/// Time for a pi phase: pi Delta / (g_A g_B).
inline double gate_time_exchange(double Delta, double g_upA, double g_downB) {
    require(g_upA > 0.0 && g_downB > 0.0, "couplings must be positive");
    return pi * Delta / (g_upA * g_downB);
}

inline double gate_time_exchange(const ExchangeConfig& config) {
    return gate_time_exchange(config.Delta, config.coupling_upA(), config.resonant_coupling_B());
}

/// Closed-form relative-phase fidelity from adiabatic elimination of the
/// photon amplitude, for equal couplings g^2 = g_A g_B.
inline double f_pi_closed_form(const ExchangeConfig& config) {
    config.validate();
    const double kappa = config.cavity.kappa();
    const double gamma = config.cavity.gamma();
    const double g2 = config.coupling_upA() * config.resonant_coupling_B();
    const double coop = 4.0 * g2 / (kappa * gamma);
    const double d = config.Delta;
    const double damp = std::exp(-2.0 * pi * d / (coop * kappa) - pi * kappa / (2.0 * d));
    const cplx spectator = config.ideal() ? cplx(1.0) : std::exp(I * (4.0 * pi * g2 / (d * config.delta_eg)));
    const cplx resonant = std::cosh(pi * kappa / (2.0 * d)) * std::exp(-I * (pi * config.Delta_eps * d / g2));
    return 0.5 * damp * std::abs(spectator + resonant);
}

/// Limit delta_eg >> g^2/Delta >> Delta_eps of the closed form:
/// exp(-2 pi x / C - pi / (2x)) cosh^2(pi / (4x)) with x = Delta/kappa.
inline double f_pi_ideal(double Delta_over_kappa, double coop) {
    require(Delta_over_kappa > 0.0 && coop > 0.0, "arguments must be positive");
    const double x = Delta_over_kappa;
    return std::exp(-2.0 * pi * x / coop - pi / (2.0 * x)) * std::pow(std::cosh(pi / (4.0 * x)), 2);
}

/// Amplitudes <e2 up 0|U_upup|e2 up 0> and <e2 down 0|U_updown|e2 down 0>.
struct BranchAmplitudes {
    cplx upup;
    cplx updown;
    double f_pi() const { return 0.5 * std::abs(upup - updown); }
};

inline BranchAmplitudes exchange_amplitudes(const ExchangeConfig& config, double T) {
    const auto h = build_hamiltonians(config);
    StateVector e0 = StateVector::Zero(3);
    e0(0) = 1.0;
    return {propagate(h.Heff_upup, e0, T)(0), propagate(h.Heff_updown, e0, T)(0)};
}

/// Non-Hermitian propagation of both branches; F = (F_pi + 1)/2 - Gamma T.
inline GateResult fidelity_numeric_exchange(const ExchangeConfig& config, double T) {
    require(std::isfinite(T) && T > 0.0, "gate time must be positive");
    const auto amps = exchange_amplitudes(config, T);
    GateResult r;
    r.method = Method::NonHermitian;
    r.gate_time = T;
    r.success_probability = 1.0;
    r.fidelity = clamp_fidelity(0.5 * (amps.f_pi() + 1.0) - config.Gamma * T, r.warnings);
    return r;
}

inline GateResult fidelity_numeric_exchange(const ExchangeConfig& config) {
    return fidelity_numeric_exchange(config, gate_time_exchange(config));
}

/// Closed-form fidelity at the configured detuning: (F_pi + 1)/2 - Gamma T.
inline GateResult fidelity_closed_form_exchange(const ExchangeConfig& config) {
    GateResult r;
    r.method = Method::Analytic;
    r.gate_time = gate_time_exchange(config);
    if (std::abs(config.coupling_upA() - config.resonant_coupling_B()) > 1e-9 * config.coupling_upA())
        r.warnings.push_back("closed form assumes equal couplings");
    r.fidelity = clamp_fidelity(0.5 * (f_pi_closed_form(config) + 1.0) - config.Gamma * r.gate_time, r.warnings);
    return r;
}

/// Optimal gate time 2 pi / (gamma sqrt(C)).
inline double optimal_gate_time_exchange(const CavitySystem& cavity) {
    return 2.0 * pi / (cavity.gamma() * std::sqrt(cavity.cooperativity()));
}

/// Maximum fidelity at 2 Delta = kappa sqrt(C), expanded for C >> 1.
/// Ignores config.Delta.
inline GateResult max_fidelity_exchange(const ExchangeConfig& config) {
    config.validate();
    const double coop = config.cavity.cooperativity();
    const double t_o = optimal_gate_time_exchange(config.cavity);
    const double detuning_term = std::pow(t_o * config.Delta_eps / (2.0 * pi), 2);
    const double spectator_term = config.ideal() ? 0.0 : std::pow(2.0 * pi / (t_o * config.delta_eg), 2);
    const double f = 1.0 - pi / std::sqrt(coop) -
                     (3.0 * pi * pi / 32.0) * (detuning_term + spectator_term - 12.0 / coop) -
                     config.Gamma * t_o;
    GateResult r;
    r.method = Method::Analytic;
    r.gate_time = t_o;
    if (coop < 100.0) r.warnings.push_back("cooperativity not >> 1");
    r.fidelity = clamp_fidelity(f, r.warnings);
    return r;
}

/// Detuning that maximizes the ideal closed form, kappa sqrt(C)/2.
inline double optimal_detuning_exchange(const CavitySystem& cavity) {
    return 0.5 * cavity.kappa() * std::sqrt(cavity.cooperativity());
}

} // namespace cgate
