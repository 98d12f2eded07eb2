#pragma once

// Raman-assisted virtual-photon-exchange phase gate.
//
// Qubit B's up state is shelved in a metastable level |s>. Each emitter is
// driven off-resonantly (Rabi frequency Omega_k, detuning Delta_k) so that a
// two-photon Raman process through the cavity vacuum couples |up down> and
// |down up>. One full exchange cycle leaves |up down> with a pi phase
// relative to |up s>. Shelving pulses are instantaneous and perfect; the
// shelved-state decay enters only through Gamma.

#include <cmath>
#include <limits>

#include "cavity_gate/dense.hpp"
#include "cavity_gate/error.hpp"
#include "cavity_gate/qed_params.hpp"
#include "cavity_gate/simple_exchange.hpp"

namespace cgate {

struct RamanConfig {
    CavitySystem cavity;
    double Delta_A = 1.0;   // drive detunings from the optical transitions
    double Delta_B = 1.0;
    double delta_A = 1.0;   // two-photon detunings
    double delta_B = 1.0;
    double Omega_A = 0.05;
    double Omega_B = std::numeric_limits<double>::quiet_NaN();  // NaN = matched to Omega_A
    double Gamma = 0.0;
    double g_A = std::numeric_limits<double>::quiet_NaN();      // NaN = cavity.g()
    double g_B = std::numeric_limits<double>::quiet_NaN();

    double coupling_A() const { return std::isnan(g_A) ? cavity.g() : g_A; }
    double coupling_B() const { return std::isnan(g_B) ? cavity.g() : g_B; }
    double Delta() const { return 0.5 * (Delta_A + Delta_B); }
    double Delta_eps() const { return std::abs(Delta_A - Delta_B); }
    double delta() const { return 0.5 * (delta_A + delta_B); }
    double delta_eps() const { return std::abs(delta_A - delta_B); }
    double drive_B() const;

    void validate() const {
        for (double v : {Delta_A, Delta_B, delta_A, delta_B, Omega_A})
            require(std::isfinite(v), "Raman detunings and drives must be finite");
        require(delta() > 0.0, "two-photon detuning delta must be positive");
        require(Omega_A >= 0.0, "Omega_A must be non-negative");
        require(std::isnan(Omega_B) || (std::isfinite(Omega_B) && Omega_B >= 0.0), "Omega_B must be non-negative");
        require(std::isfinite(Gamma) && Gamma >= 0.0, "Gamma must be finite and non-negative");
        require(std::isfinite(coupling_A()) && std::isfinite(coupling_B()) && coupling_A() >= 0.0 && coupling_B() >= 0.0,
                "couplings must be finite and non-negative");
    }

    /// Adiabaticity notes (Omega/Delta above 0.5).
    std::vector<std::string> warnings() const {
        std::vector<std::string> w;
        if (std::abs(Omega_A) > 0.5 * std::abs(Delta_A) || std::abs(drive_B()) > 0.5 * std::abs(Delta_B))
            w.push_back("Omega/Delta > 0.5: adiabatic elimination of the excited state is unreliable");
        return w;
    }
};

/// Drive on B that equalizes the light shifts of |up down 0> and |down up 0>,
/// Omega_A^2 (g_B^2 + delta Delta_B) = Omega_B^2 (g_A^2 + delta Delta_A), so the
/// Raman exchange between them is resonant.
struct OmegaMatch {
    double exact;
    double approx;  // g^2 << delta Delta limit
};

inline OmegaMatch match_Omega_B(const RamanConfig& c) {
    const double gA = c.coupling_A(), gB = c.coupling_B();
    const double d = c.delta();
    const double num = gA * gA + d * c.Delta_A;
    const double den = gB * gB + d * c.Delta_B;
    require(num > 0.0 && den > 0.0, "Rabi matching needs g^2 + delta*Delta > 0 for both emitters");
    require(c.Delta_A / c.Delta_B > 0.0, "Delta_A and Delta_B must share a sign");
    return {c.Omega_A * std::sqrt(den / num), c.Omega_A * std::sqrt(c.Delta_B / c.Delta_A)};
}

inline double RamanConfig::drive_B() const {
    return std::isnan(Omega_B) ? match_Omega_B(*this).exact : Omega_B;
}

/// Bases:
///   up-down: {|up down 0>, |e down 0>, |down down 1>, |down e 0>, |down up 0>}
///   up-s:    {|up s 0>, |e s 0>, |down s 1>}
struct RamanHamiltonians {
    ComplexMatrix H_updown;
    ComplexMatrix H_upup;
    ComplexMatrix Heff_updown;
    ComplexMatrix Heff_upup;
};

inline RamanHamiltonians build_raman_hamiltonians(const RamanConfig& c) {
    c.validate();
    const double gA = c.coupling_A(), gB = c.coupling_B();
    const double oA = c.Omega_A, oB = c.drive_B();
    const double kappa = c.cavity.kappa(), gamma = c.cavity.gamma();

    RamanHamiltonians out;
    ComplexMatrix h = ComplexMatrix::Zero(5, 5);
    h(0, 1) = h(1, 0) = oA;
    h(1, 1) = c.Delta_A;
    h(1, 2) = h(2, 1) = gA;
    h(2, 2) = -c.delta_A;
    h(2, 3) = h(3, 2) = gB;
    h(3, 3) = c.Delta_B + (c.delta_B - c.delta_A);
    h(3, 4) = h(4, 3) = oB;
    h(4, 4) = c.delta_B - c.delta_A;
    out.H_updown = h;

    ComplexMatrix hs = ComplexMatrix::Zero(3, 3);
    hs(0, 1) = hs(1, 0) = oA;
    hs(1, 1) = c.Delta_A;
    hs(1, 2) = hs(2, 1) = gA;
    hs(2, 2) = -c.delta_A;
    out.H_upup = hs;

    Eigen::VectorXd decay5(5);
    decay5 << 0.0, gamma, kappa, gamma, 0.0;
    out.Heff_updown = with_decay(out.H_updown, decay5);
    out.Heff_upup = with_decay(out.H_upup, Eigen::Vector3d(0.0, gamma, kappa));
    return out;
}

/// Raman interaction time for a pi phase (shelving pulses excluded).
inline double gate_time_raman(const RamanConfig& c) {
    const double gA = c.coupling_A(), gB = c.coupling_B();
    const double oA = c.Omega_A, oB = c.drive_B();
    require(oA > 0.0 && oB > 0.0 && gA > 0.0 && gB > 0.0, "drives and couplings must be positive for a finite gate time");
    return pi * (gA * gA * c.Delta_A + gB * gB * c.Delta_B + c.delta() * c.Delta_A * c.Delta_B) /
           (gA * gB * oA * oB);
}

/// Leading-order form pi delta Delta_A Delta_B / (g_A g_B Omega_A Omega_B).
inline double gate_time_raman_approx(const RamanConfig& c) {
    return pi * c.delta() * c.Delta_A * c.Delta_B /
           (c.coupling_A() * c.coupling_B() * c.Omega_A * c.drive_B());
}

/// Optimal gate time (Delta/Omega)^2 * 2 pi / (gamma sqrt(C)).
inline double optimal_gate_time_raman(const CavitySystem& cavity, double Omega_over_Delta) {
    require(Omega_over_Delta > 0.0, "Omega/Delta must be positive");
    return optimal_gate_time_exchange(cavity) / (Omega_over_Delta * Omega_over_Delta);
}

inline BranchAmplitudes raman_amplitudes(const RamanConfig& c, double T) {
    const auto h = build_raman_hamiltonians(c);
    StateVector s0 = StateVector::Zero(3);
    s0(0) = 1.0;
    StateVector u0 = StateVector::Zero(5);
    u0(0) = 1.0;
    return {propagate(h.Heff_upup, s0, T)(0), propagate(h.Heff_updown, u0, T)(0)};
}

/// Non-Hermitian propagation; F = (F_pi + 1)/2 - Gamma T with
/// F_pi = |<up s 0|U|up s 0> - <up down 0|U|up down 0>| / 2.
inline GateResult fidelity_numeric_raman(const RamanConfig& c, double T) {
    require(std::isfinite(T) && T > 0.0, "gate time must be positive");
    const auto amps = raman_amplitudes(c, T);
    GateResult r;
    r.method = Method::NonHermitian;
    r.gate_time = T;
    r.warnings = c.warnings();
    r.fidelity = clamp_fidelity(0.5 * (amps.f_pi() + 1.0) - c.Gamma * T, r.warnings);
    return r;
}

inline GateResult fidelity_numeric_raman(const RamanConfig& c) { return fidelity_numeric_raman(c, gate_time_raman(c)); }

/// Ridge relative-phase fidelity: exp(-2 pi y/C - pi/(2y)) cosh^2(pi/(4y)), y = delta/kappa.
inline double raman_f_pi(double delta_over_kappa, double coop) {
    require(delta_over_kappa > 0.0 && coop > 0.0, "arguments must be positive");
    const double y = delta_over_kappa;
    return std::exp(-2.0 * pi * y / coop - pi / (2.0 * y)) * std::pow(std::cosh(pi / (4.0 * y)), 2);
}

/// Product of the adiabaticity factors
/// cos^2(pi Omega / 4 Delta) cos^2(pi Omega^2 / 2 delta Delta) sin((pi/2) / (1 + g^2/(delta Delta))).
inline double raman_adiabatic_factor(double Omega, double Delta, double delta, double g2) {
    const double a = std::cos(pi * Omega / (4.0 * Delta));
    const double b = std::cos(pi * Omega * Omega / (2.0 * delta * Delta));
    return a * a * b * b * std::sin((pi / 2.0) / (1.0 + g2 / (delta * Delta)));
}

/// Closed-form fidelity including the adiabatic bounds, minus Gamma T.
inline GateResult fidelity_analytic_raman(const RamanConfig& c) {
    c.validate();
    const double kappa = c.cavity.kappa();
    const double g2 = c.coupling_A() * c.coupling_B();
    const double coop = 4.0 * g2 / (kappa * c.cavity.gamma());
    const double f_pi = raman_f_pi(c.delta() / kappa, coop);
    const double factor = raman_adiabatic_factor(c.Omega_A, c.Delta(), c.delta(), g2);

    GateResult r;
    r.method = Method::Analytic;
    r.gate_time = gate_time_raman(c);
    r.warnings = c.warnings();
    r.fidelity = clamp_fidelity(0.5 * (factor * f_pi + 1.0) - c.Gamma * r.gate_time, r.warnings);
    return r;
}

/// Maximum fidelity on the ridge 2 delta = kappa sqrt(C), expanded for C >> 1.
/// Uses Omega_A/Delta for the gate time; ignores delta itself.
inline GateResult max_fidelity_raman(const RamanConfig& c) {
    c.validate();
    const double coop = c.cavity.cooperativity();
    const double ratio = c.Omega_A / c.Delta();
    const double t_o = optimal_gate_time_raman(c.cavity, ratio);
    const double two_photon_term = std::pow(t_o * c.delta_eps() / (2.0 * pi), 2);
    const double separation_term = std::pow(c.Delta_eps() / c.Delta(), 2);
    const double f = 1.0 - pi / std::sqrt(coop) -
                     (pi * pi / 16.0) * (two_photon_term + separation_term - 18.0 / coop) - c.Gamma * t_o;
    GateResult r;
    r.method = Method::Analytic;
    r.gate_time = t_o;
    r.warnings = c.warnings();
    if (coop < 100.0) r.warnings.push_back("cooperativity not >> 1");
    r.fidelity = clamp_fidelity(f, r.warnings);
    return r;
}

/// Largest optical splitting Delta_eps that keeps the fidelity within the
/// cooperativity-limited budget, with the matching drive ratio, mean
/// detuning and gate time.
struct SpectralSeparation {
    double Delta_eps;
    double Omega_over_Delta;
    double Delta;
    double gate_time;
};

inline SpectralSeparation max_spectral_separation(double kappa, double gamma, double Gamma, double coop) {
    require(kappa > 0.0 && gamma > 0.0 && coop > 0.0, "kappa, gamma and C must be positive");
    if (!(Gamma > 0.0)) throw Error(ErrorKind::ZeroDecoherence, "spectral separation is unbounded for Gamma = 0");
    SpectralSeparation s{};
    s.Delta_eps = kappa * gamma / (pi * Gamma * std::sqrt(8.0));
    s.Omega_over_Delta = 2.0 * std::sqrt(Gamma / gamma);
    s.Delta = 0.5 * s.Delta_eps * std::sqrt(pi * std::sqrt(coop));
    s.gate_time = pi / (2.0 * Gamma * std::sqrt(coop));
    return s;
}

/// Ridge location 2 delta = kappa sqrt(C).
inline double optimal_two_photon_detuning(const CavitySystem& cavity) {
    return 0.5 * cavity.kappa() * std::sqrt(cavity.cooperativity());
}

} // namespace cgate
