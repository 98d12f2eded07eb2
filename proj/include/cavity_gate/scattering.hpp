#pragma once

// Photon-scattering controlled phase-flip gate.
//
// A single photon reflects off a one-sided cavity holding both emitters. The
// |down,down> branch sees an empty cavity and picks up a pi phase; any
// coupled emitter spoils impedance matching and the photon bounces off the
// input mirror unchanged. Heralding on the reflected photon conditions the
// gate on detection.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cavity_gate/dense.hpp"
#include "cavity_gate/error.hpp"
#include "cavity_gate/qed_params.hpp"
#include "cavity_gate/quadrature.hpp"

namespace cgate {

/// Gaussian single photon: spectral std sigma_p and mean cavity detuning delta_p.
class PhotonPulse {
public:
    PhotonPulse(double sigma_p, double delta_p) : sigma_p_(sigma_p), delta_p_(delta_p) {
        require(std::isfinite(sigma_p) && sigma_p > 0.0, "photon bandwidth sigma_p must be positive");
        require(std::isfinite(delta_p), "photon detuning must be finite");
    }

    /// Pulse whose gate time (twice the FWHM duration) equals `gate_time`.
    static PhotonPulse from_gate_time(double gate_time, double delta_p) {
        require(gate_time > 0.0 && std::isfinite(gate_time), "gate time must be positive");
        return {time_bandwidth() / gate_time, delta_p};
    }

    double sigma_p() const { return sigma_p_; }
    double delta_p() const { return delta_p_; }
    double gate_time() const { return time_bandwidth() / sigma_p_; }

    /// T * sigma_p = 8 pi sqrt(2 ln 2).
    static double time_bandwidth() { return 8.0 * pi * std::sqrt(2.0 * std::log(2.0)); }

private:
    double sigma_p_;
    double delta_p_;
};

struct ScatteringConfig {
    CavitySystem cavity;
    PhotonPulse pulse;
    double delta_eps_A = 0.0;
    double delta_eps_B = 0.0;
    double Gamma = 0.0;

    void validate() const {
        require(std::isfinite(delta_eps_A) && std::isfinite(delta_eps_B), "emitter detunings must be finite");
        require(std::isfinite(Gamma) && Gamma >= 0.0, "Gamma must be finite and non-negative");
    }
};

/// Marks an uncoupled (far-detuned) transition in reflection_ratio.
inline constexpr double far_detuned = std::numeric_limits<double>::infinity();

/// a_out/a_in for a plane wave at detuning omega from the cavity, with both
/// emitters coupled at rate g and detuned by Delta_A, Delta_B. An infinite
/// detuning drops that emitter's term (the closed-form far-detuned limit).
inline cplx reflection_ratio(const CavitySystem& cavity, double delta_A, double delta_B, double omega) {
    const double g2 = cavity.g() * cavity.g();
    const double half_gamma = 0.5 * cavity.gamma();
    cplx den(0.5 * cavity.kappa(), -omega);
    for (double d : {delta_A, delta_B}) {
        if (std::isinf(d)) continue;
        den += g2 / cplx(half_gamma, d - omega);
    }
    if (std::abs(den) < 1e-300)
        throw Error(ErrorKind::DivergentDenominator, "reflection denominator vanishes");
    return 1.0 - cavity.kappa() / den;
}

/// Reflection amplitudes in the order (up-up, up-down, down-up, down-down).
using SpinAmplitudes = std::array<cplx, 4>;

inline SpinAmplitudes spin_amplitudes(const ScatteringConfig& config, double omega) {
    const auto& c = config.cavity;
    return {
        reflection_ratio(c, config.delta_eps_A, config.delta_eps_B, omega),
        reflection_ratio(c, config.delta_eps_A, far_detuned, omega),
        reflection_ratio(c, far_detuned, config.delta_eps_B, omega),
        reflection_ratio(c, far_detuned, far_detuned, omega),
    };
}

using DensityMatrix4 = Eigen::Matrix4cd;

/// Target state (1/2)(|uu> + |ud> + |du> - |dd>).
inline Eigen::Vector4cd ideal_scattering_state() { return Eigen::Vector4cd(0.5, 0.5, 0.5, -0.5); }

namespace detail {

inline DensityMatrix4 scattering_rho(const ScatteringConfig& config, const GaussHermiteRule& rule) {
    const double sigma = config.pulse.sigma_p();
    const double mean = config.pulse.delta_p();
    DensityMatrix4 rho = DensityMatrix4::Zero();
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        if (rule.weights[i] == 0.0) continue;
        const auto s = spin_amplitudes(config, mean + sigma * rule.nodes[i]);
        const Eigen::Vector4cd v(s[0], s[1], s[2], s[3]);
        rho.noalias() += (0.25 * rule.weights[i]) * (v * v.adjoint());
    }
    return rho;
}

inline DensityMatrix4 scattering_rho(const ScatteringConfig& config, int nodes) {
    return scattering_rho(config, gauss_hermite(nodes));
}

/// Poles of the reflection amplitudes as (centre, half width): eigenvalues of
/// the cavity plus coupled emitters with their decay, for each spin branch.
inline std::vector<std::pair<double, double>> reflection_resonances(const ScatteringConfig& config) {
    const auto& c = config.cavity;
    std::vector<std::pair<double, double>> out;
    const double far = far_detuned;
    for (auto [da, db] : {std::pair{config.delta_eps_A, config.delta_eps_B}, std::pair{config.delta_eps_A, far},
                          std::pair{far, config.delta_eps_B}, std::pair{far, far}}) {
        std::vector<double> det;
        for (double d : {da, db})
            if (!std::isinf(d)) det.push_back(d);
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(det.size());
        ComplexMatrix h = ComplexMatrix::Zero(n, n);
        h(0, 0) = cplx(0.0, -0.5 * c.kappa());
        for (Eigen::Index k = 1; k < n; ++k) {
            h(0, k) = h(k, 0) = c.g();
            h(k, k) = cplx(det[k - 1], -0.5 * c.gamma());
        }
        Eigen::ComplexEigenSolver<ComplexMatrix> es(h, false);
        for (Eigen::Index k = 0; k < n; ++k) out.emplace_back(es.eigenvalues()(k).real(), -es.eigenvalues()(k).imag());
    }
    return out;
}

/// Adaptive Gauss-Legendre integration over the standardized frequency
/// u = (omega - delta_p)/sigma_p on [-10, 10], with breakpoints at the
/// reflection resonances. Panels are bisected until a 16-point rule and
/// its two halves agree to `tol` scaled by the panel's share of the range.
inline DensityMatrix4 scattering_rho_adaptive(const ScatteringConfig& config, double tol, std::size_t max_evals) {
    static const GaussHermiteRule gl = make_gauss_legendre(16);
    const double sigma = config.pulse.sigma_p();
    const double mean = config.pulse.delta_p();
    constexpr double half_width = 10.0;
    const double norm = 1.0 / std::sqrt(2.0 * pi);
    std::size_t evals = 0;

    auto panel = [&](double a, double b) {
        DensityMatrix4 rho = DensityMatrix4::Zero();
        const double h = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double u = mid + h * gl.nodes[i];
            const auto s = spin_amplitudes(config, mean + sigma * u);
            const Eigen::Vector4cd v(s[0], s[1], s[2], s[3]);
            rho.noalias() += (0.25 * h * gl.weights[i] * norm * std::exp(-0.5 * u * u)) * (v * v.adjoint());
        }
        evals += gl.nodes.size();
        return rho;
    };

    std::vector<double> cuts = {-half_width, 0.0, half_width};
    for (auto [centre, width] : reflection_resonances(config))
        for (double k : {-16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0}) {
            const double u = (centre + k * width - mean) / sigma;
            if (std::abs(u) < half_width) cuts.push_back(u);
        }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(), [](double x, double y) { return y - x < 1e-14; }), cuts.end());

    struct Segment {
        double a, b;
        DensityMatrix4 whole;
        int depth;
    };
    std::vector<Segment> stack;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) stack.push_back({cuts[i], cuts[i + 1], panel(cuts[i], cuts[i + 1]), 0});
    DensityMatrix4 total = DensityMatrix4::Zero();
    while (!stack.empty()) {
        Segment seg = std::move(stack.back());
        stack.pop_back();
        const double m = 0.5 * (seg.a + seg.b);
        DensityMatrix4 left = panel(seg.a, m), right = panel(m, seg.b);
        const double err = (left + right - seg.whole).cwiseAbs().maxCoeff();
        if (err <= tol * (seg.b - seg.a) / (2.0 * half_width) || seg.depth >= 50) {
            total += left + right;
            continue;
        }
        if (evals > max_evals)
            throw Error(ErrorKind::QuadratureNotConverged,
                        "spectral integral did not converge within " + std::to_string(max_evals) + " evaluations");
        stack.push_back({seg.a, m, std::move(left), seg.depth + 1});
        stack.push_back({m, seg.b, std::move(right), seg.depth + 1});
    }
    return total;
}

} // namespace detail

/// Spin state after reflection with the photon traced out.
///
/// Gauss-Hermite quadrature over the Gaussian spectrum, doubled from
/// `quadrature_nodes` up to 512 nodes until two successive rules agree to
/// 1e-10 in every entry. Spectra containing resonances much narrower than
/// the pulse (strong coupling, kappa << sigma_p) defeat the Hermite rule;
/// those fall back to adaptive Gauss-Legendre panels anchored at the
/// resonances, limited to `max_evals` amplitude evaluations. The trace is
/// below one by the photon-loss weight.
inline DensityMatrix4 reduced_density_matrix(const ScatteringConfig& config, int quadrature_nodes = 128,
                                             std::size_t max_evals = 1u << 22) {
    config.validate();
    require(quadrature_nodes >= 32, "at least 32 quadrature nodes are required");
    constexpr double tol = 1e-10;
    DensityMatrix4 coarse = detail::scattering_rho(config, quadrature_nodes);
    for (int n = 2 * quadrature_nodes; n <= std::max(512, 2 * quadrature_nodes); n *= 2) {
        DensityMatrix4 fine = detail::scattering_rho(config, n);
        if ((fine - coarse).cwiseAbs().maxCoeff() <= tol) return fine;
        coarse = std::move(fine);
    }
    return detail::scattering_rho_adaptive(config, tol, max_evals);
}

/// Multiplies all off-diagonal elements by exp(-(8/3) Gamma T), which gives
/// F ~= 1 - Gamma T to first order for the canonical input state.
inline DensityMatrix4 apply_spin_decoherence(const DensityMatrix4& rho, double Gamma, double gate_time) {
    const double x = std::exp(-(8.0 / 3.0) * Gamma * gate_time);
    DensityMatrix4 out = rho * x;
    out.diagonal() = rho.diagonal();
    return out;
}

/// Fidelity from the full reflection amplitudes without small-bandwidth expansion.
inline GateResult fidelity_numeric(const ScatteringConfig& config) {
    const double t = config.pulse.gate_time();
    const DensityMatrix4 rho = reduced_density_matrix(config);
    const DensityMatrix4 rho_d = apply_spin_decoherence(rho, config.Gamma, t);
    const Eigen::Vector4cd psi = ideal_scattering_state();
    const double overlap = std::max(0.0, (psi.adjoint() * rho_d * psi)(0, 0).real());

    GateResult r;
    r.method = Method::NumericAmplitude;
    r.gate_time = t;
    r.fidelity = clamp_fidelity(std::sqrt(overlap), r.warnings);
    r.success_probability = std::clamp(rho.trace().real(), 0.0, 1.0);
    return r;
}

/// Closed-form fidelity valid for C >> 1, small delta_p/(gamma C),
/// sigma_p/(gamma C) and delta_eps/gamma.
inline GateResult fidelity_analytic(const ScatteringConfig& config) {
    config.validate();
    const auto& c = config.cavity;
    const double coop = c.cooperativity();
    const double gamma = c.gamma();
    const double sp = config.pulse.sigma_p();
    const double dp = config.pulse.delta_p();
    const double r2 = std::pow(2.0 * c.g_over_kappa(), 2);
    const double t = config.pulse.gate_time();

    const double spectral = (dp * dp + sp * sp) / (8.0 * gamma * gamma * coop * coop) *
                            (11.0 - 20.0 * r2 + 12.0 * r2 * r2);
    const double mismatch = std::pow(config.delta_eps_A - config.delta_eps_B, 2) / (4.0 * gamma * gamma * coop);
    const double f = 1.0 - 5.0 / (4.0 * coop) - spectral - mismatch - config.Gamma * t;

    GateResult r;
    r.method = Method::Analytic;
    r.gate_time = t;
    r.success_probability = 1.0;
    if (coop < 10.0) r.warnings.push_back("cooperativity not >> 1");
    if (std::abs(dp) / (gamma * coop) > 0.1 || sp / (gamma * coop) > 0.1)
        r.warnings.push_back("photon detuning or bandwidth not small against gamma*C");
    if (std::abs(config.delta_eps_A) > gamma || std::abs(config.delta_eps_B) > gamma)
        r.warnings.push_back("emitter detuning not small against gamma");
    if (spectral > 0.1) r.warnings.push_back("spectral term large; expansion unreliable");
    r.fidelity = clamp_fidelity(f, r.warnings);
    return r;
}

/// Bad-cavity optimum of the gate time: T_o^3 = 352 pi^2 ln2 / (gamma^2 C^2 Gamma).
inline double optimal_gate_time(double coop, double gamma, double Gamma) {
    require(coop > 0.0 && gamma > 0.0, "cooperativity and gamma must be positive");
    if (!(Gamma > 0.0)) throw Error(ErrorKind::ZeroDecoherence, "optimal gate time diverges for Gamma = 0");
    return std::cbrt(352.0 * pi * pi * std::log(2.0) / (gamma * gamma * coop * coop * Gamma));
}

/// Plane-wave, resonant limit: 1 - 1/(C+1) - 1/(4C+2).
inline double scattering_cooperativity_limit(double coop) {
    require(coop > 0.0, "cooperativity must be positive");
    return 1.0 - 1.0 / (coop + 1.0) - 1.0 / (4.0 * coop + 2.0);
}

} // namespace cgate
