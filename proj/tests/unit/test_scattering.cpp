#include <random>

#include <gtest/gtest.h>

#include "cavity_gate/scattering.hpp"

using namespace cgate;

namespace {

// Composite 16-point Gauss-Legendre rule for N(0, 1) over [-10, 10].
GaussHermiteRule uniform_normal_rule(int panels) {
    const GaussHermiteRule base = make_gauss_legendre(16);
    GaussHermiteRule rule;
    const double h = 20.0 / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = -10.0 + (p + 0.5) * h;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            const double x = mid + 0.5 * h * base.nodes[i];
            rule.nodes.push_back(x);
            rule.weights.push_back(0.5 * h * base.weights[i] * std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi));
        }
    }
    return rule;
}

ScatteringConfig config(double C, double gk, double T, double dp, double Gamma = 0.0) {
    return {CavitySystem::from_cooperativity(C, gk, 1.0), PhotonPulse::from_gate_time(T, dp), 0.0, 0.0, Gamma};
}

} // namespace

TEST(Reflection, EmptyCavityOnResonanceFlipsSign) {
    const CavitySystem c(1.0, 3.0, 1.0);
    EXPECT_NEAR(std::abs(reflection_ratio(c, far_detuned, far_detuned, 0.0) - cplx(-1.0)), 0.0, 1e-15);
}

TEST(Reflection, OneEmitterOnResonance) {
    // kappa/2 + g^2/(gamma/2) = (kappa/2)(1 + C): r = 1 - 2/(1 + C).
    for (double C : {1.0, 10.0, 1e4}) {
        const auto c = CavitySystem::from_cooperativity(C, 0.3, 1.0);
        EXPECT_NEAR(std::abs(reflection_ratio(c, 0.0, far_detuned, 0.0) - cplx(1.0 - 2.0 / (1.0 + C))), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(reflection_ratio(c, 0.0, 0.0, 0.0) - cplx(1.0 - 2.0 / (1.0 + 2.0 * C))), 0.0, 1e-12);
    }
}

TEST(Reflection, EmptyCavityIsAllPass) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    const CavitySystem c(2.0, 5.0, 1.0);
    for (int i = 0; i < 200; ++i)
        EXPECT_NEAR(std::abs(reflection_ratio(c, far_detuned, far_detuned, u(rng))), 1.0, 1e-13);
}

TEST(Reflection, PassiveEverywhere) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const CavitySystem c(std::pow(10.0, 2 * u(rng)), std::pow(10.0, 2 * u(rng)), 1.0);
        const double w = 30.0 * u(rng);
        EXPECT_LE(std::abs(reflection_ratio(c, 3.0 * u(rng), 3.0 * u(rng), w)), 1.0 + 1e-12);
    }
}

TEST(Reflection, MirrorSymmetry) {
    // r(-omega; -Delta_A, -Delta_B) = conj r(omega; Delta_A, Delta_B).
    const CavitySystem c(1.5, 2.0, 1.0);
    for (double w : {0.0, 0.3, 7.0}) {
        const cplx a = reflection_ratio(c, 0.4, -1.1, w);
        const cplx b = reflection_ratio(c, -0.4, 1.1, -w);
        EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-14);
    }
}

TEST(Reflection, EmitterExchangeSymmetry) {
    const CavitySystem c(1.5, 2.0, 1.0);
    EXPECT_NEAR(std::abs(reflection_ratio(c, 0.4, -1.1, 0.7) - reflection_ratio(c, -1.1, 0.4, 0.7)), 0.0, 1e-15);
}

TEST(Pulse, TimeBandwidthProduct) {
    const auto p = PhotonPulse::from_gate_time(3.0, 0.0);
    EXPECT_NEAR(p.sigma_p() * 3.0, 8.0 * pi * std::sqrt(2.0 * std::log(2.0)), 1e-12);
    EXPECT_DOUBLE_EQ(p.gate_time(), 3.0);
    EXPECT_THROW(PhotonPulse(0.0, 0.0), Error);
    EXPECT_THROW(PhotonPulse::from_gate_time(-1.0, 0.0), Error);
}

TEST(DensityMatrix, HermitianPsdTraceBelowOne) {
    for (double gk : {0.01, 0.5}) {
        for (double dp : {0.0, 40.0}) {
            const auto rho = reduced_density_matrix(config(4000.0, gk, 2.0, dp));
            EXPECT_LE((rho - rho.adjoint()).cwiseAbs().maxCoeff(), 1e-14);
            EXPECT_LE(rho.trace().real(), 1.0 + 1e-12);
            EXPECT_GT(rho.trace().real(), 0.9);
            Eigen::SelfAdjointEigenSolver<DensityMatrix4> es(rho);
            EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
        }
    }
}

TEST(DensityMatrix, NarrowBandLimitMatchesPlaneWave) {
    // sigma_p -> 0: rho -> (1/4) s s^dagger at omega = delta_p.
    const auto c = config(100.0, 0.2, 1e6, 0.0);
    const auto s = spin_amplitudes(c, 0.0);
    const Eigen::Vector4cd v(s[0], s[1], s[2], s[3]);
    EXPECT_LE((reduced_density_matrix(c) - 0.25 * v * v.adjoint()).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DensityMatrix, StrongCouplingResolvesNarrowResonances) {
    // Brute-force reference: uniform 16-point panels fine enough to resolve
    // features of width ~min(kappa, gamma) across +-10 sigma_p.
    for (double T : {2.0, 0.05}) {
        const auto c = config(4000.0, 10.0, T, 30.0);
        const auto rho = reduced_density_matrix(c);
        const int panels = static_cast<int>(20.0 * c.pulse.sigma_p() / (0.05 * c.cavity.gamma())) + 1;
        EXPECT_LE((rho - detail::scattering_rho(c, uniform_normal_rule(panels))).cwiseAbs().maxCoeff(), 1e-8) << T;
    }
}

TEST(DensityMatrix, EvaluationBudgetIsEnforced) {
    try {
        reduced_density_matrix(config(4000.0, 10.0, 0.05, 30.0), 128, 1000);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::QuadratureNotConverged);
    }
}

TEST(DensityMatrix, ResonancesOfEmptyCavity) {
    const auto c = config(100.0, 0.2, 1.0, 0.0);
    const auto res = detail::reflection_resonances(c);
    ASSERT_EQ(res.size(), 3u + 2u + 2u + 1u);
    EXPECT_NEAR(res.back().first, 0.0, 1e-12);
    EXPECT_NEAR(res.back().second, 0.5 * c.cavity.kappa(), 1e-12);
}

TEST(Decoherence, ScalesOffDiagonalOnly) {
    DensityMatrix4 rho = DensityMatrix4::Constant(cplx(0.25));
    const auto out = apply_spin_decoherence(rho, 0.3, 2.0);
    EXPECT_DOUBLE_EQ(out(1, 1).real(), 0.25);
    EXPECT_NEAR(out(0, 3).real(), 0.25 * std::exp(-1.6), 1e-15);
}

TEST(Decoherence, FirstOrderIsGammaT) {
    // Ideal state: F^2 = 1/4 + (3/4) x, x = exp(-(8/3) Gamma T) -> F ~ 1 - Gamma T.
    const Eigen::Vector4cd psi = ideal_scattering_state();
    const DensityMatrix4 rho = psi * psi.adjoint();
    const double gt = 1e-4;
    const double f = std::sqrt((psi.adjoint() * apply_spin_decoherence(rho, gt, 1.0) * psi)(0, 0).real());
    EXPECT_NEAR(f, 1.0 - gt, 1e-7);
}

TEST(Fidelity, PlaneWaveCooperativityLimit) {
    // F = 1 - 1/(C+1) - 1/(4C+2) at sigma_p -> 0, delta_p = 0, g << kappa.
    for (double C : {10.0, 100.0, 1000.0}) {
        const auto r = fidelity_numeric(config(C, 1e-3, 1e7, 0.0));
        EXPECT_NEAR(r.fidelity, scattering_cooperativity_limit(C), 1e-6) << C;
    }
}

TEST(Fidelity, CooperativityLimitAsymptote) {
    for (double C : {1e2, 1e3, 1e4})
        EXPECT_NEAR(scattering_cooperativity_limit(C), 1.0 - 5.0 / (4.0 * C), 2.0 / (C * C));
    EXPECT_THROW(scattering_cooperativity_limit(0.0), Error);
}

TEST(Fidelity, EvenInPhotonDetuning) {
    for (double dp : {5.0, 30.0, 80.0}) {
        const double a = fidelity_numeric(config(4000.0, 0.5, 2.0, dp)).fidelity;
        const double b = fidelity_numeric(config(4000.0, 0.5, 2.0, -dp)).fidelity;
        EXPECT_NEAR(a, b, 1e-10);
        EXPECT_DOUBLE_EQ(fidelity_analytic(config(4000.0, 0.5, 2.0, dp)).fidelity,
                         fidelity_analytic(config(4000.0, 0.5, 2.0, -dp)).fidelity);
    }
}

TEST(Fidelity, AnalyticMatchesNumericInBadCavity) {
    for (double gk : {0.01, 0.5})
        for (double dp : {0.0, 50.0, 100.0}) {
            const auto c = config(4000.0, gk, 2.0, dp, 1e-5);
            EXPECT_NEAR(fidelity_analytic(c).fidelity, fidelity_numeric(c).fidelity, 0.01);
        }
}

TEST(Fidelity, AnalyticExpansionBreaksDownInStrongCoupling) {
    // sigma_p/kappa ~ 1.5 at g/kappa = 10: the spectral term is O(1).
    const auto c = config(4000.0, 10.0, 2.0, 30.0, 1e-5);
    const auto a = fidelity_analytic(c);
    EXPECT_FALSE(a.warnings.empty());
    EXPECT_GT(std::abs(a.fidelity - fidelity_numeric(c).fidelity), 0.1);
}

TEST(Fidelity, MismatchTerm) {
    auto c = config(1000.0, 0.1, 1e3, 0.0);
    const double f0 = fidelity_analytic(c).fidelity;
    c.delta_eps_A = 0.5;
    c.delta_eps_B = -0.5;
    EXPECT_NEAR(f0 - fidelity_analytic(c).fidelity, 1.0 / (4.0 * 1000.0), 1e-15);
}

TEST(Fidelity, YbCaseStudy) {
    const double gamma = 2.0 * pi * 596.0;
    const auto cav = CavitySystem::from_cooperativity(5e4, 0.1, gamma);
    ScatteringConfig c{cav, PhotonPulse::from_gate_time(1.0 / gamma, 30.0 * gamma), 0.0, 0.0,
                       1.0 / (2.0 * 6.6e-3)};
    const auto r = fidelity_analytic(c);
    EXPECT_NEAR(r.fidelity, 0.98, 0.003);
    EXPECT_NEAR(r.gate_time, 267e-6, 2.67e-6);
}

TEST(OptimalTime, ValueAndScaling) {
    EXPECT_NEAR(optimal_gate_time(4000.0, 1.0, 1e-5), 2.469, 0.001);
    // T_o ~ C^(-2/3) Gamma^(-1/3).
    EXPECT_NEAR(optimal_gate_time(8000.0, 1.0, 1e-5) / optimal_gate_time(1000.0, 1.0, 1e-5), 1.0 / 4.0, 1e-12);
    EXPECT_NEAR(optimal_gate_time(4000.0, 1.0, 8e-5) / optimal_gate_time(4000.0, 1.0, 1e-5), 0.5, 1e-12);
    try {
        optimal_gate_time(4000.0, 1.0, 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroDecoherence);
    }
}

TEST(OptimalTime, StationaryPointOfAnalyticForm) {
    const double t_o = optimal_gate_time(4000.0, 1.0, 1e-5);
    auto f = [](double t) { return fidelity_analytic(config(4000.0, 0.01, t, 0.0, 1e-5)).fidelity; };
    EXPECT_GT(f(t_o), f(0.9 * t_o));
    EXPECT_GT(f(t_o), f(1.1 * t_o));
}

TEST(Fidelity, SingleInteriorMaximumInGateTime) {
    std::vector<double> fs;
    for (int i = 0; i <= 60; ++i) {
        const double t = 0.05 * std::pow(1000.0, i / 60.0);
        fs.push_back(fidelity_numeric(config(4000.0, 0.01, t, 30.0, 1e-5)).fidelity);
    }
    int sign_changes = 0;
    for (std::size_t i = 2; i < fs.size(); ++i)
        if ((fs[i] - fs[i - 1] > 0) != (fs[i - 1] - fs[i - 2] > 0)) ++sign_changes;
    EXPECT_EQ(sign_changes, 1);
}

TEST(Fidelity, SpectralWanderingCostsFidelity) {
    auto c = config(4000.0, 0.1, 2.0, 0.0);
    const double f0 = fidelity_numeric(c).fidelity;
    c.delta_eps_A = 1.0;
    c.delta_eps_B = -1.0;
    EXPECT_LT(fidelity_numeric(c).fidelity, f0);
}
