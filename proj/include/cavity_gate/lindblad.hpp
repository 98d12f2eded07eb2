#pragma once

// Full master-equation propagation on the small gate subspaces, including
// the recycling (jump) terms that the non-Hermitian treatment drops. Used as
// a brute-force check of the no-jump approximation and to split the final
// state into its success and failure branches.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cavity_gate/dense.hpp"
#include "cavity_gate/error.hpp"
#include "cavity_gate/qed_params.hpp"
#include "cavity_gate/raman.hpp"
#include "cavity_gate/simple_exchange.hpp"

namespace cgate {

/// Dissipator rate * D(op).
struct Jump {
    ComplexMatrix op;
    double rate = 0.0;
};

struct OpenSystem {
    ComplexMatrix hamiltonian;
    std::vector<Jump> jumps;

    Eigen::Index dim() const { return hamiltonian.rows(); }

    void validate() const {
        require(hamiltonian.rows() == hamiltonian.cols() && hamiltonian.rows() >= 1, "Hamiltonian must be square");
        const double scale = std::max(1.0, hamiltonian.cwiseAbs().maxCoeff());
        require((hamiltonian - hamiltonian.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                "Hamiltonian must be Hermitian");
        for (const auto& j : jumps) {
            require(j.op.rows() == dim() && j.op.cols() == dim(), "jump operator dimension mismatch");
            require(std::isfinite(j.rate) && j.rate >= 0.0, "jump rates must be non-negative");
        }
    }
};

/// H - (i/2) sum_k rate_k L_k^dag L_k.
inline ComplexMatrix effective_hamiltonian(const OpenSystem& sys) {
    ComplexMatrix h = sys.hamiltonian;
    for (const auto& j : sys.jumps) h -= cplx(0.0, 0.5 * j.rate) * (j.op.adjoint() * j.op);
    return h;
}

/// Liouvillian acting on row-major vec(rho): vec(A rho B) = (A kron B^T) vec(rho).
inline ComplexMatrix liouvillian(const OpenSystem& sys) {
    const Eigen::Index n = sys.dim();
    const ComplexMatrix heff = effective_hamiltonian(sys);
    ComplexMatrix l = ComplexMatrix::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index k = 0; k < n; ++k) {
                // -i H rho : rho(k, j) -> out(i, j)
                l(i * n + j, k * n + j) += -I * heff(i, k);
                // +i rho H^dag : rho(i, k) -> out(i, j), with (H^dag)(k, j) = conj(H(j, k))
                l(i * n + j, i * n + k) += I * std::conj(heff(j, k));
            }
    for (const auto& jump : sys.jumps) {
        if (jump.rate == 0.0) continue;
        const ComplexMatrix& a = jump.op;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < n; ++k) {
                if (a(i, k) == 0.0) continue;
                for (Eigen::Index j = 0; j < n; ++j)
                    for (Eigen::Index m = 0; m < n; ++m) {
                        if (a(j, m) == 0.0) continue;
                        l(i * n + j, k * n + m) += jump.rate * a(i, k) * std::conj(a(j, m));
                    }
            }
    }
    return l;
}

inline ComplexMatrix lindblad_rhs(const OpenSystem& sys, const ComplexMatrix& heff, const ComplexMatrix& rho) {
    ComplexMatrix d = -I * (heff * rho - rho * heff.adjoint());
    for (const auto& j : sys.jumps) d += j.rate * (j.op * rho * j.op.adjoint());
    return d;
}

/// Plain fixed-step RK4 loop. Reference path for lindblad_propagate.
inline ComplexMatrix lindblad_rk4_steps(const OpenSystem& sys, const ComplexMatrix& rho0, double t, std::int64_t steps) {
    sys.validate();
    require(steps >= 1, "need at least one step");
    const ComplexMatrix heff = effective_hamiltonian(sys);
    const double h = t / static_cast<double>(steps);
    ComplexMatrix rho = rho0;
    for (std::int64_t s = 0; s < steps; ++s) {
        const ComplexMatrix k1 = lindblad_rhs(sys, heff, rho);
        const ComplexMatrix k2 = lindblad_rhs(sys, heff, rho + 0.5 * h * k1);
        const ComplexMatrix k3 = lindblad_rhs(sys, heff, rho + 0.5 * h * k2);
        const ComplexMatrix k4 = lindblad_rhs(sys, heff, rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

namespace detail {

// Maps are stored as I + E so that repeated squaring keeps precision in the
// small deviation E.
inline ComplexMatrix compose_deviation(const ComplexMatrix& e1, const ComplexMatrix& e2) {
    return e1 + e2 + e1 * e2;
}

/// Deviation E of the one-step RK4 map I + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
inline ComplexMatrix rk4_step_deviation(const ComplexMatrix& l, double h) {
    const ComplexMatrix a = h * l;
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a3 = a2 * a;
    return a + a2 / 2.0 + a3 / 6.0 + (a3 * a) / 24.0;
}

/// Deviation of the N-step map, by binary powering.
inline ComplexMatrix rk4_power_deviation(const ComplexMatrix& step, std::uint64_t n) {
    ComplexMatrix result = ComplexMatrix::Zero(step.rows(), step.cols());
    ComplexMatrix base = step;
    bool first = true;
    while (n > 0) {
        if (n & 1U) {
            result = first ? base : compose_deviation(result, base);
            first = false;
        }
        n >>= 1U;
        if (n > 0) base = compose_deviation(base, base);
    }
    return result;
}

inline ComplexMatrix apply_map(const ComplexMatrix& deviation, const ComplexMatrix& rho) {
    const Eigen::Index n = rho.rows();
    Eigen::VectorXcd v(n * n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) v(i * n + j) = rho(i, j);
    const Eigen::VectorXcd w = v + deviation * v;
    ComplexMatrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = w(i * n + j);
    return out;
}

inline void check_density(const ComplexMatrix& rho, Eigen::Index n) {
    require(rho.rows() == n && rho.cols() == n, "density matrix dimension mismatch");
    require((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-10, "rho0 must be Hermitian");
    require(std::abs(rho.trace() - cplx(1.0)) <= 1e-10, "rho0 must have unit trace");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() >= -1e-10, "rho0 must be positive semidefinite");
}

} // namespace detail

/// Step count rule: max(1e4, 20 T ||H_eff||_inf), rounded up to a power of two.
inline std::uint64_t default_rk4_steps(const OpenSystem& sys, double t) {
    const ComplexMatrix heff = effective_hamiltonian(sys);
    const double nrm = heff.cwiseAbs().rowwise().sum().maxCoeff();
    const double want = std::max(1e4, 20.0 * t * nrm);
    std::uint64_t n = 1;
    while (static_cast<double>(n) < want) n <<= 1U;
    return n;
}

/// Fixed-step RK4 solution of the master equation at time T.
///
/// The generator is time independent, so N RK4 steps equal the N-th power
/// of the one-step map; that power is formed by repeated squaring. The step
/// is halved (up to five times) until two successive step sizes agree to
/// 1e-8 in every entry. `steps` = 0 picks default_rk4_steps.
inline ComplexMatrix lindblad_propagate(const OpenSystem& sys, const ComplexMatrix& rho0, double t,
                                        std::uint64_t steps = 0) {
    sys.validate();
    detail::check_density(rho0, sys.dim());
    require(std::isfinite(t) && t >= 0.0, "propagation time must be non-negative");
    if (t == 0.0) return rho0;
    std::uint64_t n = steps == 0 ? default_rk4_steps(sys, t) : steps;
    const ComplexMatrix l = liouvillian(sys);

    ComplexMatrix coarse_dev = detail::rk4_power_deviation(detail::rk4_step_deviation(l, t / double(n)), n);
    ComplexMatrix coarse = detail::apply_map(coarse_dev, rho0);
    for (int halving = 0; halving < 5; ++halving) {
        n *= 2;
        const ComplexMatrix fine_dev =
            detail::rk4_power_deviation(detail::rk4_step_deviation(l, t / double(n)), n);
        ComplexMatrix fine = detail::apply_map(fine_dev, rho0);
        if ((fine - coarse).cwiseAbs().maxCoeff() <= 1e-8) return fine;
        coarse = std::move(fine);
    }
    throw Error(ErrorKind::StepNotConverged, "RK4 did not converge after halving the step five times");
}

/// Success/failure split of the master-equation solution.
struct TrajectoryDecomposition {
    double p = 0.0;                 // no-jump probability <phi|phi>
    double F0 = 0.0;                // fidelity given no jump
    double F_fail = 0.0;            // fidelity of the failure branch
    double F_lindblad = 0.0;        // sqrt(<psi|rho|psi>)
    double F_nonhermitian = 0.0;    // sqrt(p) F0
    ComplexMatrix rho;              // full solution
    ComplexMatrix rho_fail;         // (rho - |phi><phi|)/(1 - p)
    StateVector phi;                // unnormalized no-jump state
};

inline double expectation(const StateVector& psi, const ComplexMatrix& rho) {
    return (psi.adjoint() * rho * psi)(0, 0).real();
}

inline TrajectoryDecomposition trajectory_decomposition(const OpenSystem& sys, const StateVector& psi0,
                                                        const StateVector& target, double t) {
    require(psi0.size() == sys.dim() && target.size() == sys.dim(), "state dimension mismatch");
    TrajectoryDecomposition out;
    out.phi = propagate(effective_hamiltonian(sys), psi0, t);
    out.p = out.phi.squaredNorm();
    out.rho = lindblad_propagate(sys, psi0 * psi0.adjoint(), t);
    out.F_lindblad = std::sqrt(std::max(0.0, expectation(target, out.rho)));
    out.F_nonhermitian = std::abs(out.phi.dot(target));
    out.F0 = out.p > 0.0 ? out.F_nonhermitian / std::sqrt(out.p) : 0.0;
    if (1.0 - out.p < 1e-12)
        throw Error(ErrorKind::DegenerateBranch, "no-jump probability is 1; failure branch undefined");
    out.rho_fail = (out.rho - out.phi * out.phi.adjoint()) / (1.0 - out.p);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (out.rho_fail + out.rho_fail.adjoint()),
                                                    Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
        throw Error(ErrorKind::NonPhysical, "failure-branch state is not positive semidefinite");
    out.F_fail = std::sqrt(std::max(0.0, expectation(target, out.rho_fail)));
    return out;
}

/// An open gate model: dynamics, input state, and a target whose local phase
/// on qubit A is aligned with the no-jump evolution.
struct GateModel {
    OpenSystem system;
    StateVector psi0;
    StateVector target;
    double gate_time = 0.0;
    std::vector<std::string> labels;
};

namespace detail {

inline ComplexMatrix transitions(Eigen::Index n, std::initializer_list<std::pair<int, int>> to_from) {
    ComplexMatrix op = ComplexMatrix::Zero(n, n);
    for (auto [to, from] : to_from) op(to, from) = 1.0;
    return op;
}

/// Target (1/2)(e^{i phase}(|a> - |b>) + |c> + |d>) with phase matched to phi.
inline StateVector aligned_target(const StateVector& phi, int a, int b, int c, int d) {
    const cplx diff = phi(a) - phi(b);
    const cplx phase = std::abs(diff) > 0.0 ? diff / std::abs(diff) : cplx(1.0);
    StateVector t = StateVector::Zero(phi.size());
    t(a) = 0.5 * phase;
    t(b) = -0.5 * phase;
    t(c) = 0.5;
    t(d) = 0.5;
    return t;
}

} // namespace detail

/// Simple-exchange model after the first excitation pulse. Basis:
///   0 |e2 up 0>, 1 |up up 1>, 2 |up e2 0>, 3 |e2 down 0>, 4 |up down 1>,
///   5 |up e1 0>, 6 |down up 0>, 7 |down down 0>, 8 |up up 0>, 9 |up down 0>.
/// States 8, 9 collect decayed population; the closing pulse re-excites
/// them, so they never overlap the target.
inline GateModel exchange_gate_model(const ExchangeConfig& config, double t) {
    const auto h = build_hamiltonians(config);
    const Eigen::Index n = 10;
    GateModel m;
    m.labels = {"e2,up,0", "up,up,1", "up,e2,0", "e2,down,0", "up,down,1",
                "up,e1,0", "down,up,0", "down,down,0", "up,up,0", "up,down,0"};
    m.system.hamiltonian = ComplexMatrix::Zero(n, n);
    m.system.hamiltonian.block(0, 0, 3, 3) = h.H_upup;
    m.system.hamiltonian.block(3, 3, 3, 3) = h.H_updown;
    const double kappa = config.cavity.kappa(), gamma = config.cavity.gamma();
    m.system.jumps = {
        {detail::transitions(n, {{8, 1}, {9, 4}}), kappa},   // cavity a
        {detail::transitions(n, {{8, 0}, {9, 3}}), gamma},   // e2_A -> up_A
        {detail::transitions(n, {{8, 2}}), gamma},           // e2_B -> up_B
        {detail::transitions(n, {{9, 5}}), gamma},           // e1_B -> down_B
    };
    m.psi0 = StateVector::Zero(n);
    m.psi0(0) = m.psi0(3) = m.psi0(6) = m.psi0(7) = 0.5;
    m.gate_time = t;
    const StateVector phi = propagate(effective_hamiltonian(m.system), m.psi0, t);
    m.target = detail::aligned_target(phi, 0, 3, 6, 7);
    return m;
}

/// Raman model after shelving. Basis:
///   0 |up s 0>, 1 |e s 0>, 2 |down s 1>, 3 |up down 0>, 4 |e down 0>,
///   5 |down down 1>, 6 |down e 0>, 7 |down up 0>, 8 |down s 0>, 9 |down down 0>.
inline GateModel raman_gate_model(const RamanConfig& config, double t) {
    const auto h = build_raman_hamiltonians(config);
    const Eigen::Index n = 10;
    GateModel m;
    m.labels = {"up,s,0", "e,s,0", "down,s,1", "up,down,0", "e,down,0",
                "down,down,1", "down,e,0", "down,up,0", "down,s,0", "down,down,0"};
    m.system.hamiltonian = ComplexMatrix::Zero(n, n);
    m.system.hamiltonian.block(0, 0, 3, 3) = h.H_upup;
    m.system.hamiltonian.block(3, 3, 5, 5) = h.H_updown;
    const double kappa = config.cavity.kappa(), gamma = config.cavity.gamma();
    m.system.jumps = {
        {detail::transitions(n, {{8, 2}, {9, 5}}), kappa},   // cavity a
        {detail::transitions(n, {{0, 1}, {3, 4}}), gamma},   // e_A -> up_A
        {detail::transitions(n, {{7, 6}}), gamma},           // e_B -> up_B
    };
    m.psi0 = StateVector::Zero(n);
    m.psi0(0) = m.psi0(3) = m.psi0(8) = m.psi0(9) = 0.5;
    m.gate_time = t;
    const StateVector phi = propagate(effective_hamiltonian(m.system), m.psi0, t);
    m.target = detail::aligned_target(phi, 0, 3, 8, 9);
    return m;
}

inline TrajectoryDecomposition decompose(const GateModel& m) {
    return trajectory_decomposition(m.system, m.psi0, m.target, m.gate_time);
}

/// Master-equation fidelity of a gate model, minus Gamma T.
inline GateResult fidelity_lindblad(const GateModel& m, double Gamma) {
    const ComplexMatrix rho = lindblad_propagate(m.system, m.psi0 * m.psi0.adjoint(), m.gate_time);
    GateResult r;
    r.method = Method::Lindblad;
    r.gate_time = m.gate_time;
    r.fidelity = clamp_fidelity(std::sqrt(std::max(0.0, expectation(m.target, rho))) - Gamma * m.gate_time,
                                r.warnings);
    return r;
}

inline GateResult fidelity_lindblad_exchange(const ExchangeConfig& config, double t) {
    return fidelity_lindblad(exchange_gate_model(config, t), config.Gamma);
}

inline GateResult fidelity_lindblad_raman(const RamanConfig& config, double t) {
    auto r = fidelity_lindblad(raman_gate_model(config, t), config.Gamma);
    for (auto& w : config.warnings()) r.warnings.push_back(w);
    return r;
}

} // namespace cgate
