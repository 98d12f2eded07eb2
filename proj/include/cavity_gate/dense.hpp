#pragma once

// Small dense complex linear algebra: matrix exponential and propagation
// under (possibly non-Hermitian) time-independent generators.

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "cavity_gate/error.hpp"

namespace cgate {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr cplx I{0.0, 1.0};

namespace detail {

inline void check_square_finite(const ComplexMatrix& m) {
    require(m.rows() == m.cols() && m.rows() >= 1, "matrix must be square and non-empty");
    if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "matrix has NaN or Inf entries");
}

inline double norm1(const ComplexMatrix& m) { return m.cwiseAbs().colwise().sum().maxCoeff(); }

} // namespace detail

/// Condition number (2-norm) of a square matrix from its singular values.
inline double condition_number(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

/// e^M by scaling and squaring of a truncated Taylor series.
inline ComplexMatrix mat_exp_series(const ComplexMatrix& m, double tol = 1e-12) {
    detail::check_square_finite(m);
    const double nrm = detail::norm1(m);
    int squarings = 0;
    if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    const ComplexMatrix a = m / std::ldexp(1.0, squarings);

    const auto n = m.rows();
    ComplexMatrix sum = ComplexMatrix::Identity(n, n);
    ComplexMatrix term = ComplexMatrix::Identity(n, n);
    bool converged = false;
    for (int k = 1; k <= 60; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
        if (detail::norm1(term) <= tol * detail::norm1(sum)) {
            converged = true;
            break;
        }
    }
    if (!converged) throw Error(ErrorKind::ConvergenceFailure, "Taylor series did not converge");
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    if (!sum.allFinite()) throw Error(ErrorKind::ConvergenceFailure, "overflow while squaring");
    return sum;
}

/// e^M by eigendecomposition. Returns false (leaving `out` untouched) when
/// the eigenvector matrix is too ill-conditioned to trust.
inline bool mat_exp_eigen(const ComplexMatrix& m, ComplexMatrix& out, double max_condition = 1e8) {
    detail::check_square_finite(m);
    Eigen::ComplexEigenSolver<ComplexMatrix> es(m, true);
    if (es.info() != Eigen::Success) return false;
    const ComplexMatrix& v = es.eigenvectors();
    if (!(condition_number(v) < max_condition)) return false;
    const Eigen::VectorXcd expd = es.eigenvalues().array().exp();
    out = v * expd.asDiagonal() * v.inverse();
    return out.allFinite();
}

/// e^M: diagonalizes when the eigenbasis is well conditioned, otherwise
/// falls back to scaling and squaring.
inline ComplexMatrix mat_exp(const ComplexMatrix& m) {
    detail::check_square_finite(m);
    if (m.isZero(0.0)) return ComplexMatrix::Identity(m.rows(), m.cols());
    ComplexMatrix out;
    if (mat_exp_eigen(m, out)) return out;
    return mat_exp_series(m);
}

/// e^{-i T H} psi0.
inline StateVector propagate(const ComplexMatrix& h_eff, const StateVector& psi0, double t) {
    require(h_eff.rows() == psi0.size(), "Hamiltonian and state dimensions differ");
    require(std::isfinite(t), "propagation time must be finite");
    return mat_exp(cplx(0.0, -t) * h_eff) * psi0;
}

/// H - (i/2) sum_k rate_k |k><k| for diagonal decay rates.
inline ComplexMatrix with_decay(const ComplexMatrix& h, const Eigen::VectorXd& rates) {
    require(h.rows() == rates.size(), "decay vector dimension mismatch");
    ComplexMatrix out = h;
    for (Eigen::Index k = 0; k < rates.size(); ++k) {
        require(rates(k) >= 0.0, "decay rates must be non-negative");
        out(k, k) -= cplx(0.0, 0.5 * rates(k));
    }
    return out;
}

} // namespace cgate
