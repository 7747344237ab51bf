// quantize.hpp - Kähler quantization of structured quadratic Hamiltonians,
// the induced classical Hamiltonian of a quantum operator, normal form by
// diagonalization, and a Schrödinger vs Hamilton equivalence harness.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamsym/core.hpp"
#include "hamsym/dynamics.hpp"

namespace hamsym::quantize {

using Matrix  = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// Raised when a quadratic Hamiltonian fails the complex-structure condition.
struct StructureError : std::runtime_error {
    double commutator_defect;
    std::string broken_condition;  // "Q1 != Q2" or "P^T != -P"
    StructureError(double defect, std::string condition)
        : std::runtime_error("quadratic Hamiltonian does not commute with the complex structure: " +
                             condition + " (|[H,J]|_inf = " + std::to_string(defect) + ")"),
          commutator_defect(defect),
          broken_condition(std::move(condition)) {}
};

// ------------------------------- domain types --------------------------------

// Real symmetric 2N×2N matrix in the block form [[Q1, P^T], [P, Q2]].
// The associated phase-space function used throughout is H_c(z) = ½ zᵀ H̃ z.
struct QuadraticHamiltonian {
    Matrix h_tilde;

    QuadraticHamiltonian() = default;
    explicit QuadraticHamiltonian(Matrix m) : h_tilde(std::move(m)) {
        if (h_tilde.rows() != h_tilde.cols() || h_tilde.rows() % 2 != 0 || h_tilde.rows() == 0) {
            throw std::invalid_argument("QuadraticHamiltonian: matrix must be square with even dimension");
        }
        if (core::max_abs(h_tilde - h_tilde.transpose()) > 1e-12) {
            throw std::invalid_argument("QuadraticHamiltonian: matrix must be symmetric");
        }
    }

    Eigen::Index modes() const { return h_tilde.rows() / 2; }
    Matrix q1() const { return h_tilde.topLeftCorner(modes(), modes()); }
    Matrix q2() const { return h_tilde.bottomRightCorner(modes(), modes()); }
    Matrix p() const { return h_tilde.bottomLeftCorner(modes(), modes()); }
    bool positive_definite() const {
        Eigen::LLT<Matrix> llt(h_tilde);
        return llt.info() == Eigen::Success;
    }
};

// Complex N×N Hamiltonian matrix; Hermitian when produced by quantize().
struct QuantumHamiltonian {
    CMatrix h_q;

    QuantumHamiltonian() = default;
    explicit QuantumHamiltonian(CMatrix m) : h_q(std::move(m)) {
        if (h_q.rows() != h_q.cols() || h_q.rows() == 0) {
            throw std::invalid_argument("QuantumHamiltonian: matrix must be square and non-empty");
        }
    }

    Eigen::Index dim() const { return h_q.rows(); }
    double hermiticity_defect() const { return (h_q - h_q.adjoint()).cwiseAbs().maxCoeff(); }
};

// -------------------------------- quantization --------------------------------

// Maps H̃ = [[Q, -P], [P, Q]] to H_q = Q + iP. Succeeds iff H̃ commutes with
// the complex structure within tol, which is equivalent to Q1 = Q2 together
// with Pᵀ = -P; otherwise throws StructureError naming the broken condition.
inline QuantumHamiltonian quantize(const QuadraticHamiltonian& h, double tol = 1e-10) {
    const Eigen::Index n = h.modes();
    const Matrix j = core::complex_structure(n);
    const double defect = core::max_abs(h.h_tilde * j - j * h.h_tilde);
    if (defect > tol) {
        const double dq = core::max_abs(h.q1() - h.q2());
        const double dp = core::max_abs(h.p().transpose() + h.p());
        throw StructureError(defect, dq >= dp ? "Q1 != Q2" : "P^T != -P");
    }
    CMatrix hq(n, n);
    hq.real() = h.q1();
    hq.imag() = h.p();
    return QuantumHamiltonian(std::move(hq));
}

// Builds the Kähler block form [[Q, -P], [P, Q]] of a Hermitian matrix; the
// round trip quantize(from_quantum(hq)) == hq is exact.
inline QuadraticHamiltonian from_quantum(const QuantumHamiltonian& hq) {
    return QuadraticHamiltonian(core::lift_operator(hq.h_q).blocks);
}

// ------------------------- induced classical Hamiltonian ---------------------

// H_c(q, p) = ½ Σ_{k,m} [(q_k q_m + p_k p_m) Re H_km + (p_k q_m - q_k p_m) Im H_km],
// i.e. H_c(z) = ½ zᵀ H̃ z with H̃ the lifted block form. The gradient is H̃ z,
// and ż = Ω ∇H_c reproduces exp(-i H t) exactly under the Strocchi map.
struct InducedClassicalHamiltonian {
    Matrix h_tilde;

    double value(const core::KahlerVector& z) const {
        const Vector zs = z.stacked();
        return 0.5 * zs.dot(h_tilde * zs);
    }
    core::KahlerVector gradient(const core::KahlerVector& z) const {
        return core::KahlerVector::from_stacked(h_tilde * z.stacked());
    }

    // Canonical system driving ż = Ω ∇H_c; separable iff the coupling block
    // vanishes (real Hamiltonian matrix).
    dynamics::CanonicalSystem as_canonical() const {
        const Eigen::Index n = h_tilde.rows() / 2;
        dynamics::CanonicalSystem sys;
        sys.n_pairs = n;
        sys.separable = core::max_abs(h_tilde.bottomLeftCorner(n, n)) == 0.0;
        const Matrix ht = h_tilde;
        sys.hamiltonian = [ht](const Vector& q, const Vector& p, double) {
            Vector z(q.size() + p.size());
            z.head(q.size()) = q;
            z.tail(p.size()) = p;
            return 0.5 * z.dot(ht * z);
        };
        sys.gradient = [ht, n](const Vector& q, const Vector& p, double) {
            Vector z(2 * n);
            z.head(n) = q;
            z.tail(n) = p;
            const Vector g = ht * z;
            return std::make_pair(Vector(g.head(n)), Vector(g.tail(n)));
        };
        return sys;
    }
};

inline InducedClassicalHamiltonian induced_classical_hamiltonian(const QuantumHamiltonian& hq,
                                                                 double tol = 1e-10) {
    if (hq.hermiticity_defect() > tol) {
        throw std::invalid_argument("induced_classical_hamiltonian: input must be Hermitian");
    }
    return InducedClassicalHamiltonian{core::lift_operator(hq.h_q).blocks};
}

// --------------------------------- normal form --------------------------------

struct NormalForm {
    Vector frequencies;  // eigenvalues, ascending
    CMatrix basis;       // unitary V with hq = V† Δ V
};

// Diagonalizes a Hermitian matrix into hq = V† diag(λ) V with λ ascending;
// the λ_k are the normal-mode frequencies of the induced oscillators.
inline NormalForm normal_form(const QuantumHamiltonian& hq, double tol = 1e-10) {
    if (hq.hermiticity_defect() > tol) {
        throw std::invalid_argument("normal_form: input must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hq.h_q);
    if (es.info() != Eigen::Success) throw std::runtime_error("normal_form: eigensolver failed");
    return NormalForm{es.eigenvalues(), es.eigenvectors().adjoint()};
}

// ----------------------------- equivalence harness ----------------------------

// Error series between exact Schrödinger evolution (eigendecomposition) and
// numeric symplectic integration of the induced classical flow.
struct EquivalenceReport {
    Vector times;
    Vector state_error;    // ‖strocchi(ψ_exact(t)) - z_num(t)‖₂
    Vector energy_drift;   // H_c(z_num(t)) - H_c(z_num(0))
    double max_error = 0.0;
    // Convention applied by the harness, recorded into CSV metadata by the CLI.
    static constexpr const char* convention =
        "H_c = (1/2) z^T Htilde z; dz/dt = Omega grad H_c matches exp(-i H t)";
};

inline EquivalenceReport equivalence_report(const QuantumHamiltonian& hq,
                                            const core::QuantumState& psi0, double T, double dt,
                                            dynamics::Method method = dynamics::Method::verlet) {
    if (dt <= 0.0) throw std::invalid_argument("equivalence_report: dt must be positive");
    const InducedClassicalHamiltonian hc = induced_classical_hamiltonian(hq);
    const dynamics::CanonicalSystem sys = hc.as_canonical();

    const Eigen::SelfAdjointEigenSolver<CMatrix> es(hq.h_q);
    const Vector lambda = es.eigenvalues();
    const CMatrix v = es.eigenvectors();
    const CVector coeffs = v.adjoint() * psi0.amplitudes;

    const long n_steps = static_cast<long>(std::ceil(T / dt - 1e-12));
    EquivalenceReport rep;
    rep.times.resize(n_steps + 1);
    rep.state_error.resize(n_steps + 1);
    rep.energy_drift.resize(n_steps + 1);

    core::KahlerVector z = core::strocchi_map(psi0);
    const double e0 = hc.value(z);
    Vector q = z.q, p = z.p;
    for (long i = 0; i <= n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        CVector phases(lambda.size());
        for (Eigen::Index k = 0; k < lambda.size(); ++k) phases[k] = std::polar(1.0, -lambda[k] * t);
        const CVector psi_t = v * (phases.asDiagonal() * coeffs);
        const core::KahlerVector z_exact = core::strocchi_map(core::QuantumState(psi_t));
        const core::KahlerVector z_num(q, p);
        rep.times[i] = t;
        rep.state_error[i] = std::sqrt((z_exact.q - q).squaredNorm() + (z_exact.p - p).squaredNorm());
        rep.energy_drift[i] = hc.value(z_num) - e0;
        if (i < n_steps) dynamics::step(sys, method, q, p, t, dt, i);
    }
    rep.max_error = rep.state_error.maxCoeff();
    return rep;
}

}  // namespace hamsym::quantize
