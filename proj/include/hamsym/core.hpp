// core.hpp - Hilbert↔Kähler correspondence: Strocchi map, the (g, ω, 𝒥)
// structures, and lifting of complex operators to real 2N×2N block form.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace hamsym::core {

using Matrix  = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// ------------------------------- domain types -------------------------------

// Complex amplitude vector. Unit norm is never enforced implicitly; scaled
// vectors are legal and callers query the flag when they need a true state.
struct QuantumState {
    CVector amplitudes;

    QuantumState() = default;
    explicit QuantumState(CVector amps) : amplitudes(std::move(amps)) {
        if (amplitudes.size() == 0) {
            throw std::invalid_argument("QuantumState: amplitude vector is empty");
        }
    }

    Eigen::Index dim() const { return amplitudes.size(); }
    double norm() const { return amplitudes.norm(); }
    bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }
};

// Real phase-space vector z = (q, p) with the canonical splitting.
struct KahlerVector {
    Vector q;   // position half
    Vector p;   // momentum half

    KahlerVector() = default;
    KahlerVector(Vector q_in, Vector p_in) : q(std::move(q_in)), p(std::move(p_in)) {
        if (q.size() != p.size()) {
            throw std::invalid_argument("KahlerVector: q and p must have equal length");
        }
        if (q.size() == 0) throw std::invalid_argument("KahlerVector: empty");
    }

    Eigen::Index modes() const { return q.size(); }
    Eigen::Index dim() const { return 2 * q.size(); }
    double norm() const { return std::sqrt(q.squaredNorm() + p.squaredNorm()); }

    // Stacked (q; p) column, the layout all 2N×2N block matrices act on.
    Vector stacked() const {
        Vector z(dim());
        z.head(modes()) = q;
        z.tail(modes()) = p;
        return z;
    }

    static KahlerVector from_stacked(const Vector& z) {
        if (z.size() % 2 != 0 || z.size() == 0) {
            throw std::invalid_argument("KahlerVector: stacked vector must have even positive length");
        }
        const Eigen::Index n = z.size() / 2;
        return KahlerVector(z.head(n), z.tail(n));
    }
};

// Real 2N×2N matrix of the form [[A_R, -A_I], [A_I, A_R]]; equivalently, a
// matrix commuting with the complex structure 𝒥. The block form is enforced
// at construction.
struct LiftedOperator {
    Matrix blocks;

    LiftedOperator() = default;
    explicit LiftedOperator(Matrix m, double tol = 1e-12) : blocks(std::move(m)) {
        if (blocks.rows() != blocks.cols() || blocks.rows() % 2 != 0 || blocks.rows() == 0) {
            throw std::invalid_argument("LiftedOperator: matrix must be square with even dimension");
        }
        const Eigen::Index n = blocks.rows() / 2;
        const double defect = std::max(
            (blocks.topLeftCorner(n, n) - blocks.bottomRightCorner(n, n)).cwiseAbs().maxCoeff(),
            (blocks.topRightCorner(n, n) + blocks.bottomLeftCorner(n, n)).cwiseAbs().maxCoeff());
        if (defect > tol) {
            throw std::invalid_argument(
                "LiftedOperator: matrix does not commute with the complex structure");
        }
    }

    Eigen::Index modes() const { return blocks.rows() / 2; }
};

// ---------------------------- constant structures ----------------------------

// 𝒥 = [[0, -I], [I, 0]], the complex structure; 𝒥² = -id.
inline Matrix complex_structure(Eigen::Index n_modes) {
    Matrix j = Matrix::Zero(2 * n_modes, 2 * n_modes);
    j.topRightCorner(n_modes, n_modes) = -Matrix::Identity(n_modes, n_modes);
    j.bottomLeftCorner(n_modes, n_modes) = Matrix::Identity(n_modes, n_modes);
    return j;
}

// Ω = [[0, I], [-I, 0]], matrix of the symplectic form.
inline Matrix symplectic_form(Eigen::Index n_modes) {
    Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
    omega.topRightCorner(n_modes, n_modes) = Matrix::Identity(n_modes, n_modes);
    omega.bottomLeftCorner(n_modes, n_modes) = -Matrix::Identity(n_modes, n_modes);
    return omega;
}

// Largest absolute entry, the norm used by all structural checks here.
inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// -------------------------------- operations --------------------------------

// ψ_k ↦ (Re ψ_k, Im ψ_k). Isometric: ‖z‖₂ = ‖ψ‖₂.
inline KahlerVector strocchi_map(const QuantumState& state) {
    return KahlerVector(state.amplitudes.real(), state.amplitudes.imag());
}

// ψ_k = q_k + i p_k, the inverse realification.
inline QuantumState strocchi_inverse(const KahlerVector& z) {
    CVector amps(z.modes());
    amps.real() = z.q;
    amps.imag() = z.p;
    return QuantumState(std::move(amps));
}

// Splits ⟨φ|ψ⟩ into (g, w) with g + i·w = ⟨φ|ψ⟩. g is the Euclidean pairing
// q·q' + p·p' (Fubini-Study related metric), w = q·p' - p·q' the symplectic form.
inline std::pair<double, double> inner_product_decompose(const QuantumState& phi,
                                                         const QuantumState& psi) {
    if (phi.dim() != psi.dim()) {
        throw std::invalid_argument("inner_product_decompose: dimension mismatch");
    }
    const KahlerVector a = strocchi_map(phi);
    const KahlerVector b = strocchi_map(psi);
    const double g = a.q.dot(b.q) + a.p.dot(b.p);
    const double w = a.q.dot(b.p) - a.p.dot(b.q);
    return {g, w};
}

// 𝒥 z = (-p, q).
inline KahlerVector apply_complex_structure(const KahlerVector& z) {
    return KahlerVector(-z.p, z.q);
}

// Metric evaluated on Kähler vectors directly.
inline double metric_g(const KahlerVector& a, const KahlerVector& b) {
    return a.q.dot(b.q) + a.p.dot(b.p);
}

// Symplectic form evaluated on Kähler vectors directly.
inline double symplectic_w(const KahlerVector& a, const KahlerVector& b) {
    return a.q.dot(b.p) - a.p.dot(b.q);
}

// Lift of a complex N×N matrix A = A_R + i A_I to [[A_R, -A_I], [A_I, A_R]].
// Intertwines the Strocchi map: strocchi(Aψ) = lift(A)·strocchi(ψ), and is a
// multiplicative homomorphism.
inline LiftedOperator lift_operator(const CMatrix& a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw std::invalid_argument("lift_operator: input must be square and non-empty");
    }
    const Eigen::Index n = a.rows();
    Matrix lifted(2 * n, 2 * n);
    lifted.topLeftCorner(n, n) = a.real();
    lifted.topRightCorner(n, n) = -a.imag();
    lifted.bottomLeftCorner(n, n) = a.imag();
    lifted.bottomRightCorner(n, n) = a.real();
    return LiftedOperator(std::move(lifted));
}

// Applies a lifted operator to a Kähler vector.
inline KahlerVector apply(const LiftedOperator& op, const KahlerVector& z) {
    if (op.modes() != z.modes()) {
        throw std::invalid_argument("apply: operator/vector dimension mismatch");
    }
    return KahlerVector::from_stacked(op.blocks * z.stacked());
}

// Extracts the complex N×N matrix from a 𝒥-commuting real matrix.
inline CMatrix unlift_operator(const Matrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0 || m.rows() == 0) {
        throw std::invalid_argument("unlift_operator: matrix must be square with even dimension");
    }
    const Eigen::Index n = m.rows() / 2;
    const Matrix j = complex_structure(n);
    if (max_abs(m * j - j * m) > tol) {
        throw std::invalid_argument("unlift_operator: matrix does not commute with the complex structure");
    }
    CMatrix a(n, n);
    a.real() = m.topLeftCorner(n, n);
    a.imag() = m.bottomLeftCorner(n, n);
    return a;
}

struct LiftClassification {
    bool complex_compatible = false;  // commutes with 𝒥
    bool observable = false;          // 𝒥-compatible and symmetric
    bool unitary = false;             // 𝒥-compatible, orthogonal and symplectic
    double commutator_defect = 0.0;   // ‖M𝒥 - 𝒥M‖∞
};

// Classifies a real even-dimensional matrix against the three structural
// conditions satisfied by lifts of Hermitian and unitary operators.
inline LiftClassification classify_lift(const Matrix& m, double tol = 1e-10) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw std::invalid_argument("classify_lift: input must be square and non-empty");
    }
    if (m.rows() % 2 != 0) {
        throw std::invalid_argument("classify_lift: dimension must be even");
    }
    const Eigen::Index n = m.rows() / 2;
    const Matrix j = complex_structure(n);
    const Matrix omega = symplectic_form(n);

    LiftClassification out;
    out.commutator_defect = max_abs(m * j - j * m);
    out.complex_compatible = out.commutator_defect <= tol;
    out.observable = out.complex_compatible && max_abs(m - m.transpose()) <= tol;
    const bool orthogonal = max_abs(m.transpose() * m - Matrix::Identity(m.rows(), m.cols())) <= tol;
    const bool symplectic = max_abs(m.transpose() * omega * m - omega) <= tol;
    out.unitary = out.complex_compatible && orthogonal && symplectic;
    return out;
}

}  // namespace hamsym::core
