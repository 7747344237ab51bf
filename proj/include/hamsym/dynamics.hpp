// dynamics.hpp - canonical Hamiltonian systems, explicit symplectic
// integrators (Störmer-Verlet and a Yoshida 4th-order composition), an RK4
// reference oracle, exact Schrödinger propagation by eigendecomposition,
// finite-difference symplecticity defect, and Benettin Lyapunov estimates.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamsym/core.hpp"

namespace hamsym::dynamics {

using Matrix  = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// Thrown when a trajectory leaves the representable range.
struct IntegrationError : std::runtime_error {
    long step;
    explicit IntegrationError(const std::string& msg, long step_index)
        : std::runtime_error(msg + " at step " + std::to_string(step_index)), step(step_index) {}
};

// ------------------------------ canonical system -----------------------------

using HamiltonianFn = std::function<double(const Vector& q, const Vector& p, double t)>;
using GradientFn = std::function<std::pair<Vector, Vector>(const Vector& q, const Vector& p, double t)>;

// A canonical system of n_pairs conjugate (q, p) pairs. The gradient is
// analytic when supplied; otherwise central finite differences of the
// Hamiltonian stand in. `separable` marks dH/dq independent of p and dH/dp
// independent of q, which selects the fully explicit Verlet path.
struct CanonicalSystem {
    Eigen::Index n_pairs = 0;
    HamiltonianFn hamiltonian;
    GradientFn gradient;       // empty -> finite-difference fallback
    bool separable = false;
    double fd_step = 1e-6;     // finite-difference step for the fallback gradient

    std::pair<Vector, Vector> grad(const Vector& q, const Vector& p, double t) const {
        if (gradient) return gradient(q, p, t);
        Vector dq(n_pairs), dp(n_pairs);
        Vector qs = q, ps = p;
        for (Eigen::Index k = 0; k < n_pairs; ++k) {
            const double h = fd_step * std::max(1.0, std::abs(q[k]));
            qs[k] = q[k] + h; const double fp = hamiltonian(qs, p, t);
            qs[k] = q[k] - h; const double fm = hamiltonian(qs, p, t);
            qs[k] = q[k];
            dq[k] = (fp - fm) / (2 * h);
        }
        for (Eigen::Index k = 0; k < n_pairs; ++k) {
            const double h = fd_step * std::max(1.0, std::abs(p[k]));
            ps[k] = p[k] + h; const double fp = hamiltonian(q, ps, t);
            ps[k] = p[k] - h; const double fm = hamiltonian(q, ps, t);
            ps[k] = p[k];
            dp[k] = (fp - fm) / (2 * h);
        }
        return {dq, dp};
    }
};

// Max relative disagreement between the supplied gradient and central finite
// differences of the Hamiltonian, probed at `n_probes` random points.
inline double gradient_consistency(const CanonicalSystem& sys, int n_probes = 16,
                                   uint64_t seed = 12345, double t = 0.37) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.5, 1.5);
    CanonicalSystem fd = sys;
    fd.gradient = nullptr;
    double worst = 0.0;
    for (int i = 0; i < n_probes; ++i) {
        Vector q(sys.n_pairs), p(sys.n_pairs);
        for (Eigen::Index k = 0; k < sys.n_pairs; ++k) { q[k] = dist(rng); p[k] = dist(rng); }
        const auto [aq, ap] = sys.grad(q, p, t);
        const auto [nq, np] = fd.grad(q, p, t);
        const double scale = std::max({1.0, aq.cwiseAbs().maxCoeff(), ap.cwiseAbs().maxCoeff()});
        worst = std::max(worst, (aq - nq).cwiseAbs().maxCoeff() / scale);
        worst = std::max(worst, (ap - np).cwiseAbs().maxCoeff() / scale);
    }
    return worst;
}

// --------------------------------- trajectory --------------------------------

struct Trajectory {
    Vector times;
    std::vector<core::KahlerVector> states;

    Eigen::Index size() const { return times.size(); }
    const core::KahlerVector& front() const { return states.front(); }
    const core::KahlerVector& back() const { return states.back(); }
};

enum class Method { verlet, yoshida4, rk4_reference };

inline Method method_from_string(const std::string& name) {
    if (name == "verlet") return Method::verlet;
    if (name == "yoshida4") return Method::yoshida4;
    if (name == "rk4" || name == "rk4_reference") return Method::rk4_reference;
    throw std::invalid_argument("unknown integration method: " + name);
}

// ------------------------------ single steps ---------------------------------

namespace detail {

inline void check_finite(const Vector& q, const Vector& p, long step) {
    if (!q.allFinite() || !p.allFinite()) {
        throw IntegrationError("non-finite state", step);
    }
}

// Fixed-point solve of x = base + scale * g(x). Converges for
// |scale|·Lipschitz(g) < 1, which holds for the step sizes used here.
template <typename Fn>
Vector fixed_point(const Vector& start, Fn&& update, long step) {
    Vector x = start;
    for (int it = 0; it < 100; ++it) {
        Vector next = update(x);
        const double delta = (next - x).cwiseAbs().maxCoeff();
        const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
        x = std::move(next);
        if (delta <= 1e-14 * scale) return x;
    }
    throw IntegrationError("implicit Verlet half-step did not converge", step);
}

}  // namespace detail

// One Störmer-Verlet step. Fully explicit kick-drift-kick for separable
// systems; for general gradient-given systems the two implicit half-steps are
// solved by fixed-point iteration, preserving second order and symplecticity.
// dt may be negative (time-reversed stepping).
inline void verlet_step(const CanonicalSystem& sys, Vector& q, Vector& p, double t, double dt,
                        long step_index = 0) {
    if (sys.separable) {
        auto [dq0, dp0] = sys.grad(q, p, t);
        Vector ph = p - 0.5 * dt * dq0;
        auto [dq1, dp1] = sys.grad(q, ph, t + 0.5 * dt);
        q += dt * dp1;
        auto [dq2, dp2] = sys.grad(q, ph, t + dt);
        p = ph - 0.5 * dt * dq2;
        return;
    }
    const Vector q0 = q;
    const Vector p0 = p;
    const Vector ph = detail::fixed_point(
        p0,
        [&](const Vector& x) {
            auto [dq, dp] = sys.grad(q0, x, t);
            return Vector(p0 - 0.5 * dt * dq);
        },
        step_index);
    const auto [dq_a, dp_a] = sys.grad(q0, ph, t);
    const Vector q1 = detail::fixed_point(
        q0,
        [&](const Vector& x) {
            auto [dq, dp] = sys.grad(x, ph, t + dt);
            return Vector(q0 + 0.5 * dt * (dp_a + dp));
        },
        step_index);
    const auto [dq_b, dp_b] = sys.grad(q1, ph, t + dt);
    q = q1;
    p = ph - 0.5 * dt * dq_b;
}

// Triple-jump Yoshida composition of Verlet steps; fourth order.
inline void yoshida4_step(const CanonicalSystem& sys, Vector& q, Vector& p, double t, double dt,
                          long step_index = 0) {
    static const double cbrt2 = std::cbrt(2.0);
    static const double w1 = 1.0 / (2.0 - cbrt2);
    static const double w0 = -cbrt2 / (2.0 - cbrt2);
    verlet_step(sys, q, p, t, w1 * dt, step_index);
    verlet_step(sys, q, p, t + w1 * dt, w0 * dt, step_index);
    verlet_step(sys, q, p, t + (w1 + w0) * dt, w1 * dt, step_index);
}

// Classic RK4 on ż = (∂H/∂p, -∂H/∂q). Not symplectic; reference oracle.
inline void rk4_step(const CanonicalSystem& sys, Vector& q, Vector& p, double t, double dt,
                     long = 0) {
    auto rhs = [&](const Vector& qq, const Vector& pp, double tt) {
        auto [dq, dp] = sys.grad(qq, pp, tt);
        return std::make_pair(Vector(dp), Vector(-dq));
    };
    const auto [k1q, k1p] = rhs(q, p, t);
    const auto [k2q, k2p] = rhs(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p, t + 0.5 * dt);
    const auto [k3q, k3p] = rhs(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p, t + 0.5 * dt);
    const auto [k4q, k4p] = rhs(q + dt * k3q, p + dt * k3p, t + dt);
    q += (dt / 6.0) * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += (dt / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p);
}

inline void step(const CanonicalSystem& sys, Method m, Vector& q, Vector& p, double t, double dt,
                 long step_index = 0) {
    switch (m) {
        case Method::verlet: verlet_step(sys, q, p, t, dt, step_index); break;
        case Method::yoshida4: yoshida4_step(sys, q, p, t, dt, step_index); break;
        case Method::rk4_reference: rk4_step(sys, q, p, t, dt, step_index); break;
    }
}

// -------------------------------- integrate ----------------------------------

// Uniform-step integration from t = 0 over ⌈T/|dt|⌉ steps. dt < 0 integrates
// backwards in time. T = 0 yields the single-point trajectory {z0}.
inline Trajectory integrate(const CanonicalSystem& sys, const core::KahlerVector& z0, double T,
                            double dt, Method m) {
    if (dt == 0.0) throw std::invalid_argument("integrate: dt must be nonzero");
    if (T < 0.0) throw std::invalid_argument("integrate: T must be nonnegative");
    const long n_steps = static_cast<long>(std::ceil(T / std::abs(dt) - 1e-12));
    Trajectory traj;
    traj.times.resize(n_steps + 1);
    traj.states.reserve(static_cast<size_t>(n_steps) + 1);

    Vector q = z0.q, p = z0.p;
    traj.times[0] = 0.0;
    traj.states.push_back(z0);
    for (long i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        step(sys, m, q, p, t, dt, i);
        detail::check_finite(q, p, i);
        traj.times[i + 1] = static_cast<double>(i + 1) * dt;
        traj.states.emplace_back(q, p);
    }
    return traj;
}

// ------------------------------ bundled systems ------------------------------

// H = p²/2 + 1 - cos q, the dimensionless pendulum. Separable; stable fixed
// point at the origin, separatrix energy 2.
inline CanonicalSystem pendulum_system() {
    CanonicalSystem sys;
    sys.n_pairs = 1;
    sys.separable = true;
    sys.hamiltonian = [](const Vector& q, const Vector& p, double) {
        return 0.5 * p[0] * p[0] + 1.0 - std::cos(q[0]);
    };
    sys.gradient = [](const Vector& q, const Vector& p, double) {
        Vector dq(1), dp(1);
        dq[0] = std::sin(q[0]);
        dp[0] = p[0];
        return std::make_pair(dq, dp);
    };
    return sys;
}

// H = (q² + p²)/2 per pair, unit-frequency oscillators.
inline CanonicalSystem harmonic_system(Eigen::Index n_pairs = 1) {
    CanonicalSystem sys;
    sys.n_pairs = n_pairs;
    sys.separable = true;
    sys.hamiltonian = [](const Vector& q, const Vector& p, double) {
        return 0.5 * (q.squaredNorm() + p.squaredNorm());
    };
    sys.gradient = [](const Vector& q, const Vector& p, double) {
        return std::make_pair(Vector(q), Vector(p));
    };
    return sys;
}

// --------------------------- exact quantum propagation -----------------------

// ψ(t) = V exp(-iΔt) V† ψ0 with hq = V Δ V†. Exact up to the
// eigendecomposition; preserves the norm to machine precision.
inline core::QuantumState schrodinger_exact(const CMatrix& hq, const core::QuantumState& psi0,
                                            double t) {
    if (hq.rows() != hq.cols()) throw std::invalid_argument("schrodinger_exact: matrix not square");
    if (hq.rows() != psi0.dim()) throw std::invalid_argument("schrodinger_exact: dimension mismatch");
    if ((hq - hq.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw std::invalid_argument("schrodinger_exact: Hamiltonian must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hq);
    if (es.info() != Eigen::Success) throw std::runtime_error("schrodinger_exact: eigensolver failed");
    const Vector lambda = es.eigenvalues();
    const CMatrix v = es.eigenvectors();
    CVector phases(lambda.size());
    for (Eigen::Index k = 0; k < lambda.size(); ++k) {
        phases[k] = std::polar(1.0, -lambda[k] * t);
    }
    CVector out = v * (phases.asDiagonal() * (v.adjoint() * psi0.amplitudes));
    return core::QuantumState(std::move(out));
}

// ----------------------------- symplectic defect -----------------------------

// ‖J_MᵀΩJ_M - Ω‖∞ with the Jacobian J_M of `flowmap` from central differences.
inline double symplectic_defect(const std::function<core::KahlerVector(const core::KahlerVector&)>& flowmap,
                                const core::KahlerVector& z0, double h_fd = 1e-5) {
    if (h_fd <= 0.0) throw std::invalid_argument("symplectic_defect: h_fd must be positive");
    const Eigen::Index dim = z0.dim();
    const Vector base = z0.stacked();
    Matrix jac(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
        Vector zp = base, zm = base;
        zp[c] += h_fd;
        zm[c] -= h_fd;
        const Vector fp = flowmap(core::KahlerVector::from_stacked(zp)).stacked();
        const Vector fm = flowmap(core::KahlerVector::from_stacked(zm)).stacked();
        jac.col(c) = (fp - fm) / (2 * h_fd);
    }
    const Matrix omega = core::symplectic_form(dim / 2);
    return core::max_abs(jac.transpose() * omega * jac - omega);
}

// ----------------------------- Lyapunov exponent -----------------------------

struct LyapunovReport {
    double lambda = 0.0;            // final estimate
    Vector running;                 // running average after each renormalization
};

// Benettin estimate of the leading finite-time Lyapunov exponent: a unit
// tangent vector is advanced through the finite-difference Jacobian of the
// step map and renormalized every `renorm_every` steps.
inline LyapunovReport lyapunov_exponent(const CanonicalSystem& sys, const core::KahlerVector& z0,
                                        double T, double dt, int renorm_every = 10,
                                        Method m = Method::rk4_reference, double h_fd = 1e-7) {
    if (dt <= 0.0 || T <= 0.0) throw std::invalid_argument("lyapunov_exponent: T and dt must be positive");
    if (renorm_every < 1) throw std::invalid_argument("lyapunov_exponent: renorm_every must be >= 1");
    const long n_steps = static_cast<long>(std::floor(T / dt));
    const long n_renorms = n_steps / renorm_every;
    if (n_renorms < 100) {
        throw std::invalid_argument("lyapunov_exponent: need at least 100 renormalizations; increase T");
    }

    const Eigen::Index dim = z0.dim();
    Vector z = z0.stacked();
    Vector v = Vector::Zero(dim);
    v[0] = 1.0;

    auto advance = [&](const Vector& state, double t) {
        Vector q = state.head(dim / 2), p = state.tail(dim / 2);
        step(sys, m, q, p, t, dt);
        Vector out(dim);
        out.head(dim / 2) = q;
        out.tail(dim / 2) = p;
        return out;
    };

    LyapunovReport rep;
    rep.running.resize(n_renorms);
    double log_sum = 0.0;
    long renorm_count = 0;
    for (long i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        // tangent update through directional finite differences of the step map
        const Vector zp = advance(z + h_fd * v, t);
        const Vector zm = advance(z - h_fd * v, t);
        v = (zp - zm) / (2 * h_fd);
        z = advance(z, t);
        if (!z.allFinite() || !v.allFinite()) throw IntegrationError("non-finite state", i);
        if ((i + 1) % renorm_every == 0) {
            const double growth = v.norm();
            log_sum += std::log(growth);
            v /= growth;
            const double elapsed = static_cast<double>(i + 1) * dt;
            rep.running[renorm_count] = log_sum / elapsed;
            ++renorm_count;
            if (renorm_count == n_renorms) break;
        }
    }
    rep.lambda = rep.running[n_renorms - 1];
    return rep;
}

}  // namespace hamsym::dynamics
