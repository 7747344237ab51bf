// lie.hpp - first-order Lie canonical perturbation theory for near-integrable
// systems: Fourier-mode perturbations, the generating function W₁ with a
// resonance-safe branch, near-symplectic variable transforms, the Lie-unitary
// stepping scheme with per-step error accounting, transformed observables and
// their evolution equation, and the quantum/classical cost comparison.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamsym/dynamics.hpp"
#include "hamsym/integrable.hpp"
#include "hamsym/observables.hpp"

namespace hamsym::lie {

using Matrix  = Eigen::MatrixXd;
using Vector  = Eigen::VectorXd;
using Complex = std::complex<double>;

struct NegativeActionError : std::runtime_error {
    Eigen::Index trajectory;  // -1 when no trajectory index applies
    explicit NegativeActionError(Eigen::Index j = -1)
        : std::runtime_error(j < 0 ? std::string("transformed action went negative; "
                                                 "perturbation too strong for this orbit")
                                   : "transformed action went negative on trajectory " +
                                         std::to_string(j) +
                                         "; perturbation too strong for this orbit"),
          trajectory(j) {}
};

struct SingularActionError : std::runtime_error {
    SingularActionError()
        : std::runtime_error("zero action with a nonzero off-diagonal observable entry") {}
};

// ------------------------------ zeta via series ------------------------------

// ζ(s) for s ≥ 2 by Euler-Maclaurin acceleration of the defining series;
// truncation error well below 1e-12.
inline double riemann_zeta(double s) {
    if (s < 2.0) throw std::invalid_argument("riemann_zeta: implemented for s >= 2");
    const int m = 16;
    double sum = 0.0;
    for (int n = 1; n < m; ++n) sum += std::pow(n, -s);
    const double md = static_cast<double>(m);
    sum += std::pow(md, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(md, -s);
    // Bernoulli correction terms B2, B4, B6, B8
    const double b[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0};
    double factor = s;  // s (s+1) ... rising product over two indices at a time
    double power = std::pow(md, -s - 1.0);
    double factorial = 2.0;
    for (int k = 0; k < 4; ++k) {
        sum += b[k] * factor / factorial * power;
        factor *= (s + 2 * k + 1) * (s + 2 * k + 2);
        factorial *= (2 * k + 3) * (2 * k + 4);
        power /= md * md;
    }
    return sum;
}

// Validity measure of one Lie-unitary step: ε' = 2 ε Δt ζ(p+1), where p is
// the smoothness order controlling the Fourier-coefficient decay.
inline double effective_epsilon(double eps, double dt, int smoothness) {
    if (smoothness < 1) throw std::invalid_argument("effective_epsilon: smoothness must be >= 1");
    if (dt < 0.0) throw std::invalid_argument("effective_epsilon: dt must be nonnegative");
    return 2.0 * eps * dt * riemann_zeta(static_cast<double>(smoothness) + 1.0);
}

// ---------------------------- Fourier perturbation ---------------------------

using AmplitudeFn = std::function<Complex(double)>;

// One Fourier mode A_m(I) e^{i(mθ - ω_m t)}. Reality of the perturbation
// requires the conjugate mode (-m, A_m*, -ω_m) to be present as well.
struct FourierMode {
    int m = 1;
    AmplitudeFn amplitude;
    AmplitudeFn amplitude_dI;  // empty when I-partials are never requested
    double omega_m = 0.0;
};

struct FourierPerturbation {
    std::vector<FourierMode> modes;
    int smoothness = 1;  // p: |A_m| = O(|m|^-(p+1))

    bool autonomous() const {
        for (const auto& mode : modes)
            if (mode.omega_m != 0.0) return false;
        return true;
    }

    Complex value_complex(double action, double theta, double t) const {
        Complex sum = 0.0;
        for (const auto& mode : modes) {
            sum += mode.amplitude(action) *
                   std::polar(1.0, mode.m * theta - mode.omega_m * t);
        }
        return sum;
    }

    double value(double action, double theta, double t) const {
        return value_complex(action, theta, t).real();
    }

    double dtheta(double action, double theta, double t) const {
        Complex sum = 0.0;
        for (const auto& mode : modes) {
            sum += Complex(0.0, mode.m) * mode.amplitude(action) *
                   std::polar(1.0, mode.m * theta - mode.omega_m * t);
        }
        return sum.real();
    }

    double dI(double action, double theta, double t) const {
        Complex sum = 0.0;
        for (const auto& mode : modes) {
            if (!mode.amplitude_dI) {
                throw std::invalid_argument("FourierPerturbation: dA/dI missing for a mode");
            }
            sum += mode.amplitude_dI(action) *
                   std::polar(1.0, mode.m * theta - mode.omega_m * t);
        }
        return sum.real();
    }

    // magnitude of the imaginary remainder; nonzero means a conjugate mode is missing
    double reality_defect(double action, double theta, double t) const {
        return std::abs(value_complex(action, theta, t).imag());
    }
};

// Conjugate pair implementing c(I)·cos(mθ - ω t).
inline FourierPerturbation cosine_perturbation(int m, double omega, AmplitudeFn half_amp,
                                               AmplitudeFn half_amp_dI, int smoothness = 1) {
    if (m == 0) throw std::invalid_argument("cosine_perturbation: m must be nonzero");
    FourierPerturbation pert;
    pert.smoothness = smoothness;
    pert.modes.push_back({m, half_amp, half_amp_dI, omega});
    pert.modes.push_back({-m,
                          [half_amp](double i) { return std::conj(half_amp(i)); },
                          half_amp_dI ? AmplitudeFn([half_amp_dI](double i) {
                              return std::conj(half_amp_dI(i));
                          })
                                      : AmplitudeFn(),
                          -omega});
    return pert;
}

// --------------------------- near-integrable system --------------------------

// One angle-action pair: integrable part H0(I) with its first two I
// derivatives, plus the Fourier perturbation acting on this pair.
struct TwistMode {
    std::function<double(double)> h0;
    std::function<double(double)> omega0;    // dH0/dI
    std::function<double(double)> domega0;   // d²H0/dI²
    FourierPerturbation perturbation;
};

// Separable collection of perturbed angle-action pairs sharing one strength ε.
struct NearIntegrableSystem {
    std::vector<TwistMode> modes;
    double epsilon = 0.0;

    NearIntegrableSystem(std::vector<TwistMode> m, double eps)
        : modes(std::move(m)), epsilon(eps) {
        if (modes.empty()) throw std::invalid_argument("NearIntegrableSystem: no modes");
        if (epsilon < 0.0) throw std::invalid_argument("NearIntegrableSystem: epsilon must be >= 0");
    }

    Eigen::Index n_modes() const { return static_cast<Eigen::Index>(modes.size()); }

    int smoothness() const {
        int p = modes.front().perturbation.smoothness;
        for (const auto& mode : modes) p = std::min(p, mode.perturbation.smoothness);
        return p;
    }
};

// Builds a mode from an externally supplied action-angle chart: H0 through
// the chart inverse at θ = 0, the frequency from the chart, and its I
// derivative by central differences.
inline TwistMode twist_mode_from_chart(const integrable::ActionAngleChart& chart,
                                       const dynamics::CanonicalSystem& sys,
                                       FourierPerturbation perturbation, double fd_step = 1e-5) {
    TwistMode mode;
    mode.h0 = [chart, sys](double action) {
        const auto z = chart.inverse(action, 0.0);
        return sys.hamiltonian(z.q, z.p, 0.0);
    };
    mode.omega0 = chart.frequency;
    mode.domega0 = [chart, fd_step](double action) {
        const double h = fd_step * std::max(1.0, std::abs(action));
        return (chart.frequency(action + h) - chart.frequency(action - h)) / (2 * h);
    };
    mode.perturbation = std::move(perturbation);
    return mode;
}

// The nondegenerate-twist test system H0 = I²/2 with H1 = cos(θ - ω t);
// resonant at I = ω, fully analytic.
inline NearIntegrableSystem twist_system(double epsilon, double omega_drive, int smoothness = 1) {
    TwistMode mode;
    mode.h0 = [](double i) { return 0.5 * i * i; };
    mode.omega0 = [](double i) { return i; };
    mode.domega0 = [](double) { return 1.0; };
    mode.perturbation = cosine_perturbation(
        1, omega_drive, [](double) { return Complex(0.5, 0.0); },
        [](double) { return Complex(0.0, 0.0); }, smoothness);
    return NearIntegrableSystem({mode}, epsilon);
}

// Canonical (q := θ, p := I) view for reference integration and Lyapunov
// probes of the full perturbed flow.
inline dynamics::CanonicalSystem to_canonical(const NearIntegrableSystem& sys) {
    dynamics::CanonicalSystem out;
    out.n_pairs = sys.n_modes();
    out.separable = false;
    const auto modes = sys.modes;
    const double eps = sys.epsilon;
    out.hamiltonian = [modes, eps](const Vector& q, const Vector& p, double t) {
        double h = 0.0;
        for (size_t k = 0; k < modes.size(); ++k) {
            h += modes[k].h0(p[static_cast<Eigen::Index>(k)]) +
                 eps * modes[k].perturbation.value(p[static_cast<Eigen::Index>(k)],
                                                   q[static_cast<Eigen::Index>(k)], t);
        }
        return h;
    };
    out.gradient = [modes, eps](const Vector& q, const Vector& p, double t) {
        Vector dq(q.size()), dp(p.size());
        for (size_t k = 0; k < modes.size(); ++k) {
            const auto idx = static_cast<Eigen::Index>(k);
            dq[idx] = eps * modes[k].perturbation.dtheta(p[idx], q[idx], t);
            dp[idx] = modes[k].omega0(p[idx]) + eps * modes[k].perturbation.dI(p[idx], q[idx], t);
        }
        return std::make_pair(dq, dp);
    };
    return out;
}

// ---------------------------- generating function W₁ -------------------------

struct W1Value {
    double value = 0.0;
    double dtheta = 0.0;
    double dI = 0.0;
    double imag_residual = 0.0;  // conjugate-pair cancellation quality
};

namespace w1_detail {

// g(x) = (e^{ix} - 1)/(ix) and its derivative, with the Taylor branch keeping
// both regular through x = 0.
inline Complex g_factor(double x, bool taylor) {
    if (taylor) return Complex(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
    const Complex eix = std::polar(1.0, x);
    return (eix - 1.0) / Complex(0.0, x);
}

inline Complex g_prime(double x, bool taylor) {
    if (taylor) return Complex(-x / 3.0, 0.5 - x * x / 8.0);
    const Complex eix = std::polar(1.0, x);
    return (x * eix + Complex(0.0, 1.0) * eix - Complex(0.0, 1.0)) / (x * x);
}

}  // namespace w1_detail

// W₁ over the window [t0, t] along the unperturbed orbit anchored at angle
// θ0 = θ(t0): W₁ = -Σ_m A_m(I) e^{i(mθ0 - mω0(I)t0)} (e^{iΩ_m t} - e^{iΩ_m t0})/(iΩ_m)
// with Ω_m = mω0(I) - ω_m. Near resonance (|Ω_m Δt| below the switch
// threshold) the regular limit branch with its second-order Taylor correction
// is used, so the value stays finite and continuous through Ω_m = 0.
// Partials are analytic; ∂/∂I uses dω0/dI through both the prefactor phase
// and Ω_m.
inline W1Value w1_window(const TwistMode& mode, double action, double theta0, double t0, double t,
                         double resonance_threshold = 1e-4) {
    if (t < t0) throw std::invalid_argument("w1_window: t must be >= t0");
    const double dt = t - t0;
    const double w0 = mode.omega0(action);
    const double dw0 = mode.domega0(action);

    Complex value = 0.0, dth = 0.0, di = 0.0;
    for (const auto& fm : mode.perturbation.modes) {
        if (!fm.amplitude_dI) {
            throw std::invalid_argument("w1_window: dA/dI missing for a Fourier mode");
        }
        const double md = static_cast<double>(fm.m);
        const double omega_res = md * w0 - fm.omega_m;  // Ω_m
        const double x = omega_res * dt;
        const bool taylor = std::abs(x) < resonance_threshold;

        const Complex a = fm.amplitude(action);
        const Complex da = fm.amplitude_dI(action);
        const Complex phase0 = std::polar(1.0, md * theta0 - md * w0 * t0);
        const Complex gate = std::polar(1.0, omega_res * t0);
        const Complex g = w1_detail::g_factor(x, taylor);
        const Complex gp = w1_detail::g_prime(x, taylor);

        const Complex window = gate * dt * g;                                    // G(Ω)
        const Complex window_domega = Complex(0.0, t0) * gate * dt * g +
                                      gate * dt * dt * gp;                       // dG/dΩ

        const Complex term = -a * phase0 * window;
        value += term;
        dth += Complex(0.0, md) * term;
        // d/dI of -(A · phase0 · G): product rule over amplitude, prefactor
        // phase (through ω0 t0) and G (through Ω)
        di += -(da * phase0 * window +
                a * phase0 * Complex(0.0, -md * dw0 * t0) * window +
                a * phase0 * window_domega * (md * dw0));
    }

    W1Value out;
    out.value = value.real();
    out.dtheta = dth.real();
    out.dI = di.real();
    out.imag_residual = std::max({std::abs(value.imag()), std::abs(dth.imag()),
                                  std::abs(di.imag())});
    return out;
}

// W₁ as a phase-space function at time t: the angle argument is the current
// angle θ(t); the unperturbed orbit is traced back to the window start, and
// the I-partial picks up the angle retraction term.
inline W1Value w1_at(const TwistMode& mode, double action, double theta_t, double t0, double t,
                     double resonance_threshold = 1e-4) {
    const double w0 = mode.omega0(action);
    const double theta0 = theta_t - w0 * (t - t0);
    W1Value base = w1_window(mode, action, theta0, t0, t, resonance_threshold);
    base.dI -= base.dtheta * mode.domega0(action) * (t - t0);
    return base;
}

// Stationary W₁ for autonomous perturbations: {W₁, H0} = -H₁ gives
// W₁ = -Σ_m A_m(I) e^{imθ}/(i m ω0(I)), time independent.
inline W1Value w1_stationary(const TwistMode& mode, double action, double theta) {
    const double w0 = mode.omega0(action);
    const double dw0 = mode.domega0(action);
    Complex value = 0.0, dth = 0.0, di = 0.0;
    for (const auto& fm : mode.perturbation.modes) {
        if (fm.omega_m != 0.0) {
            throw std::invalid_argument("w1_stationary: perturbation must be autonomous");
        }
        if (!fm.amplitude_dI) {
            throw std::invalid_argument("w1_stationary: dA/dI missing for a Fourier mode");
        }
        const double md = static_cast<double>(fm.m);
        if (std::abs(md * w0) < 1e-12) {
            throw std::invalid_argument("w1_stationary: zero frequency, resonant denominator");
        }
        const Complex a = fm.amplitude(action);
        const Complex da = fm.amplitude_dI(action);
        const Complex eim = std::polar(1.0, md * theta);
        const Complex denom = Complex(0.0, md * w0);
        value += -a * eim / denom;
        dth += -a * eim / w0;  // -(imθ factor)/(imω0) collapses to 1/ω0
        di += -(da / denom - a * dw0 / (denom * w0)) * eim;
    }
    W1Value out;
    out.value = value.real();
    out.dtheta = dth.real();
    out.dI = di.real();
    out.imag_residual = std::max({std::abs(value.imag()), std::abs(dth.imag()),
                                  std::abs(di.imag())});
    return out;
}

// Numeric quadrature of the second-order generating function along the
// unperturbed orbit: D0 W₂ = -{W₁, H₁} with the K₁ = K₂ = 0 gauge. Composite
// Simpson; an extension hook, not used by the stepping scheme.
inline double w2_quadrature(const TwistMode& mode, double action, double theta0, double t0,
                            double t, int n_nodes = 200) {
    if (n_nodes < 2) throw std::invalid_argument("w2_quadrature: need at least 2 nodes");
    const int n = n_nodes + (n_nodes % 2);  // even interval count for Simpson
    const double h = (t - t0) / n;
    const double w0 = mode.omega0(action);
    auto integrand = [&](double s) {
        const double theta_s = theta0 + w0 * (s - t0);
        const W1Value w = w1_at(mode, action, theta_s, t0, s);
        const double h1_th = mode.perturbation.dtheta(action, theta_s, s);
        const double h1_i = mode.perturbation.dI(action, theta_s, s);
        return w.dtheta * h1_i - w.dI * h1_th;  // {W1, H1}
    };
    double sum = integrand(t0) + integrand(t);
    for (int i = 1; i < n; ++i) sum += integrand(t0 + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return -sum * h / 3.0;
}

// ------------------------------ variable transform ---------------------------

// First-order near-identity transform at time t (window [t0, t]):
// Ī = I - ε ∂W₁/∂θ, θ̄ = θ + ε ∂W₁/∂I, evaluated at the current point.
inline std::pair<Vector, Vector> transform(const NearIntegrableSystem& sys, const Vector& actions,
                                           const Vector& angles, double t, double t0 = 0.0) {
    if (actions.size() != sys.n_modes() || angles.size() != sys.n_modes()) {
        throw std::invalid_argument("transform: mode count mismatch");
    }
    Vector new_actions(actions.size()), new_angles(angles.size());
    for (Eigen::Index k = 0; k < actions.size(); ++k) {
        const W1Value w = w1_at(sys.modes[static_cast<size_t>(k)], actions[k], angles[k], t0, t);
        new_actions[k] = actions[k] - sys.epsilon * w.dtheta;
        new_angles[k] = angles[k] + sys.epsilon * w.dI;
        if (new_actions[k] < 0.0) throw NegativeActionError(-1);
    }
    return {new_actions, new_angles};
}

// Sign-flipped first-order map evaluated at the barred point; the round trip
// with transform() deviates at O(ε²).
inline std::pair<Vector, Vector> inverse_transform(const NearIntegrableSystem& sys,
                                                   const Vector& barred_actions,
                                                   const Vector& barred_angles, double t,
                                                   double t0 = 0.0) {
    if (barred_actions.size() != sys.n_modes() || barred_angles.size() != sys.n_modes()) {
        throw std::invalid_argument("inverse_transform: mode count mismatch");
    }
    Vector actions(barred_actions.size()), angles(barred_angles.size());
    for (Eigen::Index k = 0; k < barred_actions.size(); ++k) {
        const W1Value w = w1_at(sys.modes[static_cast<size_t>(k)], barred_actions[k],
                                barred_angles[k], t0, t);
        actions[k] = barred_actions[k] + sys.epsilon * w.dtheta;
        angles[k] = barred_angles[k] - sys.epsilon * w.dI;
        if (actions[k] < 0.0) throw NegativeActionError(-1);
    }
    return {actions, angles};
}

// Autonomous counterparts built on the stationary W₁; time drops out.
inline integrable::ActionAngleEnsemble transform_stationary(
    const NearIntegrableSystem& sys, const integrable::ActionAngleEnsemble& ens) {
    if (ens.n_modes() != sys.n_modes()) {
        throw std::invalid_argument("transform_stationary: mode count mismatch");
    }
    Matrix actions = ens.actions;
    Matrix angles = ens.angles;
    for (Eigen::Index j = 0; j < ens.n_traj(); ++j) {
        for (Eigen::Index k = 0; k < ens.n_modes(); ++k) {
            const W1Value w = w1_stationary(sys.modes[static_cast<size_t>(k)], ens.actions(j, k),
                                            ens.angles(j, k));
            actions(j, k) = ens.actions(j, k) - sys.epsilon * w.dtheta;
            angles(j, k) = integrable::wrap_angle(ens.angles(j, k) + sys.epsilon * w.dI);
            if (actions(j, k) < 0.0) throw NegativeActionError(j);
        }
    }
    return integrable::ActionAngleEnsemble(std::move(actions), std::move(angles));
}

// --------------------------------- lie stepping ------------------------------

struct LieStepReport {
    double eps_prime = 0.0;      // effective ε' of this step
    double eps_total = 0.0;      // Σ ε' including this step
    double action_drift = 0.0;   // max |I - I(t_start of run)| after the step
    double angle_residual = 0.0; // max |ε ∂W₁/∂I| correction applied this step
    bool validity_warning = false;  // ε' above the 0.1 working threshold
};

// One Lie-unitary step over [t, t + dt], re-anchored per step: the forward
// transform at the window start is the identity (W₁ vanishes there), the
// barred angles drift by ω̄ = ω0(Ī) dt with Ī constant, and the inverse
// first-order transform with the window's W₁ is applied at the barred point.
inline integrable::ActionAngleEnsemble lie_step(const integrable::ActionAngleEnsemble& ens,
                                                const NearIntegrableSystem& sys, double t,
                                                double dt, LieStepReport* report = nullptr) {
    if (ens.n_modes() != sys.n_modes()) {
        throw std::invalid_argument("lie_step: ensemble/system mode count mismatch");
    }
    Matrix actions = ens.actions;
    Matrix angles = ens.angles;
    double max_angle_residual = 0.0;
    for (Eigen::Index j = 0; j < ens.n_traj(); ++j) {
        for (Eigen::Index k = 0; k < ens.n_modes(); ++k) {
            const auto& mode = sys.modes[static_cast<size_t>(k)];
            const double barred_action = ens.actions(j, k);
            const double drifted = ens.angles(j, k) + mode.omega0(barred_action) * dt;
            const W1Value w = w1_window(mode, barred_action, drifted, t, t + dt);
            const double new_action = barred_action + sys.epsilon * w.dtheta;
            if (new_action < 0.0) throw NegativeActionError(j);
            actions(j, k) = new_action;
            angles(j, k) = integrable::wrap_angle(drifted - sys.epsilon * w.dI);
            max_angle_residual = std::max(max_angle_residual, std::abs(sys.epsilon * w.dI));
        }
    }
    if (report) {
        report->eps_prime = effective_epsilon(sys.epsilon, dt, sys.smoothness());
        report->angle_residual = max_angle_residual;
        report->validity_warning = report->eps_prime > 0.1;
    }
    return integrable::ActionAngleEnsemble(std::move(actions), std::move(angles));
}

struct LieRun {
    std::vector<double> times;
    std::vector<integrable::ActionAngleEnsemble> states;
    std::vector<LieStepReport> reports;
};

// Drives n_steps of lie_step from t0, accumulating ε_t = Σ ε' and the drift
// of the actions relative to the initial ensemble.
inline LieRun lie_run(const integrable::ActionAngleEnsemble& initial,
                      const NearIntegrableSystem& sys, double t0, double dt, long n_steps) {
    LieRun run;
    run.times.reserve(static_cast<size_t>(n_steps) + 1);
    run.states.reserve(static_cast<size_t>(n_steps) + 1);
    run.reports.reserve(static_cast<size_t>(n_steps));
    run.times.push_back(t0);
    run.states.push_back(initial);
    double eps_total = 0.0;
    for (long i = 0; i < n_steps; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        LieStepReport rep;
        auto next = lie_step(run.states.back(), sys, t, dt, &rep);
        eps_total += rep.eps_prime;
        rep.eps_total = eps_total;
        rep.action_drift = (next.actions - initial.actions).cwiseAbs().maxCoeff();
        run.times.push_back(t + dt);
        run.states.push_back(std::move(next));
        run.reports.push_back(rep);
    }
    return run;
}

// Deviation between the Lie-step flow and a fine RK4 reference of the full
// perturbed system, sampled at every Lie step for one trajectory.
struct GlobalErrorSeries {
    Vector times;
    Vector deviation;  // max over modes of hypot(ΔI, wrapped Δθ)
};

inline GlobalErrorSeries global_error_probe(const NearIntegrableSystem& sys, const Vector& action0,
                                            const Vector& angle0, double T, double dt_lie,
                                            int rk4_substeps = 32) {
    const long n_steps = static_cast<long>(std::ceil(T / dt_lie - 1e-12));
    const auto canonical = to_canonical(sys);

    Matrix act(1, action0.size()), ang(1, angle0.size());
    act.row(0) = action0;
    ang.row(0) = angle0;
    integrable::ActionAngleEnsemble lie_state(act, ang);

    Vector q = angle0, p = action0;
    const double h = dt_lie / rk4_substeps;

    GlobalErrorSeries series;
    series.times.resize(n_steps + 1);
    series.deviation.resize(n_steps + 1);
    series.times[0] = 0.0;
    series.deviation[0] = 0.0;
    for (long i = 0; i < n_steps; ++i) {
        const double t = static_cast<double>(i) * dt_lie;
        lie_state = lie_step(lie_state, sys, t, dt_lie);
        for (int s = 0; s < rk4_substeps; ++s) {
            dynamics::rk4_step(canonical, q, p, t + s * h, h);
        }
        double dev = 0.0;
        for (Eigen::Index k = 0; k < action0.size(); ++k) {
            const double di = lie_state.actions(0, k) - p[k];
            const double dth = integrable::wrap_pm_pi(lie_state.angles(0, k) -
                                                      integrable::wrap_angle(q[k]));
            dev = std::max(dev, std::hypot(di, dth));
        }
        series.times[i + 1] = t + dt_lie;
        series.deviation[i + 1] = dev;
    }
    return series;
}

// ---------------------------- transformed observables ------------------------

// Evaluates <ρ̄|f|ρ̄> on a barred ensemble directly as the classical double
// sum (1/N_s) Σ_j Σ_km f_km √(Ī_k Ī_m) e^{-i(θ̄_m - θ̄_k)}.
inline double observable_transformed(const observables::BlockObservable& f,
                                     const integrable::ActionAngleEnsemble& barred) {
    if (f.n_traj() != barred.n_traj() || f.n_modes() != barred.n_modes()) {
        throw std::invalid_argument("observable_transformed: dimension mismatch");
    }
    Complex sum = 0.0;
    for (Eigen::Index j = 0; j < barred.n_traj(); ++j) {
        for (Eigen::Index k = 0; k < barred.n_modes(); ++k) {
            for (Eigen::Index m = 0; m < barred.n_modes(); ++m) {
                const Complex fkm = f.blocks[static_cast<size_t>(j)](k, m);
                if (fkm == Complex(0.0, 0.0)) continue;
                sum += fkm * std::sqrt(barred.actions(j, k) * barred.actions(j, m)) *
                       std::polar(1.0, -(barred.angles(j, m) - barred.angles(j, k)));
            }
        }
    }
    return sum.real() / static_cast<double>(barred.n_traj());
}

namespace pullback_detail {

// stationary W₁ partials per mode of one trajectory
struct ModePartials {
    double dtheta, dI, omega0, domega0;
};

// Rejects off-diagonal observable entries touching an unoccupied mode before
// any W₁ evaluation; unoccupied modes then only appear in vanishing diagonal
// terms and their partials are never consumed.
inline void check_occupation(const observables::BlockObservable& f,
                             const integrable::ActionAngleEnsemble& ens, Eigen::Index j) {
    for (Eigen::Index k = 0; k < ens.n_modes(); ++k) {
        for (Eigen::Index m = 0; m < ens.n_modes(); ++m) {
            if (k == m) continue;
            if (f.blocks[static_cast<size_t>(j)](k, m) == Complex(0.0, 0.0)) continue;
            if (ens.actions(j, k) <= 0.0 || ens.actions(j, m) <= 0.0) {
                throw SingularActionError();
            }
        }
    }
}

inline std::vector<ModePartials> partials_for(const NearIntegrableSystem& sys,
                                              const integrable::ActionAngleEnsemble& ens,
                                              Eigen::Index j) {
    std::vector<ModePartials> out(static_cast<size_t>(ens.n_modes()));
    for (Eigen::Index k = 0; k < ens.n_modes(); ++k) {
        if (ens.actions(j, k) <= 0.0) {
            out[static_cast<size_t>(k)] = {0.0, 0.0, 0.0, 0.0};
            continue;
        }
        const auto& mode = sys.modes[static_cast<size_t>(k)];
        const W1Value w = w1_stationary(mode, ens.actions(j, k), ens.angles(j, k));
        out[static_cast<size_t>(k)] = {w.dtheta, w.dI, mode.omega0(ens.actions(j, k)),
                                       mode.domega0(ens.actions(j, k))};
    }
    return out;
}

}  // namespace pullback_detail

// First-order expansion of the barred observable in the original variables,
// for autonomous perturbations (stationary W₁):
// f = (1/N_s) Σ F0_km {1 - ε [ (I_k ∂W₁/∂θ_m + I_m ∂W₁/∂θ_k)/(2 I_k I_m)
//                              + i (∂W₁/∂I_m - ∂W₁/∂I_k) ]}.
inline double first_order_pullback(const observables::BlockObservable& f,
                                   const integrable::ActionAngleEnsemble& ens,
                                   const NearIntegrableSystem& sys) {
    if (f.n_traj() != ens.n_traj() || f.n_modes() != ens.n_modes() ||
        ens.n_modes() != sys.n_modes()) {
        throw std::invalid_argument("first_order_pullback: dimension mismatch");
    }
    Complex sum = 0.0;
    for (Eigen::Index j = 0; j < ens.n_traj(); ++j) {
        pullback_detail::check_occupation(f, ens, j);
        const auto partials = pullback_detail::partials_for(sys, ens, j);
        for (Eigen::Index k = 0; k < ens.n_modes(); ++k) {
            for (Eigen::Index m = 0; m < ens.n_modes(); ++m) {
                const Complex fkm = f.blocks[static_cast<size_t>(j)](k, m);
                if (fkm == Complex(0.0, 0.0)) continue;
                const double ik = ens.actions(j, k);
                const double im = ens.actions(j, m);
                if (ik <= 0.0 || im <= 0.0) continue;  // vanishing diagonal term
                const auto& pk = partials[static_cast<size_t>(k)];
                const auto& pm = partials[static_cast<size_t>(m)];
                const Complex f0 = fkm * std::sqrt(ik * im) *
                                   std::polar(1.0, -(ens.angles(j, m) - ens.angles(j, k)));
                const Complex bracket =
                    Complex((ik * pm.dtheta + im * pk.dtheta) / (2.0 * ik * im), 0.0) +
                    Complex(0.0, 1.0) * (pm.dI - pk.dI);
                sum += f0 * (1.0 - sys.epsilon * bracket);
            }
        }
    }
    return sum.real() / static_cast<double>(ens.n_traj());
}

// Right-hand side of the observable evolution equation for autonomous
// (time-independent W₁) configurations:
//   df/dt = -i Σ (ω0m - ω0k) F0 + iε Σ (ω0m - ω0k) F1
//           + iε Σ (∂W₁/∂θ_m · dω0m/dI_m - ∂W₁/∂θ_k · dω0k/dI_k) F0,
// with F1 the first-order summand of the pullback. Conjugate pairing keeps
// the result real.
inline double observable_rhs(const observables::BlockObservable& f,
                             const integrable::ActionAngleEnsemble& ens,
                             const NearIntegrableSystem& sys) {
    if (f.n_traj() != ens.n_traj() || f.n_modes() != ens.n_modes() ||
        ens.n_modes() != sys.n_modes()) {
        throw std::invalid_argument("observable_rhs: dimension mismatch");
    }
    Complex sum = 0.0;
    const Complex iu(0.0, 1.0);
    for (Eigen::Index j = 0; j < ens.n_traj(); ++j) {
        pullback_detail::check_occupation(f, ens, j);
        const auto partials = pullback_detail::partials_for(sys, ens, j);
        for (Eigen::Index k = 0; k < ens.n_modes(); ++k) {
            for (Eigen::Index m = 0; m < ens.n_modes(); ++m) {
                const Complex fkm = f.blocks[static_cast<size_t>(j)](k, m);
                if (fkm == Complex(0.0, 0.0)) continue;
                const double ik = ens.actions(j, k);
                const double im = ens.actions(j, m);
                if (ik <= 0.0 || im <= 0.0) continue;  // vanishing diagonal term
                const auto& pk = partials[static_cast<size_t>(k)];
                const auto& pm = partials[static_cast<size_t>(m)];
                const Complex f0 = fkm * std::sqrt(ik * im) *
                                   std::polar(1.0, -(ens.angles(j, m) - ens.angles(j, k)));
                const Complex bracket =
                    Complex((ik * pm.dtheta + im * pk.dtheta) / (2.0 * ik * im), 0.0) +
                    iu * (pm.dI - pk.dI);
                const Complex f1 = f0 * bracket;
                const double mixing = pm.omega0 - pk.omega0;
                sum += -iu * mixing * f0;
                sum += iu * sys.epsilon * mixing * f1;
                sum += iu * sys.epsilon *
                       (pm.dtheta * pm.domega0 - pk.dtheta * pk.domega0) * f0;
            }
        }
    }
    return sum.real() / static_cast<double>(ens.n_traj());
}

// ------------------------------- cost comparison -----------------------------

struct ComplexityRecord {
    long quantum_width_qubits = 0;     // log2(N · N_s)
    double quantum_depth_cost = 0.0;   // √N_s · N · (ε T^ν / ε_t)^{1/(ν-1)}
    double classical_memory = 0.0;     // 2 N N_s phase-space values
    double classical_runtime = 0.0;    // N_s · N³ · T / ε_t^{1/κ}
    double eps_t_linear = 0.0;         // ε T, the ν = 1 budget identity
};

// Formula-level cost table. The total time is taken as T = N_t (unit step).
// ν = 1 reports the linear-in-T branch; the (ν-1)-root expression requires
// ν > 1.
inline ComplexityRecord complexity_table(long n_modes, long n_traj, long n_steps, double eps,
                                         double eps_t, double nu, double kappa) {
    if (n_modes < 1 || n_traj < 1 || n_steps < 1) {
        throw std::invalid_argument("complexity_table: sizes must be positive");
    }
    if (eps < 0 || eps_t <= 0 || kappa < 1) {
        throw std::invalid_argument("complexity_table: invalid error or order parameters");
    }
    if (nu < 1.0) throw std::invalid_argument("complexity_table: nu must be >= 1");
    const double T = static_cast<double>(n_steps);
    ComplexityRecord rec;
    rec.quantum_width_qubits = integrable::log2_ceil(n_modes) + integrable::log2_ceil(n_traj);
    rec.eps_t_linear = eps * T;
    const double root_ns = std::sqrt(static_cast<double>(n_traj));
    if (nu == 1.0) {
        rec.quantum_depth_cost = root_ns * static_cast<double>(n_modes) * T;
    } else {
        rec.quantum_depth_cost = root_ns * static_cast<double>(n_modes) *
                                 std::pow(eps * std::pow(T, nu) / eps_t, 1.0 / (nu - 1.0));
    }
    rec.classical_memory = 2.0 * static_cast<double>(n_modes) * static_cast<double>(n_traj);
    rec.classical_runtime = static_cast<double>(n_traj) * std::pow(static_cast<double>(n_modes), 3) *
                            T / std::pow(eps_t, 1.0 / kappa);
    return rec;
}

}  // namespace hamsym::lie
