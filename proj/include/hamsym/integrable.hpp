// integrable.hpp - numeric action-angle construction for 1-DOF systems,
// Koopman-von Neumann encoding of (I, θ) data, diagonal unitary evolution,
// phase-space ensembles in separable and entangled encodings, and circuit
// resource accounting.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hamsym/core.hpp"
#include "hamsym/dynamics.hpp"
#include "hamsym/io.hpp"

namespace hamsym::integrable {

using Matrix  = Eigen::MatrixXd;
using Vector  = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline double wrap_angle(double theta) {
    double w = std::fmod(theta, 2 * M_PI);
    if (w < 0) w += 2 * M_PI;
    return w;
}

// signed wrap into (-π, π]
inline double wrap_pm_pi(double d) {
    double w = std::fmod(d, 2 * M_PI);
    if (w > M_PI) w -= 2 * M_PI;
    if (w <= -M_PI) w += 2 * M_PI;
    return w;
}

// Raised when an energy contour fails to close within the time budget, the
// signature of a separatrix (diverging period) or an unbounded orbit.
struct SeparatrixError : std::runtime_error {
    explicit SeparatrixError(double energy)
        : std::runtime_error("energy contour did not close within the period budget (E = " +
                             std::to_string(energy) + ")") {}
};

enum class Regime { auto_detect, libration, rotation };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::libration: return "libration";
        case Regime::rotation: return "rotation";
        default: return "auto";
    }
}

// ----------------------------- action-angle chart ----------------------------

// Canonical chart for one degree of freedom: action and angle as functions of
// the phase point, frequency as a function of the action, and the inverse map
// from (I, θ) back to phase space.
struct ActionAngleChart {
    std::function<double(const core::KahlerVector&)> action;
    std::function<double(const core::KahlerVector&)> angle;    // in [0, 2π)
    std::function<double(double)> frequency;                   // I -> ω = dH/dI
    std::function<core::KahlerVector(double, double)> inverse; // (I, θ) -> z
    Regime regime = Regime::auto_detect;
};

// Closed-form chart of the unit harmonic oscillator H = (q² + p²)/2, the
// exactness baseline for the numeric construction. θ = 0 sits on the positive
// q axis and grows linearly in time: q = √(2I) cos θ, p = -√(2I) sin θ.
inline ActionAngleChart harmonic_chart() {
    ActionAngleChart chart;
    chart.regime = Regime::libration;
    chart.action = [](const core::KahlerVector& z) {
        return 0.5 * (z.q[0] * z.q[0] + z.p[0] * z.p[0]);
    };
    chart.angle = [](const core::KahlerVector& z) {
        if (z.q[0] == 0.0 && z.p[0] == 0.0) return 0.0;
        return wrap_angle(std::atan2(-z.p[0], z.q[0]));
    };
    chart.frequency = [](double) { return 1.0; };
    chart.inverse = [](double action, double theta) {
        const double r = std::sqrt(2.0 * action);
        return core::KahlerVector((Vector(1) << r * std::cos(theta)).finished(),
                                  (Vector(1) << -r * std::sin(theta)).finished());
    };
    return chart;
}

// ------------------------- numeric chart construction ------------------------

struct ChartOptions {
    Regime regime = Regime::auto_detect;
    double center_q = 0.0;          // elliptic fixed point the chart winds around
    double center_p = 0.0;
    double period_budget = 2000.0;  // SeparatrixError beyond this orbit time
    double coarse_dt = 0.01;        // first-pass step for period bracketing
    int samples_per_orbit = 4096;   // fine-pass resolution
};

namespace chart_detail {

// (q, p) extended with the accumulator for ∫ p · (∂H/∂p) dt = ∮ p dq.
struct OrbitState {
    double q, p, acc;
};

inline OrbitState rk4(const dynamics::CanonicalSystem& sys, const OrbitState& s, double dt) {
    auto rhs = [&](const OrbitState& x) {
        const auto [dq, dp] = sys.grad((Vector(1) << x.q).finished(),
                                       (Vector(1) << x.p).finished(), 0.0);
        return OrbitState{dp[0], -dq[0], x.p * dp[0]};
    };
    auto at = [&](double c, const OrbitState& k) {
        return OrbitState{s.q + c * k.q, s.p + c * k.p, s.acc + c * k.acc};
    };
    const OrbitState k1 = rhs(s);
    const OrbitState k2 = rhs(at(dt / 2, k1));
    const OrbitState k3 = rhs(at(dt / 2, k2));
    const OrbitState k4 = rhs(at(dt, k3));
    return OrbitState{s.q + dt / 6 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q),
                      s.p + dt / 6 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p),
                      s.acc + dt / 6 * (k1.acc + 2 * k2.acc + 2 * k3.acc + k4.acc)};
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     int iters = 120) {
    // assumes f(lo) <= 0 <= f(hi) up to noise; returns the crossing point
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) <= 0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace chart_detail

// Numeric chart engine for one degree of freedom. Orbits are traced with RK4;
// section crossings are refined by bisection over re-integrated partial
// steps. Assumes contours in the working region wind once around the chart
// center and cross the reference ray exactly once (single-well libration, or
// rotation over a 2π-periodic potential).
class NumericChart {
  public:
    NumericChart(dynamics::CanonicalSystem sys, const core::KahlerVector& probe,
                 ChartOptions opt = {})
        : sys_(std::move(sys)), opt_(opt) {
        if (sys_.n_pairs != 1) {
            throw std::invalid_argument("NumericChart: built for 1-DOF systems only");
        }
        e_center_ = energy(opt_.center_q, opt_.center_p);
        const Orbit first = trace_from(probe.q[0], probe.p[0], opt_.regime);
        regime_ = first.regime;
        direction_ = first.direction;
        cache_orbit(first);
    }

    Regime regime() const { return regime_; }

    double action(const core::KahlerVector& z) const {
        check_dim(z);
        if (at_center(z)) return 0.0;
        return orbit_at_energy(energy(z.q[0], z.p[0])).action;
    }

    double angle(const core::KahlerVector& z) const {
        check_dim(z);
        if (at_center(z)) return 0.0;
        const Orbit orb = orbit_at_energy(energy(z.q[0], z.p[0]));
        const double t_to_ref = time_to_section(z.q[0], z.p[0], orb);
        return wrap_angle(2 * M_PI * (orb.period - t_to_ref) / orb.period);
    }

    double energy_of_action(double target) const {
        if (target < 0) throw std::invalid_argument("energy_of_action: action must be nonnegative");
        if (target == 0.0) return e_center_;
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = action_to_energy_.find(target);
            if (it != action_to_energy_.end()) return it->second;
        }
        double e = solve_energy(target);
        std::lock_guard<std::mutex> lock(mu_);
        action_to_energy_[target] = e;
        return e;
    }

    double frequency_of_action(double action_value) const {
        return 2 * M_PI / orbit_at_energy(energy_of_action(action_value)).period;
    }

    core::KahlerVector inverse(double action_value, double theta) const {
        if (action_value <= 0.0) {
            return core::KahlerVector((Vector(1) << opt_.center_q).finished(),
                                      (Vector(1) << opt_.center_p).finished());
        }
        const Orbit orb = orbit_at_energy(energy_of_action(action_value));
        const double t = wrap_angle(theta) / (2 * M_PI) * orb.period;
        const auto s = advance(chart_detail::OrbitState{orb.ref_q, orb.ref_p, 0.0}, t,
                               orb.period / opt_.samples_per_orbit);
        return core::KahlerVector((Vector(1) << s.q).finished(), (Vector(1) << s.p).finished());
    }

    static ActionAngleChart as_chart(std::shared_ptr<NumericChart> engine) {
        ActionAngleChart chart;
        chart.regime = engine->regime();
        chart.action = [engine](const core::KahlerVector& z) { return engine->action(z); };
        chart.angle = [engine](const core::KahlerVector& z) { return engine->angle(z); };
        chart.frequency = [engine](double i) { return engine->frequency_of_action(i); };
        chart.inverse = [engine](double i, double th) { return engine->inverse(i, th); };
        return chart;
    }

  private:
    struct Orbit {
        double energy = 0.0;
        double period = 0.0;
        double action = 0.0;
        double ref_q = 0.0;  // θ = 0 point on the contour
        double ref_p = 0.0;
        Regime regime = Regime::libration;
        int direction = 1;
    };

    static void check_dim(const core::KahlerVector& z) {
        if (z.modes() != 1) throw std::invalid_argument("NumericChart: expected a 1-DOF point");
    }

    double energy(double q, double p) const {
        return sys_.hamiltonian((Vector(1) << q).finished(), (Vector(1) << p).finished(), 0.0);
    }

    bool at_center(const core::KahlerVector& z) const {
        return std::abs(z.q[0] - opt_.center_q) < 1e-12 && std::abs(z.p[0] - opt_.center_p) < 1e-12;
    }

    double winding(double q, double p) const {
        return std::atan2(-(p - opt_.center_p), q - opt_.center_q);
    }

    chart_detail::OrbitState advance(chart_detail::OrbitState s, double t, double dt) const {
        const long full = static_cast<long>(std::floor(t / dt));
        for (long i = 0; i < full; ++i) s = chart_detail::rk4(sys_, s, dt);
        const double rest = t - static_cast<double>(full) * dt;
        if (rest > 0) s = chart_detail::rk4(sys_, s, rest);
        return s;
    }

    // Solves H(q, center_p) = e on the q > center_q side of the ray.
    double reference_q(double e) const {
        const double pc = opt_.center_p;
        double lo = opt_.center_q;
        double step = 0.1;
        double hi = lo + step;
        int guard = 0;
        while (energy(hi, pc) < e) {
            lo = hi;
            step *= 2;
            hi = lo + step;
            // no turning point: at or beyond the separatrix band edge
            if (++guard > 200) throw SeparatrixError(e);
        }
        return chart_detail::bisect([&](double q) { return energy(q, pc) - e; }, lo, hi);
    }

    // Solves H(center_q, p) = e on the requested rotation branch.
    double reference_p(double e, int direction) const {
        const double qc = opt_.center_q;
        const double sgn = static_cast<double>(direction);
        double lo = opt_.center_p;
        double step = 0.1;
        double hi = lo + sgn * step;
        int guard = 0;
        while (energy(qc, hi) < e) {
            lo = hi;
            step *= 2;
            hi = lo + sgn * step;
            if (++guard > 200) throw SeparatrixError(e);
        }
        if (sgn > 0) return chart_detail::bisect([&](double p) { return energy(qc, p) - e; }, lo, hi);
        return chart_detail::bisect([&](double p) { return energy(qc, p) - e; }, hi, lo);
    }

    // Coarse pass: classify the orbit and bracket its period. Fine pass from
    // the θ = 0 reference point: accumulate ∮ p dq and refine the closing
    // event by bisection inside the final step.
    Orbit trace_from(double q0, double p0, Regime hint) const {
        const double e = energy(q0, p0);
        chart_detail::OrbitState s{q0, p0, 0.0};
        double t = 0.0;
        double phi_prev = winding(q0, p0);
        double phi_acc = 0.0;
        Regime regime = Regime::libration;
        int direction = 1;
        bool closed = false;
        double t_close = 0.0;
        while (t < opt_.period_budget) {
            s = chart_detail::rk4(sys_, s, opt_.coarse_dt);
            t += opt_.coarse_dt;
            if (!std::isfinite(s.q) || !std::isfinite(s.p)) throw SeparatrixError(e);
            const double phi = winding(s.q, s.p);
            phi_acc += wrap_pm_pi(phi - phi_prev);
            phi_prev = phi;
            if (hint != Regime::rotation && std::abs(phi_acc) >= 2 * M_PI) {
                regime = Regime::libration;
                direction = phi_acc > 0 ? 1 : -1;
                closed = true;
                t_close = t;
                break;
            }
            if (hint != Regime::libration && std::abs(s.q - q0) >= 2 * M_PI) {
                regime = Regime::rotation;
                direction = s.q > q0 ? 1 : -1;
                closed = true;
                t_close = t;
                break;
            }
        }
        if (!closed) throw SeparatrixError(e);

        Orbit orb;
        orb.energy = e;
        orb.regime = regime;
        orb.direction = direction;
        if (regime == Regime::libration) {
            orb.ref_q = reference_q(e);
            orb.ref_p = opt_.center_p;
        } else {
            orb.ref_q = opt_.center_q;
            orb.ref_p = reference_p(e, direction);
        }

        const double dt = t_close / opt_.samples_per_orbit;
        chart_detail::OrbitState f{orb.ref_q, orb.ref_p, 0.0};
        const double target = 2 * M_PI * direction;
        double acc = 0.0;
        double prev = (regime == Regime::libration) ? winding(f.q, f.p) : f.q;
        double tf = 0.0;
        long guard = 0;
        const long guard_max = 16 * opt_.samples_per_orbit;
        while (true) {
            const chart_detail::OrbitState before = f;
            const double acc_before = acc;
            const double prev_before = prev;
            f = chart_detail::rk4(sys_, f, dt);
            tf += dt;
            if (regime == Regime::libration) {
                const double phi = winding(f.q, f.p);
                acc += wrap_pm_pi(phi - prev);
                prev = phi;
            } else {
                acc += f.q - prev;
                prev = f.q;
            }
            if ((direction > 0 && acc >= target) || (direction < 0 && acc <= target)) {
                auto deficit = [&](double h) {
                    const auto probe = chart_detail::rk4(sys_, before, h);
                    const double delta = (regime == Regime::libration)
                                             ? wrap_pm_pi(winding(probe.q, probe.p) - prev_before)
                                             : probe.q - prev_before;
                    return direction > 0 ? (acc_before + delta) - target
                                         : target - (acc_before + delta);
                };
                const double h_star = chart_detail::bisect(deficit, 0.0, dt);
                const auto closing = chart_detail::rk4(sys_, before, h_star);
                orb.period = tf - dt + h_star;
                orb.action = std::abs(closing.acc) / (2 * M_PI);
                break;
            }
            if (++guard > guard_max) throw SeparatrixError(e);
        }
        return orb;
    }

    Orbit orbit_at_energy(double e) const {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = orbits_.find(e);
            if (it != orbits_.end()) return it->second;
        }
        double q0, p0;
        if (regime_ == Regime::libration) {
            q0 = reference_q(e);
            p0 = opt_.center_p;
        } else {
            q0 = opt_.center_q;
            p0 = reference_p(e, direction_);
        }
        const Orbit orb = trace_from(q0, p0, regime_);
        cache_orbit(orb);
        return orb;
    }

    // Time of flight from (q, p) forward to the θ = 0 section crossing.
    double time_to_section(double q, double p, const Orbit& orb) const {
        const double dt = orb.period / opt_.samples_per_orbit;
        double target;
        if (orb.regime == Regime::libration) {
            const double phi_ref = winding(orb.ref_q, orb.ref_p);
            const double ahead = wrap_angle(static_cast<double>(orb.direction) *
                                            (phi_ref - winding(q, p)));
            target = (ahead == 0.0 ? 2 * M_PI : ahead) * orb.direction;
        } else {
            const double ahead = wrap_angle(static_cast<double>(orb.direction) * (orb.ref_q - q));
            target = (ahead == 0.0 ? 2 * M_PI : ahead) * orb.direction;
        }
        chart_detail::OrbitState s{q, p, 0.0};
        double acc = 0.0;
        double prev = (orb.regime == Regime::libration) ? winding(q, p) : q;
        double t = 0.0;
        long guard = 0;
        const long guard_max = 16 * opt_.samples_per_orbit;
        while (true) {
            const chart_detail::OrbitState before = s;
            const double acc_before = acc;
            const double prev_before = prev;
            s = chart_detail::rk4(sys_, s, dt);
            t += dt;
            if (orb.regime == Regime::libration) {
                const double phi = winding(s.q, s.p);
                acc += wrap_pm_pi(phi - prev);
                prev = phi;
            } else {
                acc += s.q - prev;
                prev = s.q;
            }
            if ((orb.direction > 0 && acc >= target) || (orb.direction < 0 && acc <= target)) {
                auto deficit = [&](double h) {
                    const auto probe = chart_detail::rk4(sys_, before, h);
                    const double delta = (orb.regime == Regime::libration)
                                             ? wrap_pm_pi(winding(probe.q, probe.p) - prev_before)
                                             : probe.q - prev_before;
                    return orb.direction > 0 ? (acc_before + delta) - target
                                             : target - (acc_before + delta);
                };
                const double h_star = chart_detail::bisect(deficit, 0.0, dt);
                return t - dt + h_star;
            }
            if (++guard > guard_max) throw SeparatrixError(orb.energy);
        }
    }

    // Action at energy e, treating out-of-band energies (separatrix blowups,
    // missing turning points) as unreachable from below.
    double action_at(double e, bool* valid) const {
        *valid = true;
        if (regime_ == Regime::libration && e <= e_center_) return 0.0;
        try {
            return orbit_at_energy(e).action;
        } catch (const std::exception&) {
            *valid = false;
            return 0.0;
        }
    }

    double solve_energy(double target) const {
        // I(E) is monotone increasing in both regimes; bracket then bisect.
        // Energies past the regime band count as "action above target".
        double lo, hi;
        bool ok = true;
        if (regime_ == Regime::libration) {
            lo = e_center_;
            hi = e_center_ + 0.5;
            int guard = 0;
            while (true) {
                const double a = action_at(hi, &ok);
                if (!ok || a >= target) break;
                lo = hi;
                hi = e_center_ + 2 * (hi - e_center_);
                if (++guard > 100) throw SeparatrixError(hi);
            }
        } else {
            double e_probe;
            {
                std::lock_guard<std::mutex> lock(mu_);
                e_probe = orbits_.empty() ? e_center_ + 1.0 : orbits_.begin()->second.energy;
            }
            lo = hi = e_probe;
            double step = std::max(0.5, std::abs(e_probe - e_center_));
            int guard = 0;
            while (action_at(hi, &ok) < target && ok) {
                lo = hi;
                hi += step;
                step *= 2;
                if (++guard > 100) throw SeparatrixError(hi);
            }
            guard = 0;
            step = std::max(0.5, std::abs(e_probe - e_center_));
            while (true) {
                const double a = action_at(lo, &ok);
                if (ok && a <= target) break;
                const double next = lo - step;
                bool next_ok = true;
                action_at(next, &next_ok);
                if (!next_ok) {
                    step *= 0.5;  // stepping over the band edge; shrink toward it
                    if (step < 1e-12) throw SeparatrixError(lo);
                } else {
                    lo = next;
                }
                if (++guard > 300) throw SeparatrixError(lo);
            }
        }
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            const double a = action_at(mid, &ok);
            if (ok && a < target) lo = mid; else hi = mid;
            if (hi - lo < 1e-14 * std::max(1.0, std::abs(mid))) break;
        }
        return lo == e_center_ ? hi : lo;
    }

    void cache_orbit(const Orbit& orb) const {
        std::lock_guard<std::mutex> lock(mu_);
        orbits_[orb.energy] = orb;
    }

    dynamics::CanonicalSystem sys_;
    ChartOptions opt_;
    Regime regime_ = Regime::libration;
    int direction_ = 1;
    double e_center_ = 0.0;
    mutable std::map<double, Orbit> orbits_;
    mutable std::map<double, double> action_to_energy_;
    mutable std::mutex mu_;
};

// Builds a numeric chart through the probe point. The regime (libration or
// rotation) is detected from the probe orbit unless forced by the options.
inline ActionAngleChart build_chart_numeric(const dynamics::CanonicalSystem& sys,
                                            const core::KahlerVector& probe,
                                            ChartOptions opt = {}) {
    return NumericChart::as_chart(std::make_shared<NumericChart>(sys, probe, opt));
}

// ------------------------------- KvN encoding --------------------------------

// ψ_k = √(I_k / c) e^{-iθ_k} with c = Σ I_k, so the state is unit norm and the
// scale c restores physical action magnitudes on readout.
struct KvnState {
    core::QuantumState state;
    double scale = 1.0;
};

inline KvnState kvn_encode(const Vector& actions, const Vector& angles) {
    if (actions.size() != angles.size() || actions.size() == 0) {
        throw std::invalid_argument("kvn_encode: actions and angles must have equal positive length");
    }
    if ((actions.array() < 0).any()) {
        throw std::invalid_argument("kvn_encode: actions must be nonnegative");
    }
    const double c = actions.sum();
    if (c <= 0.0) throw std::invalid_argument("kvn_encode: all-zero action vector");
    CVector amps(actions.size());
    for (Eigen::Index k = 0; k < actions.size(); ++k) {
        amps[k] = std::polar(std::sqrt(actions[k] / c), -angles[k]);
    }
    return KvnState{core::QuantumState(std::move(amps)), c};
}

// (I_k, θ_k) = (|ψ_k|²·c, -arg ψ_k mod 2π); the angle of an unoccupied mode
// is reported as 0.
inline std::pair<Vector, Vector> kvn_decode(const core::QuantumState& state, double scale) {
    Vector actions(state.dim()), angles(state.dim());
    for (Eigen::Index k = 0; k < state.dim(); ++k) {
        const auto a = state.amplitudes[k];
        actions[k] = std::norm(a) * scale;
        angles[k] = (actions[k] > 0.0) ? wrap_angle(-std::arg(a)) : 0.0;
    }
    return {actions, angles};
}

// u_k = e^{-i ω_k dt}, the diagonal unitary generated by frequencies ω.
inline CVector diagonal_unitary(const Vector& omega, double dt) {
    CVector u(omega.size());
    for (Eigen::Index k = 0; k < omega.size(); ++k) u[k] = std::polar(1.0, -omega[k] * dt);
    return u;
}

inline core::QuantumState apply_diagonal(const core::QuantumState& state, const CVector& u) {
    if (state.dim() != u.size()) throw std::invalid_argument("apply_diagonal: size mismatch");
    return core::QuantumState(state.amplitudes.cwiseProduct(u));
}

// --------------------------------- ensembles ---------------------------------

// N_s phase-space trajectories of N modes each; rows index trajectories.
struct ActionAngleEnsemble {
    Matrix actions;  // N_s × N, nonnegative
    Matrix angles;   // N_s × N, wrapped to [0, 2π)

    ActionAngleEnsemble() = default;
    ActionAngleEnsemble(Matrix acts, Matrix angs)
        : actions(std::move(acts)), angles(std::move(angs)) {
        if (actions.rows() != angles.rows() || actions.cols() != angles.cols() ||
            actions.rows() == 0 || actions.cols() == 0) {
            throw std::invalid_argument("ActionAngleEnsemble: shape mismatch or empty");
        }
        if ((actions.array() < 0).any()) {
            throw std::invalid_argument("ActionAngleEnsemble: actions must be nonnegative");
        }
        for (Eigen::Index j = 0; j < angles.rows(); ++j)
            for (Eigen::Index k = 0; k < angles.cols(); ++k) angles(j, k) = wrap_angle(angles(j, k));
    }

    Eigen::Index n_traj() const { return actions.rows(); }
    Eigen::Index n_modes() const { return actions.cols(); }
    Vector scales() const { return actions.rowwise().sum(); }
};

// CSV with columns (j, k, I, theta), one row per mode of each trajectory.
inline std::string write_ensemble_csv(const ActionAngleEnsemble& ens) {
    std::string out = "j,k,I,theta\n";
    for (Eigen::Index j = 0; j < ens.n_traj(); ++j) {
        for (Eigen::Index k = 0; k < ens.n_modes(); ++k) {
            out += std::to_string(j) + ',' + std::to_string(k) + ',' +
                   io::format_value(ens.actions(j, k)) + ',' + io::format_value(ens.angles(j, k)) +
                   '\n';
        }
    }
    return out;
}

inline ActionAngleEnsemble read_ensemble_csv(std::istream& in) {
    const auto rows = io::parse_numeric_rows(in, "ensemble");
    if (rows.empty()) throw std::runtime_error("ensemble: no data rows");
    if (rows.front().size() != 4) throw std::runtime_error("ensemble: expected columns j,k,I,theta");
    Eigen::Index n_traj = 0, n_modes = 0;
    for (const auto& r : rows) {
        n_traj = std::max(n_traj, static_cast<Eigen::Index>(r[0]) + 1);
        n_modes = std::max(n_modes, static_cast<Eigen::Index>(r[1]) + 1);
    }
    Matrix actions = Matrix::Zero(n_traj, n_modes);
    Matrix angles = Matrix::Zero(n_traj, n_modes);
    for (const auto& r : rows) {
        const auto j = static_cast<Eigen::Index>(r[0]);
        const auto k = static_cast<Eigen::Index>(r[1]);
        actions(j, k) = r[2];
        angles(j, k) = r[3];
    }
    return ActionAngleEnsemble(std::move(actions), std::move(angles));
}

inline ActionAngleEnsemble read_ensemble_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_ensemble_csv(in);
}

// ------------------------------ encoded ensembles ----------------------------

enum class Encoding { separable, entangled };

inline Encoding encoding_from_string(const std::string& s) {
    if (s == "separable") return Encoding::separable;
    if (s == "entangled") return Encoding::entangled;
    throw std::invalid_argument("unknown encoding: " + s);
}

// Quantum encoding of an ensemble. Blocks hold the per-trajectory amplitude
// slices: unit norm each for the separable product state, and carrying the
// global 1/√N_s factor for the entangled state (block j occupies entries
// jN … jN+N-1 of the joint vector).
struct EncodedState {
    Encoding kind = Encoding::separable;
    Eigen::Index n_modes = 0;
    std::vector<CVector> blocks;
    Vector scales;  // per-trajectory c_j

    Eigen::Index n_traj() const { return static_cast<Eigen::Index>(blocks.size()); }

    CVector joint() const {
        CVector out(n_modes * n_traj());
        for (Eigen::Index j = 0; j < n_traj(); ++j)
            out.segment(j * n_modes, n_modes) = blocks[static_cast<size_t>(j)];
        return out;
    }

    double block_weight(Eigen::Index j) const {
        return blocks[static_cast<size_t>(j)].squaredNorm();
    }
};

inline EncodedState encode_ensemble(const ActionAngleEnsemble& ens, Encoding kind) {
    EncodedState enc;
    enc.kind = kind;
    enc.n_modes = ens.n_modes();
    enc.scales = ens.scales();
    const double root_ns = std::sqrt(static_cast<double>(ens.n_traj()));
    enc.blocks.reserve(static_cast<size_t>(ens.n_traj()));
    for (Eigen::Index j = 0; j < ens.n_traj(); ++j) {
        const KvnState kvn = kvn_encode(ens.actions.row(j), ens.angles.row(j));
        CVector block = kvn.state.amplitudes;
        if (kind == Encoding::entangled) block /= root_ns;
        enc.blocks.push_back(std::move(block));
    }
    return enc;
}

inline ActionAngleEnsemble decode_ensemble(const EncodedState& enc) {
    Matrix actions(enc.n_traj(), enc.n_modes);
    Matrix angles(enc.n_traj(), enc.n_modes);
    const double ns = static_cast<double>(enc.n_traj());
    for (Eigen::Index j = 0; j < enc.n_traj(); ++j) {
        CVector block = enc.blocks[static_cast<size_t>(j)];
        if (enc.kind == Encoding::entangled) block *= std::sqrt(ns);
        const auto [acts, angs] = kvn_decode(core::QuantumState(block), enc.scales[j]);
        actions.row(j) = acts;
        angles.row(j) = angs;
    }
    return ActionAngleEnsemble(std::move(actions), std::move(angles));
}

// Advances every trajectory block by `steps` applications of the diagonal
// unitary built from its frequency row. The composition of identical diagonal
// unitaries is applied as a single accumulated phase, which keeps action
// magnitudes exactly invariant over arbitrarily many steps.
inline EncodedState evolve_encoded(const EncodedState& enc, const Matrix& omega, double dt,
                                   int64_t steps = 1) {
    if (omega.rows() != enc.n_traj() || omega.cols() != enc.n_modes) {
        throw std::invalid_argument("evolve_encoded: frequency layout does not match the encoding");
    }
    EncodedState out = enc;
    const double span = dt * static_cast<double>(steps);
    for (Eigen::Index j = 0; j < enc.n_traj(); ++j) {
        const CVector u = diagonal_unitary(omega.row(j), span);
        out.blocks[static_cast<size_t>(j)] =
            enc.blocks[static_cast<size_t>(j)].cwiseProduct(u);
    }
    return out;
}

// Shared frequencies across trajectories: the entangled evolution operator is
// the identity on the trajectory index tensored with one diagonal unitary.
inline EncodedState evolve_encoded(const EncodedState& enc, const Vector& omega, double dt,
                                   int64_t steps = 1) {
    return evolve_encoded(enc, Matrix(omega.transpose().replicate(enc.n_traj(), 1)), dt, steps);
}

// ----------------------------- resource accounting ---------------------------

struct ResourceEstimate {
    long qubits = 0;
    long depth = 0;       // per full evolution, ∝ N per step, independent of N_s
    long gate_units = 0;  // diagonal-unitary applications at cost N each
};

inline long log2_ceil(long x) {
    if (x < 1) throw std::invalid_argument("log2_ceil: positive argument required");
    long bits = 0;
    long v = 1;
    while (v < x) { v <<= 1; ++bits; }
    return bits;
}

// Width and cost model for evolving an (N modes, N_s trajectories) ensemble
// over N_t steps. Non-power-of-two sizes round the qubit counts up.
inline ResourceEstimate resource_estimate(long n_modes, long n_traj, long n_steps, Encoding kind) {
    if (n_modes < 1 || n_traj < 1 || n_steps < 0) {
        throw std::invalid_argument("resource_estimate: sizes must be positive");
    }
    ResourceEstimate r;
    if (kind == Encoding::separable) {
        r.qubits = n_traj * log2_ceil(n_modes);
        r.gate_units = n_traj * n_modes * n_steps;
    } else {
        r.qubits = log2_ceil(n_modes) + log2_ceil(n_traj);
        r.gate_units = n_modes * n_steps;
    }
    r.depth = n_modes * n_steps;
    return r;
}

}  // namespace hamsym::integrable
