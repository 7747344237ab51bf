#include <catch2/catch.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "hamsym/lie.hpp"

using namespace hamsym;
using integrable::ActionAngleEnsemble;
using lie::NearIntegrableSystem;
using lie::W1Value;

namespace {

// test-local Simpson quadrature of -∫ H1 along the unperturbed orbit
double w1_by_quadrature(const lie::TwistMode& mode, double action, double theta0, double t0,
                        double t, int n = 4000) {
    const double w0 = mode.omega0(action);
    const double h = (t - t0) / n;
    auto h1 = [&](double s) {
        return mode.perturbation.value(action, theta0 + w0 * (s - t0), s);
    };
    double sum = h1(t0) + h1(t);
    for (int i = 1; i < n; ++i) sum += h1(t0 + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return -sum * h / 3.0;
}

ActionAngleEnsemble single_point(double action, double angle) {
    lie::Matrix a(1, 1), th(1, 1);
    a << action;
    th << angle;
    return ActionAngleEnsemble(a, th);
}

// two independent twist modes with autonomous cosine perturbations
NearIntegrableSystem two_mode_autonomous(double eps) {
    auto make_mode = [](double strength) {
        lie::TwistMode mode;
        mode.h0 = [](double i) { return 0.5 * i * i; };
        mode.omega0 = [](double i) { return i; };
        mode.domega0 = [](double) { return 1.0; };
        mode.perturbation = lie::cosine_perturbation(
            1, 0.0, [strength](double) { return lie::Complex(strength / 2, 0.0); },
            [](double) { return lie::Complex(0.0, 0.0); });
        return mode;
    };
    return NearIntegrableSystem({make_mode(1.0), make_mode(0.8)}, eps);
}

double fit_exponent(const std::vector<double>& xs, const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto n = static_cast<double>(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double x = std::log(xs[i]);
        const double y = std::log(ys[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("zeta values used by the effective epsilon bound") {
    CHECK(lie::riemann_zeta(2.0) == Approx(M_PI * M_PI / 6.0).margin(1e-12));
    CHECK(lie::riemann_zeta(3.0) == Approx(1.2020569031595943).margin(1e-12));
    CHECK(lie::riemann_zeta(4.0) == Approx(std::pow(M_PI, 4) / 90.0).margin(1e-12));
}

TEST_CASE("effective epsilon") {
    CHECK(lie::effective_epsilon(0.1, 0.01, 1) == Approx(3.2899e-3).epsilon(1e-4));
    CHECK(lie::effective_epsilon(0.1, 0.0, 1) == 0.0);
    CHECK(lie::effective_epsilon(0.05, 0.2, 2) ==
          Approx(2.0 * lie::effective_epsilon(0.05, 0.1, 2)).margin(1e-15));
    CHECK_THROWS_AS(lie::effective_epsilon(0.1, 0.01, 0), std::invalid_argument);
}

TEST_CASE("perturbation reality from conjugate pairing") {
    const auto sys = lie::twist_system(0.1, 1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> act(0.2, 2.0), ang(0.0, 2 * M_PI), tt(-5.0, 5.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double defect = sys.modes[0].perturbation.reality_defect(act(rng), ang(rng), tt(rng));
        CHECK(defect <= 1e-10);
    }
    // H1 = cos(theta - omega t) by construction
    CHECK(sys.modes[0].perturbation.value(1.3, 0.7, 0.2) == Approx(std::cos(0.7 - 0.2)).margin(1e-14));
}

TEST_CASE("w1 window closed form") {
    const auto sys = lie::twist_system(0.1, 1.0);
    const auto& mode = sys.modes[0];

    SECTION("t = t0 gives zero value and partials") {
        const W1Value w = lie::w1_window(mode, 1.3, 0.4, 0.7, 0.7);
        CHECK(w.value == 0.0);
        CHECK(w.dtheta == 0.0);
        CHECK(w.dI == 0.0);
    }

    SECTION("matches along-orbit quadrature off resonance") {
        for (auto [action, theta0, t0, t] : {std::tuple{1.7, 0.4, 0.0, 1.3},
                                             std::tuple{0.6, 2.1, 0.4, 1.9},
                                             std::tuple{2.3, 5.5, -0.8, 0.9}}) {
            const double oracle = w1_by_quadrature(mode, action, theta0, t0, t);
            const W1Value w = lie::w1_window(mode, action, theta0, t0, t);
            CHECK(w.value == Approx(oracle).margin(1e-8));
        }
    }

    SECTION("partials agree with finite differences of the closed form") {
        const double action = 1.45, theta0 = 1.1, t0 = 0.3, t = 1.2, h = 1e-6;
        const W1Value w = lie::w1_window(mode, action, theta0, t0, t);
        const double fd_th = (lie::w1_window(mode, action, theta0 + h, t0, t).value -
                              lie::w1_window(mode, action, theta0 - h, t0, t).value) / (2 * h);
        const double fd_i = (lie::w1_window(mode, action + h, theta0, t0, t).value -
                             lie::w1_window(mode, action - h, theta0, t0, t).value) / (2 * h);
        CHECK(w.dtheta == Approx(fd_th).margin(1e-8));
        CHECK(w.dI == Approx(fd_i).margin(1e-8));
    }

    SECTION("exact resonance reduces to the finite limit form") {
        const double omega_drive = 1.0;
        const double action = omega_drive;  // Ω = ω0 - ω_drive = 0
        for (auto [theta0, t0, dt] : {std::tuple{0.3, 0.0, 0.5}, std::tuple{2.2, 0.7, 1.1}}) {
            const W1Value w = lie::w1_window(mode, action, theta0, t0, t0 + dt);
            const double limit = -dt * std::cos(theta0 - omega_drive * t0);
            CHECK(w.value == Approx(limit).margin(1e-10));
        }
    }

    SECTION("branches join continuously at the switch threshold") {
        const double dt = 0.5, t0 = 0.2;
        // plant Ω·dt just below and just above the 1e-4 switch
        for (double x : {0.5e-4, 0.99e-4, 1.01e-4, 2.0e-4}) {
            const double action = 1.0 + x / dt;
            const W1Value w = lie::w1_window(mode, action, 0.9, t0, t0 + dt);
            const W1Value w_taylor = lie::w1_window(mode, action, 0.9, t0, t0 + dt, 1.0);
            CHECK(w.value == Approx(w_taylor.value).margin(1e-8));
            CHECK(w.dtheta == Approx(w_taylor.dtheta).margin(1e-8));
            CHECK(w.dI == Approx(w_taylor.dI).margin(1e-8));
        }
    }

    SECTION("reality holds at random probes") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> act(0.3, 2.5), ang(0.0, 2 * M_PI);
        for (int rep = 0; rep < 20; ++rep) {
            const W1Value w = lie::w1_window(mode, act(rng), ang(rng), 0.1, 1.4);
            CHECK(w.imag_residual <= 1e-10);
        }
    }
}

TEST_CASE("stationary w1 solves the autonomous bracket equation") {
    const auto sys = two_mode_autonomous(0.1);
    const auto& mode = sys.modes[0];
    const double action = 1.3, h = 1e-6;

    // {W1, H0} = ω0 ∂W1/∂θ must equal -H1 pointwise
    for (double theta : {0.3, 1.7, 4.2}) {
        const W1Value w = lie::w1_stationary(mode, action, theta);
        CHECK(mode.omega0(action) * w.dtheta ==
              Approx(-mode.perturbation.value(action, theta, 0.0)).margin(1e-12));
        const double fd_th = (lie::w1_stationary(mode, action, theta + h).value -
                              lie::w1_stationary(mode, action, theta - h).value) / (2 * h);
        const double fd_i = (lie::w1_stationary(mode, action + h, theta).value -
                             lie::w1_stationary(mode, action - h, theta).value) / (2 * h);
        CHECK(w.dtheta == Approx(fd_th).margin(1e-8));
        CHECK(w.dI == Approx(fd_i).margin(1e-8));
        CHECK(w.imag_residual <= 1e-10);
    }

    CHECK_THROWS_AS(lie::w1_stationary(mode, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("transform and inverse") {
    SECTION("epsilon zero is the identity") {
        const auto sys = lie::twist_system(0.0, 1.0);
        const lie::Vector actions = (lie::Vector(1) << 1.3).finished();
        const lie::Vector angles = (lie::Vector(1) << 0.8).finished();
        const auto [ai, th] = lie::transform(sys, actions, angles, 0.9);
        CHECK(ai[0] == 1.3);
        CHECK(th[0] == 0.8);
    }

    SECTION("round-trip residual scales as epsilon squared") {
        const lie::Vector actions = (lie::Vector(1) << 1.37).finished();
        const lie::Vector angles = (lie::Vector(1) << 2.2).finished();
        std::vector<double> epses{0.02, 0.01, 0.005};
        std::vector<double> residuals;
        for (double eps : epses) {
            const auto sys = lie::twist_system(eps, 1.0);
            const auto [ab, tb] = lie::transform(sys, actions, angles, 0.7);
            const auto [ar, tr] = lie::inverse_transform(sys, ab, tb, 0.7);
            residuals.push_back(std::hypot(ar[0] - actions[0], tr[0] - angles[0]));
        }
        CHECK(residuals[0] / residuals[1] == Approx(4.0).epsilon(0.25));
        CHECK(residuals[1] / residuals[2] == Approx(4.0).epsilon(0.25));
        CHECK(fit_exponent(epses, residuals) == Approx(2.0).margin(0.25));
    }

    SECTION("barred action is quieter than the raw action along the true flow") {
        // max-deviation scaling under epsilon halving: barred ~ eps^2, raw ~ eps
        auto deviations = [](double eps) {
            const auto sys = lie::twist_system(eps, 1.0);
            const auto canonical = lie::to_canonical(sys);
            lie::Vector q = (lie::Vector(1) << 0.75).finished();   // theta
            lie::Vector p = (lie::Vector(1) << 1.55).finished();   // action
            const double i0 = p[0];
            const auto [b0, bth0] = lie::transform(sys, p, q, 0.0);
            double raw = 0.0, barred = 0.0;
            const double dt = 0.01;
            for (int i = 0; i < 1500; ++i) {
                dynamics::rk4_step(canonical, q, p, i * dt, dt);
                const double t = (i + 1) * dt;
                const auto [bi, bth] = lie::transform(
                    sys, p, (lie::Vector(1) << integrable::wrap_angle(q[0])).finished(), t);
                raw = std::max(raw, std::abs(p[0] - i0));
                barred = std::max(barred, std::abs(bi[0] - b0[0]));
            }
            return std::make_pair(raw, barred);
        };
        const auto [raw_full, barred_full] = deviations(0.02);
        const auto [raw_half, barred_half] = deviations(0.01);
        CHECK(raw_full / raw_half == Approx(2.0).margin(0.4));
        CHECK(barred_full / barred_half == Approx(4.0).margin(1.2));
        CHECK(barred_full < 0.35 * raw_full);
    }
}

TEST_CASE("lie step") {
    SECTION("epsilon zero is exact integrable drift") {
        const auto sys = lie::twist_system(0.0, 1.0);
        const auto ens = single_point(1.25, 0.6);
        const auto next = lie::lie_step(ens, sys, 0.0, 0.37);
        CHECK(next.actions(0, 0) == 1.25);
        CHECK(next.angles(0, 0) == Approx(integrable::wrap_angle(0.6 + 1.25 * 0.37)).margin(1e-15));
    }

    SECTION("one-step deviation from the reference flow scales as eps times dt squared") {
        std::vector<double> log_eps, log_dt, log_dev;
        for (double eps : {0.005, 0.01, 0.02}) {
            for (double dt : {0.1, 0.2, 0.4}) {
                const auto sys = lie::twist_system(eps, 1.0);
                const auto canonical = lie::to_canonical(sys);
                const double t0 = 0.3;
                const auto stepped = lie::lie_step(single_point(1.3, 0.7), sys, t0, dt);
                lie::Vector q = (lie::Vector(1) << 0.7).finished();
                lie::Vector p = (lie::Vector(1) << 1.3).finished();
                const int sub = 64;
                for (int s = 0; s < sub; ++s)
                    dynamics::rk4_step(canonical, q, p, t0 + s * dt / sub, dt / sub);
                const double dev = std::hypot(
                    stepped.actions(0, 0) - p[0],
                    integrable::wrap_pm_pi(stepped.angles(0, 0) - integrable::wrap_angle(q[0])));
                log_eps.push_back(eps);
                log_dt.push_back(dt);
                log_dev.push_back(dev);
            }
        }
        // two-variable least squares on log(dev) = a log(eps) + b log(dt) + c
        double a11 = 0, a12 = 0, a13 = 0, a22 = 0, a23 = 0, a33 = 0;
        double b1 = 0, b2 = 0, b3 = 0;
        for (size_t i = 0; i < log_dev.size(); ++i) {
            const double x = std::log(log_eps[i]);
            const double y = std::log(log_dt[i]);
            const double z = std::log(log_dev[i]);
            a11 += x * x; a12 += x * y; a13 += x;
            a22 += y * y; a23 += y; a33 += 1;
            b1 += x * z; b2 += y * z; b3 += z;
        }
        Eigen::Matrix3d m;
        m << a11, a12, a13, a12, a22, a23, a13, a23, a33;
        const Eigen::Vector3d rhs(b1, b2, b3);
        const Eigen::Vector3d coef = m.ldlt().solve(rhs);
        CHECK(coef[0] == Approx(1.0).margin(0.25));  // epsilon exponent
        CHECK(coef[1] == Approx(2.0).margin(0.25));  // dt exponent
    }

    SECTION("run accounting: eps_t is the exact sum of per-step eps_prime") {
        const auto sys = lie::twist_system(0.03, 1.0);
        const auto run = lie::lie_run(single_point(1.4, 0.2), sys, 0.0, 0.05, 40);
        REQUIRE(run.reports.size() == 40);
        double total = 0.0;
        for (const auto& rep : run.reports) {
            total += rep.eps_prime;
            CHECK_FALSE(rep.validity_warning);
        }
        CHECK(run.reports.back().eps_total == Approx(total).margin(1e-12));
        CHECK(run.reports.back().eps_total ==
              Approx(40 * lie::effective_epsilon(0.03, 0.05, 1)).margin(1e-12));
    }

    SECTION("validity warning fires when the per-step budget is large") {
        const auto sys = lie::twist_system(0.4, 1.0);
        lie::LieStepReport rep;
        lie::lie_step(single_point(2.5, 0.3), sys, 0.0, 0.5, &rep);
        CHECK(rep.validity_warning);
    }

    SECTION("negative transformed action carries the trajectory index") {
        const auto sys = lie::twist_system(0.9, 1.0);
        lie::Matrix acts(2, 1), angs(2, 1);
        acts << 2.0, 1e-5;
        angs << 0.2, 5.8;
        bool threw = false;
        for (double dt : {0.4, 0.8, 1.2, 1.6}) {
            try {
                lie::lie_step(ActionAngleEnsemble(acts, angs), sys, 0.0, dt);
            } catch (const lie::NegativeActionError& e) {
                threw = true;
                CHECK(e.trajectory == 1);
                break;
            }
        }
        CHECK(threw);
    }

    SECTION("one-step map is symplectic up to epsilon squared") {
        std::vector<double> epses{0.01, 0.02, 0.04};
        std::vector<double> defects;
        for (double eps : epses) {
            const auto sys = lie::twist_system(eps, 1.0);
            auto flowmap = [&](const core::KahlerVector& z) {
                // q slot carries theta, p slot carries action
                const auto next = lie::lie_step(single_point(z.p[0], z.q[0]), sys, 0.0, 0.25);
                return core::KahlerVector((lie::Vector(1) << next.angles(0, 0)).finished(),
                                          (lie::Vector(1) << next.actions(0, 0)).finished());
            };
            defects.push_back(dynamics::symplectic_defect(
                flowmap, core::KahlerVector((lie::Vector(1) << 0.9).finished(),
                                            (lie::Vector(1) << 1.35).finished()),
                1e-5));
        }
        CHECK(defects[1] / defects[0] == Approx(4.0).epsilon(0.25));
        CHECK(defects[2] / defects[1] == Approx(4.0).epsilon(0.25));
    }
}

TEST_CASE("chart-backed mode reproduces the analytic twist data") {
    const auto chart = integrable::harmonic_chart();
    const auto pert = lie::cosine_perturbation(
        1, 0.0, [](double) { return lie::Complex(0.5, 0.0); },
        [](double) { return lie::Complex(0.0, 0.0); });
    const auto mode = lie::twist_mode_from_chart(chart, dynamics::harmonic_system(), pert);
    // harmonic oscillator: H0(I) = I, omega0 = 1, flat twist
    CHECK(mode.h0(0.8) == Approx(0.8).margin(1e-10));
    CHECK(mode.omega0(0.8) == Approx(1.0).margin(1e-10));
    CHECK(mode.domega0(0.8) == Approx(0.0).margin(1e-6));
}

TEST_CASE("w2 quadrature hook") {
    const auto sys = lie::twist_system(0.1, 1.0);
    CHECK(lie::w2_quadrature(sys.modes[0], 1.4, 0.3, 0.2, 0.2) == 0.0);
    const double at_resonance = lie::w2_quadrature(sys.modes[0], 1.0, 0.3, 0.0, 0.8);
    CHECK(std::isfinite(at_resonance));
    const double off = lie::w2_quadrature(sys.modes[0], 1.6, 0.3, 0.0, 0.8);
    CHECK(std::isfinite(off));
}

TEST_CASE("transformed observables") {
    const auto ens = [] {
        lie::Matrix acts(2, 2), angs(2, 2);
        acts << 1.4, 0.9, 0.7, 1.8;
        angs << 0.5, 2.0, 3.4, 1.1;
        return ActionAngleEnsemble(acts, angs);
    }();
    observables::CMatrix block(2, 2);
    block << 0.3, lie::Complex(0.2, 0.1), lie::Complex(0.2, -0.1), -0.4;
    const auto f = observables::BlockObservable::shared(block, 2);

    SECTION("epsilon zero: both forms equal the unperturbed expectation") {
        const auto sys = two_mode_autonomous(0.0);
        const double direct = lie::observable_transformed(f, ens);
        const double pulled = lie::first_order_pullback(f, ens, sys);
        const auto enc = integrable::encode_ensemble(ens, integrable::Encoding::entangled);
        const double reference = observables::expectation(enc, f, true);
        CHECK(direct == Approx(reference).margin(1e-12));
        CHECK(pulled == Approx(reference).margin(1e-12));
    }

    SECTION("diagonal blocks reduce to the first-order action correction") {
        observables::CMatrix diag = observables::CMatrix::Zero(2, 2);
        diag(0, 0) = 0.7;
        diag(1, 1) = -0.2;
        const auto fd = observables::BlockObservable::shared(diag, 2);
        const auto sys = two_mode_autonomous(0.05);
        const double pulled = lie::first_order_pullback(fd, ens, sys);
        double oracle = 0.0;
        for (Eigen::Index j = 0; j < 2; ++j)
            for (Eigen::Index k = 0; k < 2; ++k) {
                const auto w = lie::w1_stationary(sys.modes[static_cast<size_t>(k)],
                                                  ens.actions(j, k), ens.angles(j, k));
                oracle += diag(k, k).real() * (ens.actions(j, k) - sys.epsilon * w.dtheta);
            }
        CHECK(pulled == Approx(oracle / 2.0).margin(1e-13));
    }

    SECTION("pullback differs from the transformed evaluation at order epsilon squared") {
        std::vector<double> epses{0.02, 0.01, 0.005};
        std::vector<double> gaps;
        for (double eps : epses) {
            const auto sys = two_mode_autonomous(eps);
            const auto barred = lie::transform_stationary(sys, ens);
            gaps.push_back(std::abs(lie::first_order_pullback(f, ens, sys) -
                                    lie::observable_transformed(f, barred)));
        }
        CHECK(gaps[0] / gaps[1] == Approx(4.0).epsilon(0.25));
        CHECK(gaps[1] / gaps[2] == Approx(4.0).epsilon(0.25));
    }

    SECTION("zero action with off-diagonal entries is singular") {
        lie::Matrix acts(1, 2), angs(1, 2);
        acts << 0.0, 1.0;
        angs << 0.1, 0.2;
        const ActionAngleEnsemble degenerate(acts, angs);
        const auto sys = two_mode_autonomous(0.05);
        const auto f1 = observables::BlockObservable::shared(block, 1);
        CHECK_THROWS_AS(lie::first_order_pullback(f1, degenerate, sys), lie::SingularActionError);
    }
}

TEST_CASE("observable evolution equation") {
    observables::CMatrix block(2, 2);
    block << 0.3, lie::Complex(0.2, 0.1), lie::Complex(0.2, -0.1), -0.4;

    SECTION("diagonal observable with epsilon zero has zero derivative") {
        observables::CMatrix diag = observables::CMatrix::Zero(2, 2);
        diag(0, 0) = 1.1;
        diag(1, 1) = 0.4;
        const auto sys = two_mode_autonomous(0.0);
        lie::Matrix acts(1, 2), angs(1, 2);
        acts << 1.3, 0.8;
        angs << 0.4, 1.9;
        const ActionAngleEnsemble ens(acts, angs);
        CHECK(lie::observable_rhs(observables::BlockObservable::shared(diag, 1), ens, sys) ==
              Approx(0.0).margin(1e-14));
    }

    SECTION("epsilon zero off-diagonal matches the phase-mixing derivative") {
        const auto sys = two_mode_autonomous(0.0);
        lie::Matrix acts(1, 2), angs(1, 2);
        acts << 1.3, 0.8;
        angs << 0.4, 1.9;
        const ActionAngleEnsemble ens(acts, angs);
        const auto f = observables::BlockObservable::shared(block, 1);
        const double rhs = lie::observable_rhs(f, ens, sys);

        // finite-difference oracle on the unperturbed drift
        auto value_at = [&](double dt) {
            lie::Matrix a = acts, th = angs;
            th(0, 0) = integrable::wrap_angle(angs(0, 0) + acts(0, 0) * dt);  // omega0 = I
            th(0, 1) = integrable::wrap_angle(angs(0, 1) + acts(0, 1) * dt);
            return lie::observable_transformed(f, ActionAngleEnsemble(a, th));
        };
        const double h = 1e-4;
        const double fd = (value_at(h) - value_at(-h)) / (2 * h);
        CHECK(rhs == Approx(fd).margin(1e-6));
    }

    SECTION("full equation matches the pullback derivative at order epsilon squared") {
        lie::Matrix acts(1, 2), angs(1, 2);
        acts << 1.4, 0.9;
        angs << 0.5, 2.0;
        const auto f = observables::BlockObservable::shared(block, 1);

        auto residual_for = [&](double eps) {
            const auto sys = two_mode_autonomous(eps);
            const auto canonical = lie::to_canonical(sys);
            // evolve the true flow to a probe time, then compare the analytic
            // rhs with a finite-difference derivative of the pullback
            lie::Vector q = angs.row(0), p = acts.row(0);
            const double dt = 1e-3;
            for (int i = 0; i < 400; ++i) dynamics::rk4_step(canonical, q, p, i * dt, dt);
            const double h = 1e-4;
            auto pullback_at = [&](double offset) {
                lie::Vector qq = q, pp = p;
                const long sub = 8;
                const double hh = offset / sub;
                if (offset != 0.0)
                    for (long s = 0; s < sub; ++s)
                        dynamics::rk4_step(canonical, qq, pp, 0.4 + s * hh, hh);
                lie::Matrix a(1, 2), th(1, 2);
                a = pp.transpose();
                th << integrable::wrap_angle(qq[0]), integrable::wrap_angle(qq[1]);
                return lie::first_order_pullback(f, ActionAngleEnsemble(a, th), sys);
            };
            const double fd = (pullback_at(h) - pullback_at(-h)) / (2 * h);
            lie::Matrix a(1, 2), th(1, 2);
            a = p.transpose();
            th << integrable::wrap_angle(q[0]), integrable::wrap_angle(q[1]);
            const double rhs = lie::observable_rhs(f, ActionAngleEnsemble(a, th),
                                                   two_mode_autonomous(eps));
            return std::abs(rhs - fd);
        };

        const double r_full = residual_for(0.04);
        const double r_half = residual_for(0.02);
        CHECK(r_full / r_half == Approx(4.0).epsilon(0.3));
    }
}

TEST_CASE("global error probe grows mildly on a regular orbit") {
    const auto sys = lie::twist_system(0.05, 1.0);
    const auto series = lie::global_error_probe(sys, (lie::Vector(1) << 1.6).finished(),
                                                (lie::Vector(1) << 0.4).finished(), 20.0, 0.1);
    REQUIRE(series.deviation.size() == 201);
    CHECK(series.deviation[0] == 0.0);
    // the accumulated deviation stays of order eps*T*dt on a regular orbit
    CHECK(series.deviation.maxCoeff() < 0.25);
    const double early = series.deviation.segment(1, 50).mean();
    const double late = series.deviation.tail(50).mean();
    CHECK(late > early);
    // and shrinks with the step size
    const auto finer = lie::global_error_probe(sys, (lie::Vector(1) << 1.6).finished(),
                                               (lie::Vector(1) << 0.4).finished(), 20.0, 0.05);
    CHECK(finer.deviation.maxCoeff() < series.deviation.maxCoeff());
}

TEST_CASE("complexity table") {
    const auto rec = lie::complexity_table(4, 1024, 100, 0.1, 0.01, 2.0, 2.0);
    CHECK(rec.quantum_width_qubits == 12);
    CHECK(rec.classical_memory == Approx(8192.0));

    SECTION("nu = 1 reports the linear-in-time budget") {
        const auto lin = lie::complexity_table(4, 64, 50, 0.2, 0.01, 1.0, 2.0);
        CHECK(lin.eps_t_linear == Approx(0.2 * 50));
        CHECK(lin.quantum_depth_cost == Approx(std::sqrt(64.0) * 4 * 50));
    }

    SECTION("monotonicity in the error budget and horizon") {
        const auto base = lie::complexity_table(4, 64, 100, 0.1, 0.01, 2.0, 2.0);
        const auto looser = lie::complexity_table(4, 64, 100, 0.1, 0.04, 2.0, 2.0);
        const auto longer = lie::complexity_table(4, 64, 400, 0.1, 0.01, 2.0, 2.0);
        CHECK(looser.quantum_depth_cost < base.quantum_depth_cost);
        CHECK(longer.quantum_depth_cost > base.quantum_depth_cost);
        CHECK(looser.classical_runtime < base.classical_runtime);
    }

    CHECK_THROWS_AS(lie::complexity_table(4, 64, 100, 0.1, 0.01, 0.5, 2.0), std::invalid_argument);
}
