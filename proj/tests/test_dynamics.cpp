#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "hamsym/dynamics.hpp"

using namespace hamsym;
using core::KahlerVector;
using dynamics::Method;

namespace {

KahlerVector kv(double q, double p) {
    return KahlerVector((core::Vector(1) << q).finished(), (core::Vector(1) << p).finished());
}

// least-squares slope of log(err) against log(dt)
double loglog_slope(const std::vector<double>& dts, const std::vector<double>& errs) {
    const size_t n = dts.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double x = std::log(dts[i]);
        const double y = std::log(errs[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double harmonic_error_at(double T, double dt, Method m) {
    const auto sys = dynamics::harmonic_system();
    const auto traj = dynamics::integrate(sys, kv(1.0, 0.0), T, dt, m);
    const double t_end = traj.times[traj.size() - 1];
    const double qe = std::cos(t_end), pe = -std::sin(t_end);
    return std::hypot(traj.back().q[0] - qe, traj.back().p[0] - pe);
}

}  // namespace

TEST_CASE("harmonic oscillator returns to start over one period") {
    const double err = harmonic_error_at(2 * M_PI, 2 * M_PI / 1000, Method::verlet);
    CHECK(err < 5e-5);
}

TEST_CASE("verlet converges at second order, yoshida4 at fourth") {
    std::vector<double> dts{2e-2, 1e-2, 5e-3};
    std::vector<double> ev, ey;
    for (double dt : dts) {
        ev.push_back(harmonic_error_at(5.0, dt, Method::verlet));
        ey.push_back(harmonic_error_at(5.0, dt, Method::yoshida4));
    }
    CHECK(loglog_slope(dts, ev) == Approx(2.0).margin(0.15));
    CHECK(loglog_slope(dts, ey) == Approx(4.0).margin(0.3));
    // dt halving on yoshida4 shrinks the error about 16x
    CHECK(ey[0] / ey[1] == Approx(16.0).epsilon(0.25));
}

TEST_CASE("T = 0 yields the single-point trajectory") {
    const auto traj = dynamics::integrate(dynamics::harmonic_system(), kv(0.3, -0.2), 0.0, 0.1,
                                          Method::verlet);
    REQUIRE(traj.size() == 1);
    CHECK(traj.front().q[0] == 0.3);
    CHECK(traj.front().p[0] == -0.2);
}

TEST_CASE("trajectory has ceil(T/dt)+1 uniformly spaced points") {
    const auto traj = dynamics::integrate(dynamics::harmonic_system(), kv(1, 0), 1.0, 0.1,
                                          Method::rk4_reference);
    REQUIRE(traj.size() == 11);
    CHECK(traj.times[10] == Approx(1.0));
}

TEST_CASE("divergent trajectories abort with the failing step index") {
    dynamics::CanonicalSystem sys;
    sys.n_pairs = 1;
    sys.separable = true;
    sys.hamiltonian = [](const core::Vector& q, const core::Vector& p, double) {
        return 0.5 * p[0] * p[0] - 0.25 * std::pow(q[0], 4);
    };
    sys.gradient = [](const core::Vector& q, const core::Vector& p, double) {
        core::Vector dq(1), dp(1);
        dq[0] = -std::pow(q[0], 3);
        dp[0] = p[0];
        return std::make_pair(dq, dp);
    };
    CHECK_THROWS_AS(dynamics::integrate(sys, kv(3.0, 0.0), 100.0, 0.5, Method::rk4_reference),
                    dynamics::IntegrationError);
}

TEST_CASE("pendulum energies at the fixed point and separatrix") {
    const auto sys = dynamics::pendulum_system();
    const core::Vector zero = core::Vector::Zero(1);
    CHECK(sys.hamiltonian((core::Vector(1) << 0.0).finished(), zero, 0.0) == 0.0);
    CHECK(sys.hamiltonian((core::Vector(1) << M_PI).finished(), zero, 0.0) == Approx(2.0));
}

TEST_CASE("pendulum small oscillations approach period 2 pi") {
    const auto sys = dynamics::pendulum_system();
    const double amp = 1e-3;
    const auto traj = dynamics::integrate(sys, kv(amp, 0.0), 7.0, 1e-3, Method::rk4_reference);
    // starting at the right turning point, p dips negative then recrosses zero
    // downward exactly one period later
    double period = 0.0;
    for (Eigen::Index i = 1; i + 1 < traj.size(); ++i) {
        if (traj.states[i].p[0] > 0 && traj.states[i + 1].p[0] <= 0) {
            const double f = traj.states[i].p[0] / (traj.states[i].p[0] - traj.states[i + 1].p[0]);
            period = traj.times[i] + f * 1e-3;
            break;
        }
    }
    REQUIRE(period > 0.0);
    CHECK(period == Approx(2 * M_PI).epsilon(1e-5));
}

TEST_CASE("pendulum gradient agrees with finite differences") {
    CHECK(dynamics::gradient_consistency(dynamics::pendulum_system()) < 1e-6);
}

TEST_CASE("exact Schrodinger propagation") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist;
    auto random_hermitian = [&](Eigen::Index n) {
        core::CMatrix a(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) a(r, c) = std::complex<double>(dist(rng), dist(rng));
        return core::CMatrix(0.5 * (a + a.adjoint()));
    };
    auto random_state = [&](Eigen::Index n) {
        core::CVector v(n);
        for (Eigen::Index k = 0; k < n; ++k) v[k] = {dist(rng), dist(rng)};
        v /= v.norm();
        return core::QuantumState(v);
    };

    SECTION("t = 0 is the identity") {
        const auto psi0 = random_state(4);
        const auto psi = dynamics::schrodinger_exact(random_hermitian(4), psi0, 0.0);
        CHECK((psi.amplitudes - psi0.amplitudes).norm() < 1e-14);
    }

    SECTION("diagonal Hamiltonians imprint exact phases") {
        core::CMatrix hq = core::CMatrix::Zero(3, 3);
        hq(0, 0) = 1.0; hq(1, 1) = 2.0; hq(2, 2) = -0.5;
        const auto psi0 = random_state(3);
        const double t = 0.83;
        const auto psi = dynamics::schrodinger_exact(hq, psi0, t);
        for (int k = 0; k < 3; ++k) {
            const std::complex<double> expect = psi0.amplitudes[k] * std::polar(1.0, -hq(k, k).real() * t);
            CHECK(std::abs(psi.amplitudes[k] - expect) < 1e-12);
        }
    }

    SECTION("norm is preserved across random times") {
        const auto hq = random_hermitian(5);
        const auto psi0 = random_state(5);
        std::uniform_real_distribution<double> tdist(-20.0, 20.0);
        for (int rep = 0; rep < 100; ++rep) {
            CHECK(dynamics::schrodinger_exact(hq, psi0, tdist(rng)).norm() == Approx(1.0).margin(1e-12));
        }
    }

    SECTION("non-Hermitian input is rejected") {
        core::CMatrix bad = core::CMatrix::Zero(2, 2);
        bad(0, 1) = 1.0;
        CHECK_THROWS_AS(dynamics::schrodinger_exact(bad, random_state(2), 1.0), std::invalid_argument);
    }
}

TEST_CASE("symplectic defect of reference maps") {
    SECTION("identity map sits at finite-difference noise") {
        auto identity = [](const KahlerVector& z) { return z; };
        CHECK(dynamics::symplectic_defect(identity, kv(0.4, -0.7), 1e-5) < 1e-8);
    }

    SECTION("one verlet step of the harmonic oscillator is symplectic") {
        const auto sys = dynamics::harmonic_system();
        auto flow = [&](const KahlerVector& z) {
            core::Vector q = z.q, p = z.p;
            dynamics::verlet_step(sys, q, p, 0.0, 0.1);
            return KahlerVector(q, p);
        };
        CHECK(dynamics::symplectic_defect(flow, kv(1.0, 0.0), 1e-5) < 1e-8);
    }

    SECTION("the stretch map (q,p) -> (2q,p) has defect exactly 1") {
        auto stretch = [](const KahlerVector& z) { return KahlerVector(2.0 * z.q, z.p); };
        CHECK(dynamics::symplectic_defect(stretch, kv(0.2, 0.1), 1e-5) == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("verlet is time reversible") {
    const auto sys = dynamics::pendulum_system();
    const KahlerVector z0 = kv(1.1, 0.3);
    const auto fwd = dynamics::integrate(sys, z0, 10.0, 1e-3, Method::verlet);
    const auto bwd = dynamics::integrate(sys, fwd.back(), 10.0, -1e-3, Method::verlet);
    CHECK(std::hypot(bwd.back().q[0] - z0.q[0], bwd.back().p[0] - z0.p[0]) < 1e-9);
}

TEST_CASE("lyapunov estimates distinguish regular from chaotic motion") {
    SECTION("harmonic oscillator has vanishing exponent") {
        const auto rep = dynamics::lyapunov_exponent(dynamics::harmonic_system(), kv(1.0, 0.0),
                                                     1000.0, 0.05, 10);
        CHECK(std::abs(rep.lambda) <= 1e-2);
        CHECK(rep.running.size() >= 100);
    }

    SECTION("pendulum libration orbit is regular") {
        const auto rep = dynamics::lyapunov_exponent(dynamics::pendulum_system(), kv(1.0, 0.0),
                                                     1000.0, 0.05, 10);
        CHECK(std::abs(rep.lambda) <= 1e-2);
    }

    SECTION("overlapping resonances drive the exponent positive") {
        // two counter-propagating waves; resonance overlap for eps near 1
        dynamics::CanonicalSystem sys;
        sys.n_pairs = 1;
        sys.separable = true;
        const double eps = 0.9;
        sys.hamiltonian = [eps](const core::Vector& q, const core::Vector& p, double t) {
            return 0.5 * p[0] * p[0] + 2.0 * eps * std::cos(q[0]) * std::cos(t);
        };
        sys.gradient = [eps](const core::Vector& q, const core::Vector& p, double t) {
            core::Vector dq(1), dp(1);
            dq[0] = -2.0 * eps * std::sin(q[0]) * std::cos(t);
            dp[0] = p[0];
            return std::make_pair(dq, dp);
        };
        const auto rep = dynamics::lyapunov_exponent(sys, kv(0.3, 0.05), 400.0, 0.02, 10);
        CHECK(rep.lambda > 0.02);
    }

    SECTION("too short a horizon is rejected") {
        CHECK_THROWS_AS(dynamics::lyapunov_exponent(dynamics::harmonic_system(), kv(1, 0), 1.0,
                                                    0.05, 10),
                        std::invalid_argument);
    }
}
