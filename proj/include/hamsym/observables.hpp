// observables.hpp - block-diagonal quantum observables over the trajectory
// index, expectation values as phase-space averages, the three partition
// functions, projective shot sampling, and an amplitude-estimation query
// model.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "hamsym/integrable.hpp"

namespace hamsym::observables {

using Matrix  = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using integrable::EncodedState;
using integrable::Encoding;

// ------------------------------ trajectory subsets ---------------------------

// Selection over the trajectory index j. The default selects every
// trajectory; an explicitly empty selection is legal and sums to zero.
struct Subset {
    bool whole = true;
    std::vector<Eigen::Index> indices;

    static Subset all() { return Subset{}; }
    static Subset of(std::vector<Eigen::Index> idx) { return Subset{false, std::move(idx)}; }

    std::vector<Eigen::Index> resolve(Eigen::Index n_traj) const {
        if (whole) {
            std::vector<Eigen::Index> out(static_cast<size_t>(n_traj));
            for (Eigen::Index j = 0; j < n_traj; ++j) out[static_cast<size_t>(j)] = j;
            return out;
        }
        for (auto j : indices) {
            if (j < 0 || j >= n_traj) throw std::invalid_argument("Subset: index out of range");
        }
        return indices;
    }
};

// ------------------------------ block observable -----------------------------

// Observable of the form Σ_j |j><j| ⊗ f^j: one Hermitian block per
// trajectory, no cross-trajectory entries representable. Non-Hermitian blocks
// are rejected at construction, never symmetrized.
struct BlockObservable {
    std::vector<CMatrix> blocks;

    explicit BlockObservable(std::vector<CMatrix> blks, double tol = 1e-12)
        : blocks(std::move(blks)) {
        if (blocks.empty()) throw std::invalid_argument("BlockObservable: no blocks");
        const Eigen::Index n = blocks.front().rows();
        for (const auto& b : blocks) {
            if (b.rows() != n || b.cols() != n) {
                throw std::invalid_argument("BlockObservable: inconsistent block shapes");
            }
            if ((b - b.adjoint()).cwiseAbs().maxCoeff() > tol) {
                throw std::invalid_argument("BlockObservable: non-Hermitian block");
            }
        }
    }

    // One block applied to every trajectory.
    static BlockObservable shared(const CMatrix& block, Eigen::Index n_traj) {
        return BlockObservable(std::vector<CMatrix>(static_cast<size_t>(n_traj), block));
    }

    // Shared block from a sparse (k, m, value) list; conjugate entries must be
    // present explicitly, Hermiticity is validated, not repaired.
    static BlockObservable from_triplets(
        Eigen::Index n_modes, Eigen::Index n_traj,
        const std::vector<std::tuple<Eigen::Index, Eigen::Index, std::complex<double>>>& entries) {
        CMatrix block = CMatrix::Zero(n_modes, n_modes);
        for (const auto& [k, m, v] : entries) {
            if (k < 0 || k >= n_modes || m < 0 || m >= n_modes) {
                throw std::invalid_argument("BlockObservable: triplet index out of range");
            }
            block(k, m) += v;
        }
        return shared(block, n_traj);
    }

    Eigen::Index n_modes() const { return blocks.front().rows(); }
    Eigen::Index n_traj() const { return static_cast<Eigen::Index>(blocks.size()); }
};

// k-action projector, energy weighting, and all-coherences blocks.
inline BlockObservable action_projector(Eigen::Index k, Eigen::Index n_modes,
                                        Eigen::Index n_traj) {
    if (k < 0 || k >= n_modes) throw std::invalid_argument("action_projector: k out of range");
    CMatrix block = CMatrix::Zero(n_modes, n_modes);
    block(k, k) = 1.0;
    return BlockObservable::shared(block, n_traj);
}

inline BlockObservable energy_observable(const Vector& omega, Eigen::Index n_traj) {
    CMatrix block = CMatrix::Zero(omega.size(), omega.size());
    for (Eigen::Index k = 0; k < omega.size(); ++k) block(k, k) = omega[k];
    return BlockObservable::shared(block, n_traj);
}

inline BlockObservable coherence_observable(Eigen::Index n_modes, Eigen::Index n_traj) {
    CMatrix block = CMatrix::Ones(n_modes, n_modes);
    block.diagonal().setZero();
    return BlockObservable::shared(block, n_traj);
}

// --------------------------------- expectation -------------------------------

// <ρ|f|ρ> = (1/N_s) Σ_j <ψ^j|f^j|ψ^j> evaluated exactly on the state vector.
// With rescale_by_c each trajectory term is multiplied by c_j, restoring
// physical action units that the unit-norm encoding divides out.
inline double expectation(const EncodedState& enc, const BlockObservable& f,
                          bool rescale_by_c = false, const Subset& subset = Subset::all()) {
    if (f.n_traj() != enc.n_traj() || f.n_modes() != enc.n_modes) {
        throw std::invalid_argument("expectation: observable/state dimension mismatch");
    }
    const double ns = static_cast<double>(enc.n_traj());
    double sum = 0.0;
    for (Eigen::Index j : subset.resolve(enc.n_traj())) {
        const CVector& block = enc.blocks[static_cast<size_t>(j)];
        const std::complex<double> term =
            block.dot(f.blocks[static_cast<size_t>(j)] * block);  // conjugates the left factor
        double value = term.real();
        if (enc.kind == Encoding::separable) value /= ns;  // entangled blocks carry 1/sqrt(Ns)
        if (rescale_by_c) value *= enc.scales[j];
        sum += value;
    }
    return sum;
}

// ------------------------------ partition functions --------------------------

// (1/N_s) Σ_{j in subset} I_k^j
inline double action_partition(const EncodedState& enc, Eigen::Index k,
                               const Subset& subset = Subset::all()) {
    return expectation(enc, action_projector(k, enc.n_modes, enc.n_traj()), true, subset);
}

// (1/N_s) Σ_{j in subset} Σ_k ω_k I_k^j; the total mean energy on the full set
inline double energy_partition(const EncodedState& enc, const Vector& omega,
                               const Subset& subset = Subset::all()) {
    if (omega.size() != enc.n_modes) {
        throw std::invalid_argument("energy_partition: frequency vector length mismatch");
    }
    return expectation(enc, energy_observable(omega, enc.n_traj()), true, subset);
}

// (1/N_s) Σ_{j in subset} Σ_{k≠m} √(I_k^j I_m^j) cos(θ_k^j - θ_m^j),
// both (k, m) and (m, k) counted. Zero for a single mode.
inline double coherence_partition(const EncodedState& enc, const Subset& subset = Subset::all()) {
    if (enc.n_modes < 2) return 0.0;
    return expectation(enc, coherence_observable(enc.n_modes, enc.n_traj()), true, subset);
}

// --------------------------------- shot sampling -----------------------------

struct EstimateReport {
    double value = 0.0;
    double std_error = 0.0;
    long shots = 0;
    uint64_t seed = 0;
};

// Monte Carlo estimate of expectation() from projective measurements: the
// trajectory register is sampled uniformly (every block carries weight
// 1/N_s), then the block observable is measured in its eigenbasis. Unbiased;
// deterministic for a fixed seed.
inline EstimateReport shot_estimate(const EncodedState& enc, const BlockObservable& f, long shots,
                                    uint64_t seed, bool rescale_by_c = false) {
    if (shots <= 0) throw std::invalid_argument("shot_estimate: shots must be positive");
    if (f.n_traj() != enc.n_traj() || f.n_modes() != enc.n_modes) {
        throw std::invalid_argument("shot_estimate: observable/state dimension mismatch");
    }
    const Eigen::Index ns = enc.n_traj();
    const double root_ns = std::sqrt(static_cast<double>(ns));

    // per-trajectory eigenbasis and outcome distribution
    std::vector<Vector> eigenvalues(static_cast<size_t>(ns));
    std::vector<Vector> probabilities(static_cast<size_t>(ns));
    for (Eigen::Index j = 0; j < ns; ++j) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(f.blocks[static_cast<size_t>(j)]);
        if (es.info() != Eigen::Success) throw std::runtime_error("shot_estimate: eigensolver failed");
        CVector psi = enc.blocks[static_cast<size_t>(j)];
        if (enc.kind == Encoding::entangled) psi *= root_ns;
        Vector probs = (es.eigenvectors().adjoint() * psi).cwiseAbs2();
        const double total = probs.sum();
        if (total > 0) probs /= total;
        eigenvalues[static_cast<size_t>(j)] = es.eigenvalues();
        probabilities[static_cast<size_t>(j)] = probs;
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Eigen::Index> pick_traj(0, ns - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    double sum = 0.0, sum_sq = 0.0;
    for (long s = 0; s < shots; ++s) {
        const Eigen::Index j = pick_traj(rng);
        const Vector& probs = probabilities[static_cast<size_t>(j)];
        double u = unit(rng);
        Eigen::Index outcome = probs.size() - 1;
        for (Eigen::Index i = 0; i < probs.size(); ++i) {
            u -= probs[i];
            if (u <= 0) { outcome = i; break; }
        }
        double value = eigenvalues[static_cast<size_t>(j)][outcome];
        if (rescale_by_c) value *= enc.scales[j];
        sum += value;
        sum_sq += value * value;
    }

    EstimateReport rep;
    rep.shots = shots;
    rep.seed = seed;
    rep.value = sum / static_cast<double>(shots);
    if (shots > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / static_cast<double>(shots)) /
                                             static_cast<double>(shots - 1));
        rep.std_error = std::sqrt(var / static_cast<double>(shots));
    }
    return rep;
}

// --------------------------- amplitude estimation model ----------------------

struct QueryModel {
    long queries = 0;          // Heisenberg-limited oracle calls, ceil(π / 2ε)
    long classical_shots = 0;  // sampling baseline, ceil(1 / ε²)
};

// Idealized cost model for amplitude-estimation readout at target accuracy ε;
// formula-level only, no circuit is simulated.
inline QueryModel qae_query_model(double target_eps) {
    if (!(target_eps > 0.0 && target_eps < 1.0)) {
        throw std::invalid_argument("qae_query_model: eps must lie in (0, 1)");
    }
    QueryModel m;
    m.queries = static_cast<long>(std::ceil(M_PI / (2.0 * target_eps)));
    m.classical_shots = static_cast<long>(std::ceil(1.0 / (target_eps * target_eps)));
    return m;
}

}  // namespace hamsym::observables
