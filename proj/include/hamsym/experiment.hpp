// experiment.hpp - batch experiment machinery behind the command-line tool:
// key=value config files, hashed and stamped into CSV metadata for
// reproducibility, table readers for plotting, and the runners binding the
// numeric modules to file interfaces.

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamsym/core.hpp"
#include "hamsym/dynamics.hpp"
#include "hamsym/integrable.hpp"
#include "hamsym/io.hpp"
#include "hamsym/lie.hpp"
#include "hamsym/observables.hpp"
#include "hamsym/plot.hpp"
#include "hamsym/quantize.hpp"
#include "hamsym/version.hpp"

namespace hamsym::cli {

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -------------------------------- configuration ------------------------------

// key = value lines; '#' starts a comment; keys are case-sensitive.
struct Config {
    std::map<std::string, std::string> values;

    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    static Config parse(std::istream& in) {
        Config cfg;
        std::string line;
        size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash_pos = line.find('#');
            if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos) {
                throw ValidationError("config line " + std::to_string(lineno) +
                                      ": expected key = value");
            }
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty()) {
                throw ValidationError("config line " + std::to_string(lineno) + ": empty key");
            }
            cfg.values[key] = value;
        }
        return cfg;
    }

    static Config parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config " + path);
        return parse(in);
    }

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string require(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw ValidationError("config: missing required field '" + key + "'");
        return it->second;
    }

    std::string get(const std::string& key, const std::string& fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    double number(const std::string& key) const {
        const std::string raw = require(key);
        try {
            size_t pos = 0;
            const double v = std::stod(raw, &pos);
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ValidationError("config: field '" + key + "' is not a number: " + raw);
        }
    }

    double number(const std::string& key, double fallback) const {
        return has(key) ? number(key) : fallback;
    }

    long integer(const std::string& key) const {
        const double v = number(key);
        const long n = static_cast<long>(v);
        if (static_cast<double>(n) != v) {
            throw ValidationError("config: field '" + key + "' is not an integer");
        }
        return n;
    }

    long integer(const std::string& key, long fallback) const {
        return has(key) ? integer(key) : fallback;
    }

    std::vector<double> number_list(const std::string& key) const {
        const std::string raw = require(key);
        std::vector<double> out;
        std::stringstream ss(raw);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const std::string t = trim(cell);
            if (t.empty()) continue;
            try {
                out.push_back(std::stod(t));
            } catch (const std::exception&) {
                throw ValidationError("config: field '" + key + "' has a non-numeric entry: " + t);
            }
        }
        if (out.empty()) throw ValidationError("config: field '" + key + "' is empty");
        return out;
    }

    // canonical text: sorted key=value lines, used for the reproducibility hash
    std::string canonical() const {
        std::string out;
        for (const auto& [k, v] : values) out += k + "=" + v + "\n";
        return out;
    }
};

inline uint64_t fnv1a64(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(const std::string& text) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

// ------------------------------ csv with metadata ----------------------------

// Every emitted CSV starts with a deterministic comment block: tool version,
// config hash, and the flow convention pinned by the quantization harness.
inline std::string metadata_block(const std::string& config_hash,
                                  const std::vector<std::string>& extra = {}) {
    std::string out;
    out += std::string("# hamsym ") + hamsym::version + "\n";
    out += "# config-hash: " + config_hash + "\n";
    out += std::string("# convention: ") + quantize::EquivalenceReport::convention + "\n";
    for (const auto& line : extra) out += "# " + line + "\n";
    return out;
}

// ---------------------------------- tables -----------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    Eigen::Index column_index(const std::string& name) const {
        for (size_t i = 0; i < columns.size(); ++i) {
            if (columns[i] == name) return static_cast<Eigen::Index>(i);
        }
        throw ValidationError("unknown column '" + name + "'");
    }

    std::vector<double> column(const std::string& name) const {
        const auto idx = static_cast<size_t>(column_index(name));
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[idx]);
        return out;
    }
};

inline Table read_table(std::istream& in, const std::string& what = "table") {
    Table t;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(Config::trim(cell));
        if (t.columns.empty()) {
            t.columns = cells;
            continue;
        }
        if (cells.size() != t.columns.size()) {
            throw std::runtime_error(what + ": ragged row at line " + std::to_string(lineno));
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells) {
            try {
                row.push_back(std::stod(c));
            } catch (const std::exception&) {
                throw std::runtime_error(what + ": non-numeric cell at line " +
                                         std::to_string(lineno));
            }
        }
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw std::runtime_error(what + ": no header row");
    return t;
}

inline Table read_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_table(in, path);
}

// ----------------------------- encoded state files ---------------------------

// Self-contained encoded-state file: metadata lines carry the encoding kind
// and per-trajectory scales; the body is the block matrix in the complex
// re,im-pair format (one trajectory block per row).
inline std::string write_encoded(const integrable::EncodedState& enc,
                                 const std::string& config_hash) {
    std::string scales = "scales: ";
    for (Eigen::Index j = 0; j < enc.scales.size(); ++j) {
        if (j > 0) scales += ',';
        scales += io::format_value(enc.scales[j]);
    }
    std::string out = metadata_block(config_hash,
                                     {std::string("encoding: ") +
                                          (enc.kind == integrable::Encoding::separable
                                               ? "separable"
                                               : "entangled"),
                                      scales});
    io::CMatrix m(enc.n_traj(), enc.n_modes);
    for (Eigen::Index j = 0; j < enc.n_traj(); ++j)
        m.row(j) = enc.blocks[static_cast<size_t>(j)].transpose();
    out += io::write_complex_matrix(m);
    return out;
}

inline integrable::EncodedState read_encoded(std::istream& in) {
    std::string line, body;
    std::optional<std::string> kind;
    std::optional<std::string> scales_raw;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            const auto strip = Config::trim(line.substr(1));
            if (strip.rfind("encoding:", 0) == 0) kind = Config::trim(strip.substr(9));
            if (strip.rfind("scales:", 0) == 0) scales_raw = Config::trim(strip.substr(7));
            continue;
        }
        body += line + "\n";
    }
    if (!kind || !scales_raw) {
        throw std::runtime_error("encoded state: missing encoding/scales metadata");
    }
    std::istringstream body_in(body);
    const io::CMatrix m = io::read_complex_matrix(body_in, "encoded state");

    integrable::EncodedState enc;
    enc.kind = integrable::encoding_from_string(*kind);
    enc.n_modes = m.cols();
    std::vector<double> scales;
    std::stringstream ss(*scales_raw);
    std::string cell;
    while (std::getline(ss, cell, ',')) scales.push_back(std::stod(Config::trim(cell)));
    if (static_cast<Eigen::Index>(scales.size()) != m.rows()) {
        throw std::runtime_error("encoded state: scales length does not match block count");
    }
    enc.scales = Eigen::Map<const integrable::Vector>(scales.data(),
                                                      static_cast<Eigen::Index>(scales.size()));
    for (Eigen::Index j = 0; j < m.rows(); ++j) enc.blocks.push_back(m.row(j).transpose());
    return enc;
}

inline integrable::EncodedState read_encoded_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_encoded(in);
}

// --------------------------------- runners -----------------------------------

inline std::filesystem::path resolve_out(const std::string& out,
                                         const std::string& out_dir = "") {
    std::filesystem::path p(out);
    if (p.is_absolute()) return p;
    std::string dir = out_dir;
    if (dir.empty()) {
        if (const char* env = std::getenv("HAMSYM_OUT_DIR")) dir = env;
    }
    return dir.empty() ? p : std::filesystem::path(dir) / p;
}

// Schrödinger vs symplectic-integration error scaling of a seeded random
// Hermitian system. Emits a summary (dt, max_error, halving ratio) plus a
// stacked per-step series (dt, t, e, H_c_drift).
inline std::vector<std::string> run_quantize_equivalence(const Config& cfg,
                                                         const std::string& out_dir = "") {
    const long n = cfg.integer("n", 2);
    const uint64_t seed = static_cast<uint64_t>(cfg.integer("seed", 1));
    const double T = cfg.number("T", 10.0);
    const std::vector<double> dts =
        cfg.has("dt") ? cfg.number_list("dt") : std::vector<double>{1e-2, 5e-3, 2.5e-3};
    const std::string out = cfg.get("out", "equivalence.csv");
    if (n < 1) throw ValidationError("quantize-equivalence: n must be positive");
    for (double dt : dts) {
        if (dt <= 0) throw ValidationError("quantize-equivalence: dt values must be positive");
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    core::CMatrix a(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) a(r, c) = std::complex<double>(dist(rng), dist(rng));
    const quantize::QuantumHamiltonian hq(0.5 * (a + a.adjoint()));
    core::CVector amps(n);
    for (Eigen::Index k = 0; k < n; ++k) amps[k] = {dist(rng), dist(rng)};
    amps /= amps.norm();
    const core::QuantumState psi0(amps);

    const std::string hash = hash_hex(cfg.canonical());
    std::string summary = metadata_block(hash, {"experiment: quantize-equivalence"});
    summary += "dt,max_error,ratio_to_previous\n";
    std::string series = metadata_block(hash, {"experiment: quantize-equivalence series"});
    series += "dt,t,e,H_c_drift\n";

    double prev = 0.0;
    for (size_t i = 0; i < dts.size(); ++i) {
        const auto rep = quantize::equivalence_report(hq, psi0, T, dts[i]);
        summary += io::format_value(dts[i]) + "," + io::format_value(rep.max_error) + "," +
                   (i == 0 ? "nan" : io::format_value(prev / rep.max_error)) + "\n";
        prev = rep.max_error;
        for (Eigen::Index s = 0; s < rep.times.size(); ++s) {
            series += io::format_value(dts[i]) + "," + io::format_value(rep.times[s]) + "," +
                      io::format_value(rep.state_error[s]) + "," +
                      io::format_value(rep.energy_drift[s]) + "\n";
        }
    }

    const auto out_path = resolve_out(out, out_dir);
    auto series_path = out_path;
    series_path.replace_filename(out_path.stem().string() + "-series" +
                                 out_path.extension().string());
    io::write_file(out_path.string(), summary);
    io::write_file(series_path.string(), series);
    return {out_path.string(), series_path.string()};
}

// Unitary action-angle evolution against chart-mapped direct integration for
// a 1-DOF system. Emits (t, I_unitary, theta_unitary, I_mapped, theta_mapped,
// deviation).
inline std::vector<std::string> run_integrable_evolve(const Config& cfg,
                                                      const std::string& out_dir = "") {
    const std::string system = cfg.get("system", "pendulum");
    const double q0 = cfg.number("q0");
    const double p0 = cfg.number("p0", 0.0);
    const double T = cfg.number("T", 100.0);
    const double dt = cfg.number("dt", 1e-3);
    const long samples = cfg.integer("samples", 100);
    const std::string out = cfg.get("out", "evolve.csv");
    if (T <= 0 || dt <= 0 || samples < 1) {
        throw ValidationError("integrable-evolve: T, dt and samples must be positive");
    }

    dynamics::CanonicalSystem sys;
    if (system == "pendulum") sys = dynamics::pendulum_system();
    else if (system == "harmonic") sys = dynamics::harmonic_system();
    else throw ValidationError("integrable-evolve: unknown system '" + system + "'");

    const core::KahlerVector z0((integrable::Vector(1) << q0).finished(),
                                (integrable::Vector(1) << p0).finished());
    const auto chart = integrable::build_chart_numeric(sys, z0);
    const double i0 = chart.action(z0);
    const double th0 = chart.angle(z0);
    const double omega = chart.frequency(i0);

    const auto traj = dynamics::integrate(sys, z0, T, dt, dynamics::Method::yoshida4);

    const std::string hash = hash_hex(cfg.canonical());
    std::string body = metadata_block(
        hash, {"experiment: integrable-evolve", "system: " + system,
               "regime: " + std::string(integrable::regime_name(chart.regime)),
               "action: " + io::format_value(i0), "frequency: " + io::format_value(omega)});
    body += "t,I_unitary,theta_unitary,I_mapped,theta_mapped,deviation\n";

    for (long s = 0; s <= samples; ++s) {
        const double t = T * static_cast<double>(s) / static_cast<double>(samples);
        const auto idx = static_cast<size_t>(std::llround(t / dt));
        const auto& z = traj.states[std::min(idx, traj.states.size() - 1)];
        const double th_unitary = integrable::wrap_angle(th0 + omega * t);
        const double i_mapped = chart.action(z);
        const double th_mapped = chart.angle(z);
        const double dev = std::max(std::abs(i_mapped - i0),
                                    std::abs(integrable::wrap_pm_pi(th_mapped - th_unitary)));
        body += io::format_value(t) + "," + io::format_value(i0) + "," +
                io::format_value(th_unitary) + "," + io::format_value(i_mapped) + "," +
                io::format_value(th_mapped) + "," + io::format_value(dev) + "\n";
    }

    const auto out_path = resolve_out(out, out_dir);
    io::write_file(out_path.string(), body);
    return {out_path.string()};
}

namespace runner_detail {

inline observables::Subset parse_subset(const std::string& raw) {
    if (raw == "all" || raw.empty()) return observables::Subset::all();
    std::vector<Eigen::Index> indices;
    std::stringstream ss(raw);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const std::string t = Config::trim(cell);
        if (t.empty()) continue;
        try {
            indices.push_back(static_cast<Eigen::Index>(std::stol(t)));
        } catch (const std::exception&) {
            throw ValidationError("subset: non-integer entry '" + t + "'");
        }
    }
    return observables::Subset::of(std::move(indices));
}

struct ParsedObservable {
    std::string name;
    observables::BlockObservable observable;
};

inline ParsedObservable parse_observable(const std::string& spec, Eigen::Index n_modes,
                                         Eigen::Index n_traj, const Config& cfg) {
    if (spec.rfind("action:", 0) == 0) {
        const long k = std::stol(spec.substr(7));
        return {spec, observables::action_projector(k, n_modes, n_traj)};
    }
    if (spec == "energy") {
        const auto omega_list = cfg.number_list("omega");
        if (static_cast<Eigen::Index>(omega_list.size()) != n_modes) {
            throw ValidationError("observe: omega length must match the ensemble mode count");
        }
        integrable::Vector omega(n_modes);
        for (Eigen::Index k = 0; k < n_modes; ++k) omega[k] = omega_list[static_cast<size_t>(k)];
        return {spec, observables::energy_observable(omega, n_traj)};
    }
    if (spec == "coherence") {
        return {spec, observables::coherence_observable(n_modes, n_traj)};
    }
    throw ValidationError("observe: unknown observable '" + spec +
                          "' (expected action:k, energy or coherence)");
}

}  // namespace runner_detail

// Exact and sampled partition-function readout of an ensemble file.
inline std::vector<std::string> run_observables(const Config& cfg,
                                                const std::string& out_dir = "") {
    const std::string ensemble_path = cfg.require("ensemble");
    const std::string spec = cfg.get("observable", "action:0");
    const std::string subset_raw = cfg.get("subset", "all");
    const long shots = cfg.integer("shots", 1000);
    const uint64_t seed = static_cast<uint64_t>(cfg.integer("seed", 1));
    const std::string encoding = cfg.get("encoding", "entangled");
    const std::string out = cfg.get("out", "report.csv");
    if (shots < 1) throw ValidationError("observe: shots must be positive");

    const auto ens = integrable::read_ensemble_file(ensemble_path);
    const auto enc = integrable::encode_ensemble(ens, integrable::encoding_from_string(encoding));
    const auto subset = runner_detail::parse_subset(subset_raw);
    const auto parsed = runner_detail::parse_observable(spec, ens.n_modes(), ens.n_traj(), cfg);

    const double exact = observables::expectation(enc, parsed.observable, true, subset);
    const auto estimate = observables::shot_estimate(enc, parsed.observable, shots, seed, true);
    const auto selected = subset.resolve(ens.n_traj()).size();

    const std::string hash = hash_hex(cfg.canonical());
    std::string body = metadata_block(hash, {"experiment: observables",
                                             "ensemble: " + ensemble_path,
                                             "observable: " + parsed.name});
    body += "exact,estimate,std_error,shots,seed,n_s_prime,n_s\n";
    body += io::format_value(exact) + "," + io::format_value(estimate.value) + "," +
            io::format_value(estimate.std_error) + "," + std::to_string(shots) + "," +
            std::to_string(seed) + "," + std::to_string(selected) + "," +
            std::to_string(ens.n_traj()) + "\n";

    const auto out_path = resolve_out(out, out_dir);
    io::write_file(out_path.string(), body);
    return {out_path.string()};
}

// Order-fit grid for the Lie stepping scheme on the twist system: one-step
// deviation against a fine RK4 reference, transform round-trip residual, and
// the accumulated deviation over the horizon T.
inline std::vector<std::string> run_lie_bench(const Config& cfg, const std::string& out_dir = "") {
    const double omega_drive = cfg.number("omega_drive", 1.0);
    const double action0 = cfg.number("I0", 1.3);
    const double angle0 = cfg.number("theta0", 0.7);
    const double t0 = cfg.number("t0", 0.3);
    const double T = cfg.number("T", 20.0);
    const std::vector<double> eps_list =
        cfg.has("eps") ? cfg.number_list("eps") : std::vector<double>{0.005, 0.01, 0.02};
    const std::vector<double> dt_list =
        cfg.has("dt") ? cfg.number_list("dt") : std::vector<double>{0.1, 0.2, 0.4};
    const std::string out = cfg.get("out", "lie-bench.csv");

    const std::string hash = hash_hex(cfg.canonical());
    std::string body = metadata_block(hash, {"experiment: lie-bench",
                                             "system: twist (H0 = I^2/2)"});
    body += "eps,dt,T,one_step_dev,roundtrip_residual,global_max_dev,eps_prime\n";

    for (double eps : eps_list) {
        for (double dt : dt_list) {
            if (eps < 0 || dt <= 0) throw ValidationError("lie-bench: eps >= 0 and dt > 0 required");
            const auto sys = lie::twist_system(eps, omega_drive);
            const auto canonical = lie::to_canonical(sys);

            integrable::Matrix act(1, 1), ang(1, 1);
            act << action0;
            ang << angle0;
            const auto stepped =
                lie::lie_step(integrable::ActionAngleEnsemble(act, ang), sys, t0, dt);
            integrable::Vector q = (integrable::Vector(1) << angle0).finished();
            integrable::Vector p = (integrable::Vector(1) << action0).finished();
            const int sub = 64;
            for (int s = 0; s < sub; ++s)
                dynamics::rk4_step(canonical, q, p, t0 + s * dt / sub, dt / sub);
            const double one_step =
                std::hypot(stepped.actions(0, 0) - p[0],
                           integrable::wrap_pm_pi(stepped.angles(0, 0) -
                                                  integrable::wrap_angle(q[0])));

            const integrable::Vector a0 = (integrable::Vector(1) << action0).finished();
            const integrable::Vector th0v = (integrable::Vector(1) << angle0).finished();
            const auto [ab, tb] = lie::transform(sys, a0, th0v, t0 + dt, t0);
            const auto [ar, tr] = lie::inverse_transform(sys, ab, tb, t0 + dt, t0);
            const double roundtrip = std::hypot(ar[0] - action0, tr[0] - angle0);

            const auto probe = lie::global_error_probe(sys, a0, th0v, T, dt);
            body += io::format_value(eps) + "," + io::format_value(dt) + "," +
                    io::format_value(T) + "," + io::format_value(one_step) + "," +
                    io::format_value(roundtrip) + "," +
                    io::format_value(probe.deviation.maxCoeff()) + "," +
                    io::format_value(lie::effective_epsilon(eps, dt, sys.smoothness())) + "\n";
        }
    }

    const auto out_path = resolve_out(out, out_dir);
    io::write_file(out_path.string(), body);
    return {out_path.string()};
}

// Formula-level quantum/classical cost rows over a list of Lie orders.
inline std::vector<std::string> run_complexity(const Config& cfg, const std::string& out_dir = "") {
    const long n = cfg.integer("N", 4);
    const long ns = cfg.integer("N_s", 1024);
    const long nt = cfg.integer("N_t", 100);
    const double eps = cfg.number("eps", 0.1);
    const double eps_t = cfg.number("eps_t", 0.01);
    const double kappa = cfg.number("kappa", 2.0);
    const std::vector<double> nu_list =
        cfg.has("nu") ? cfg.number_list("nu") : std::vector<double>{1.0, 2.0, 3.0};
    const std::string out = cfg.get("out", "complexity.csv");

    const std::string hash = hash_hex(cfg.canonical());
    std::string body = metadata_block(hash, {"experiment: complexity-table",
                                             "time-convention: T = N_t (unit step)"});
    body += "N,N_s,N_t,eps,eps_t,nu,kappa,quantum_width_qubits,quantum_depth_cost,"
            "classical_memory,classical_runtime,eps_t_linear\n";
    for (double nu : nu_list) {
        const auto rec = lie::complexity_table(n, ns, nt, eps, eps_t, nu, kappa);
        body += std::to_string(n) + "," + std::to_string(ns) + "," + std::to_string(nt) + "," +
                io::format_value(eps) + "," + io::format_value(eps_t) + "," +
                io::format_value(nu) + "," + io::format_value(kappa) + "," +
                std::to_string(rec.quantum_width_qubits) + "," +
                io::format_value(rec.quantum_depth_cost) + "," +
                io::format_value(rec.classical_memory) + "," +
                io::format_value(rec.classical_runtime) + "," +
                io::format_value(rec.eps_t_linear) + "\n";
    }

    const auto out_path = resolve_out(out, out_dir);
    io::write_file(out_path.string(), body);
    return {out_path.string()};
}

// Dispatch by the config's `kind` field.
inline std::vector<std::string> run(const Config& cfg, const std::string& out_dir = "") {
    const std::string kind = cfg.require("kind");
    if (kind == "quantize-equivalence") return run_quantize_equivalence(cfg, out_dir);
    if (kind == "integrable-evolve") return run_integrable_evolve(cfg, out_dir);
    if (kind == "observables") return run_observables(cfg, out_dir);
    if (kind == "lie-bench") return run_lie_bench(cfg, out_dir);
    if (kind == "complexity-table") return run_complexity(cfg, out_dir);
    throw ValidationError("run: unknown experiment kind '" + kind + "'");
}

}  // namespace hamsym::cli
