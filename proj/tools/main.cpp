// hamsym - command-line front end: quantization, integration, action-angle
// encoding and evolution, observable readout, Lie stepping and benchmarks,
// cost tables, config-driven experiment runs, and SVG plots.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hamsym/experiment.hpp"

namespace {

using namespace hamsym;

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_bad_parameter = 2;
constexpr int exit_structure = 3;
constexpr int exit_io = 4;

std::vector<double> parse_list(const std::string& raw, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(raw);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        const std::string t = cli::Config::trim(cell);
        if (t.empty()) continue;
        try {
            out.push_back(std::stod(t));
        } catch (const std::exception&) {
            throw cli::ValidationError(what + ": non-numeric entry '" + t + "'");
        }
    }
    if (out.empty()) throw cli::ValidationError(what + ": empty list");
    return out;
}

cli::Config config_from_pairs(std::initializer_list<std::pair<std::string, std::string>> pairs) {
    cli::Config cfg;
    for (const auto& [k, v] : pairs) cfg.values[k] = v;
    return cfg;
}

int do_quantize(const std::string& input, const std::string& out, double tol) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open " + input);
    const io::Matrix ht = io::read_real_matrix(in, input);
    const quantize::QuadraticHamiltonian h(ht);
    const auto hq = quantize::quantize(h, tol);

    std::vector<std::string> notes{"operation: quantize", "input: " + input};
    if (!h.positive_definite()) {
        notes.push_back("warning: input is not positive definite (unstable quadratic form)");
        std::cerr << "warning: quadratic Hamiltonian is not positive definite\n";
    }
    std::string body = cli::metadata_block(cli::hash_hex(io::write_real_matrix(ht)), notes);
    body += io::write_complex_matrix(hq.h_q);
    io::write_file(cli::resolve_out(out).string(), body);
    std::cout << "wrote " << cli::resolve_out(out).string() << "\n";
    return exit_ok;
}

int do_integrate(const std::string& system, const std::string& z0_raw, double T, double dt,
                 const std::string& method, const std::string& out) {
    dynamics::CanonicalSystem sys;
    if (system == "pendulum") sys = dynamics::pendulum_system();
    else if (system == "harmonic") sys = dynamics::harmonic_system();
    else throw cli::ValidationError("integrate: unknown system '" + system + "'");

    const auto z0_vals = parse_list(z0_raw, "z0");
    if (z0_vals.size() % 2 != 0 ||
        static_cast<Eigen::Index>(z0_vals.size()) != 2 * sys.n_pairs) {
        throw cli::ValidationError("integrate: z0 must list q then p for every pair");
    }
    integrable::Vector q(sys.n_pairs), p(sys.n_pairs);
    for (Eigen::Index k = 0; k < sys.n_pairs; ++k) {
        q[k] = z0_vals[static_cast<size_t>(k)];
        p[k] = z0_vals[static_cast<size_t>(k + sys.n_pairs)];
    }

    const auto traj = dynamics::integrate(sys, core::KahlerVector(q, p), T, dt,
                                          dynamics::method_from_string(method));

    const std::string params = system + "|" + z0_raw + "|" + io::format_value(T) + "|" +
                               io::format_value(dt) + "|" + method;
    std::string body = cli::metadata_block(cli::hash_hex(params),
                                           {"operation: integrate", "system: " + system,
                                            "method: " + method});
    body += "t";
    for (Eigen::Index k = 0; k < sys.n_pairs; ++k) body += ",q" + std::to_string(k);
    for (Eigen::Index k = 0; k < sys.n_pairs; ++k) body += ",p" + std::to_string(k);
    body += "\n";
    for (Eigen::Index i = 0; i < traj.size(); ++i) {
        body += io::format_value(traj.times[i]);
        for (Eigen::Index k = 0; k < sys.n_pairs; ++k)
            body += "," + io::format_value(traj.states[static_cast<size_t>(i)].q[k]);
        for (Eigen::Index k = 0; k < sys.n_pairs; ++k)
            body += "," + io::format_value(traj.states[static_cast<size_t>(i)].p[k]);
        body += "\n";
    }
    io::write_file(cli::resolve_out(out).string(), body);
    std::cout << "wrote " << cli::resolve_out(out).string() << "\n";
    return exit_ok;
}

int do_encode(const std::string& ensemble, const std::string& kind, const std::string& out) {
    const auto ens = integrable::read_ensemble_file(ensemble);
    const auto enc = integrable::encode_ensemble(ens, integrable::encoding_from_string(kind));
    io::write_file(cli::resolve_out(out).string(),
                   cli::write_encoded(enc, cli::hash_hex(ensemble + "|" + kind)));
    std::cout << "wrote " << cli::resolve_out(out).string() << "\n";
    return exit_ok;
}

int do_evolve(const std::string& state, const std::string& omega_raw, double dt, long steps,
              const std::string& out) {
    const auto enc = cli::read_encoded_file(state);
    const auto omega_vals = parse_list(omega_raw, "omega");
    if (static_cast<Eigen::Index>(omega_vals.size()) != enc.n_modes) {
        throw cli::ValidationError("evolve: omega length must match the encoded mode count");
    }
    integrable::Vector omega(enc.n_modes);
    for (Eigen::Index k = 0; k < enc.n_modes; ++k) omega[k] = omega_vals[static_cast<size_t>(k)];
    const auto evolved = integrable::evolve_encoded(enc, omega, dt, steps);
    const std::string params = state + "|" + omega_raw + "|" + io::format_value(dt) + "|" +
                               std::to_string(steps);
    io::write_file(cli::resolve_out(out).string(), cli::write_encoded(evolved,
                                                                      cli::hash_hex(params)));
    std::cout << "wrote " << cli::resolve_out(out).string() << "\n";
    return exit_ok;
}

int do_lie(double eps, double omega_drive, double dt, double T, const std::string& ensemble,
           const std::string& out) {
    const auto ens = integrable::read_ensemble_file(ensemble);
    const auto sys = lie::twist_system(eps, omega_drive);
    if (ens.n_modes() != 1) {
        throw cli::ValidationError("lie: the twist system is single-mode; ensemble has " +
                                   std::to_string(ens.n_modes()) + " modes");
    }
    const long n_steps = static_cast<long>(std::ceil(T / dt - 1e-12));
    const auto run = lie::lie_run(ens, sys, 0.0, dt, n_steps);

    const std::string params = io::format_value(eps) + "|" + io::format_value(omega_drive) + "|" +
                               io::format_value(dt) + "|" + io::format_value(T) + "|" + ensemble;
    std::string body = cli::metadata_block(cli::hash_hex(params),
                                           {"operation: lie", "system: twist (H0 = I^2/2)"});
    body += "t,action_drift,angle_residual,eps_prime,eps_total\n";
    for (size_t i = 0; i < run.reports.size(); ++i) {
        const auto& rep = run.reports[i];
        body += io::format_value(run.times[i + 1]) + "," + io::format_value(rep.action_drift) +
                "," + io::format_value(rep.angle_residual) + "," +
                io::format_value(rep.eps_prime) + "," + io::format_value(rep.eps_total) + "\n";
        if (rep.validity_warning && i == 0) {
            std::cerr << "warning: effective epsilon per step exceeds 0.1; shrink dt\n";
        }
    }
    io::write_file(cli::resolve_out(out).string(), body);
    std::cout << "wrote " << cli::resolve_out(out).string() << "\n";
    return exit_ok;
}

int do_plot(const std::string& csv, const std::string& x_col, const std::string& y_cols,
            bool log_axes, bool slope, const std::string& out) {
    const auto table = cli::read_table_file(csv);
    if (table.rows.empty()) throw cli::ValidationError("plot: no data rows in " + csv);
    std::vector<plot::Series> series;
    std::stringstream ss(y_cols);
    std::string name;
    while (std::getline(ss, name, ',')) {
        const std::string col = cli::Config::trim(name);
        if (col.empty()) continue;
        series.push_back({col, table.column(x_col), table.column(col)});
    }
    if (series.empty()) throw cli::ValidationError("plot: no y columns given");
    plot::PlotOptions opt;
    opt.log_x = opt.log_y = log_axes;
    opt.annotate_slope = slope;
    opt.x_label = x_col;
    opt.y_label = y_cols;
    opt.title = csv;
    io::write_file(cli::resolve_out(out).string(), plot::svg_line_plot(series, opt));
    std::cout << "wrote " << cli::resolve_out(out).string() << "\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hamsym: quantum-symplectic toolkit for Hamiltonian dynamics"};
    app.require_subcommand(1);
    app.footer("Default output directory comes from HAMSYM_OUT_DIR when set.\n"
               "Exit codes: 0 ok, 2 bad parameter, 3 structure rejection, 4 I/O failure.");

    auto* cmd_quantize = app.add_subcommand(
        "quantize", "Map a structured quadratic Hamiltonian to its quantum matrix");
    std::string q_input, q_out = "hq.csv";
    double q_tol = 1e-10;
    cmd_quantize->add_option("--input", q_input, "real 2Nx2N matrix CSV")->required();
    cmd_quantize->add_option("--out", q_out, "output complex matrix CSV");
    cmd_quantize->add_option("--tol", q_tol, "structure tolerance");

    auto* cmd_integrate = app.add_subcommand("integrate", "Integrate a bundled canonical system");
    std::string i_system = "pendulum", i_z0, i_method = "verlet", i_out = "traj.csv";
    double i_T = 10.0, i_dt = 1e-3;
    cmd_integrate->add_option("--system", i_system, "pendulum or harmonic");
    cmd_integrate->add_option("--z0", i_z0, "initial state, q then p")->required();
    cmd_integrate->add_option("--T", i_T, "horizon");
    cmd_integrate->add_option("--dt", i_dt, "step size");
    cmd_integrate->add_option("--method", i_method, "verlet, yoshida4 or rk4");
    cmd_integrate->add_option("--out", i_out, "trajectory CSV");

    auto* cmd_encode = app.add_subcommand("encode", "Encode an ensemble as a quantum state");
    std::string e_ensemble, e_kind = "entangled", e_out = "state.csv";
    cmd_encode->add_option("--ensemble", e_ensemble, "ensemble CSV (j,k,I,theta)")->required();
    cmd_encode->add_option("--kind", e_kind, "separable or entangled");
    cmd_encode->add_option("--out", e_out, "encoded state file");

    auto* cmd_evolve = app.add_subcommand("evolve", "Advance an encoded state by diagonal unitaries");
    std::string v_state, v_omega, v_out = "evolved.csv";
    double v_dt = 0.1;
    long v_steps = 1;
    cmd_evolve->add_option("--state", v_state, "encoded state file")->required();
    cmd_evolve->add_option("--omega", v_omega, "mode frequencies, comma separated")->required();
    cmd_evolve->add_option("--dt", v_dt, "step size");
    cmd_evolve->add_option("--steps", v_steps, "number of steps");
    cmd_evolve->add_option("--out", v_out, "output state file");

    auto* cmd_observe = app.add_subcommand("observe", "Read out partition-function observables");
    std::string o_ensemble, o_observable = "action:0", o_subset = "all";
    std::string o_encoding = "entangled", o_omega, o_out = "report.csv";
    long o_shots = 1000, o_seed = 1;
    cmd_observe->add_option("--ensemble", o_ensemble, "ensemble CSV")->required();
    cmd_observe->add_option("--observable", o_observable, "action:k, energy or coherence");
    cmd_observe->add_option("--subset", o_subset, "all or comma-separated trajectory indices");
    cmd_observe->add_option("--shots", o_shots, "projective measurement count");
    cmd_observe->add_option("--seed", o_seed, "sampler seed");
    cmd_observe->add_option("--encoding", o_encoding, "separable or entangled");
    cmd_observe->add_option("--omega", o_omega, "frequencies for the energy observable");
    cmd_observe->add_option("--out", o_out, "report CSV");

    auto* cmd_lie = app.add_subcommand("lie", "Lie-unitary stepping of an ensemble (twist system)");
    std::string l_ensemble, l_out = "series.csv";
    double l_eps = 0.01, l_omega = 1.0, l_dt = 0.1, l_T = 10.0;
    cmd_lie->add_option("--eps", l_eps, "perturbation strength");
    cmd_lie->add_option("--omega-drive", l_omega, "drive frequency of the cosine mode");
    cmd_lie->add_option("--dt", l_dt, "step size");
    cmd_lie->add_option("--T", l_T, "horizon");
    cmd_lie->add_option("--ensemble", l_ensemble, "single-mode ensemble CSV")->required();
    cmd_lie->add_option("--out", l_out, "per-step series CSV");

    auto* cmd_bench = app.add_subcommand("lie-bench", "Error grids for Lie order fits");
    std::string b_eps = "0.005,0.01,0.02", b_dt = "0.1,0.2,0.4", b_out = "lie-bench.csv";
    double b_T = 20.0, b_omega = 1.0, b_action = 1.3, b_theta = 0.7, b_t0 = 0.3;
    cmd_bench->add_option("--eps", b_eps, "comma list of strengths");
    cmd_bench->add_option("--dt", b_dt, "comma list of step sizes");
    cmd_bench->add_option("--T", b_T, "global probe horizon");
    cmd_bench->add_option("--omega-drive", b_omega, "drive frequency");
    cmd_bench->add_option("--I0", b_action, "initial action");
    cmd_bench->add_option("--theta0", b_theta, "initial angle");
    cmd_bench->add_option("--t0", b_t0, "start time");
    cmd_bench->add_option("--out", b_out, "grid CSV");

    auto* cmd_cx = app.add_subcommand("complexity", "Quantum vs classical cost table");
    long cx_n = 4, cx_ns = 1024, cx_nt = 100;
    double cx_eps = 0.1, cx_eps_t = 0.01, cx_kappa = 2.0;
    std::string cx_nu = "1,2,3", cx_out = "complexity.csv";
    cmd_cx->add_option("--n", cx_n, "modes per trajectory N");
    cmd_cx->add_option("--ns", cx_ns, "trajectory count N_s");
    cmd_cx->add_option("--nt", cx_nt, "step count N_t (T = N_t unit steps)");
    cmd_cx->add_option("--eps", cx_eps, "perturbation strength");
    cmd_cx->add_option("--eps-t", cx_eps_t, "total error budget");
    cmd_cx->add_option("--nu", cx_nu, "comma list of Lie orders");
    cmd_cx->add_option("--kappa", cx_kappa, "classical integrator order");
    cmd_cx->add_option("--out", cx_out, "table CSV");

    auto* cmd_plot = app.add_subcommand("plot", "Render CSV columns to a static SVG");
    std::string p_csv, p_x, p_y, p_out = "plot.svg";
    bool p_log = false, p_slope = false;
    cmd_plot->add_option("--csv", p_csv, "input table")->required();
    cmd_plot->add_option("--x", p_x, "x column name")->required();
    cmd_plot->add_option("--y", p_y, "comma list of y column names")->required();
    cmd_plot->add_flag("--log", p_log, "log-log axes");
    cmd_plot->add_flag("--slope", p_slope, "annotate the fitted slope of the first series");
    cmd_plot->add_option("--out", p_out, "output SVG");

    auto* cmd_run = app.add_subcommand("run", "Execute a config-driven experiment");
    std::string r_config, r_out_dir;
    cmd_run->add_option("--config", r_config, "key = value experiment file")->required();
    cmd_run->add_option("--out-dir", r_out_dir, "output directory (overrides HAMSYM_OUT_DIR)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_quantize->parsed()) return do_quantize(q_input, q_out, q_tol);
        if (cmd_integrate->parsed()) return do_integrate(i_system, i_z0, i_T, i_dt, i_method, i_out);
        if (cmd_encode->parsed()) return do_encode(e_ensemble, e_kind, e_out);
        if (cmd_evolve->parsed()) return do_evolve(v_state, v_omega, v_dt, v_steps, v_out);
        if (cmd_observe->parsed()) {
            auto cfg = config_from_pairs({{"ensemble", o_ensemble},
                                          {"observable", o_observable},
                                          {"subset", o_subset},
                                          {"shots", std::to_string(o_shots)},
                                          {"seed", std::to_string(o_seed)},
                                          {"encoding", o_encoding},
                                          {"out", o_out}});
            if (!o_omega.empty()) cfg.values["omega"] = o_omega;
            for (const auto& path : cli::run_observables(cfg)) std::cout << "wrote " << path << "\n";
            return exit_ok;
        }
        if (cmd_lie->parsed()) return do_lie(l_eps, l_omega, l_dt, l_T, l_ensemble, l_out);
        if (cmd_bench->parsed()) {
            auto cfg = config_from_pairs({{"eps", b_eps},
                                          {"dt", b_dt},
                                          {"T", io::format_value(b_T)},
                                          {"omega_drive", io::format_value(b_omega)},
                                          {"I0", io::format_value(b_action)},
                                          {"theta0", io::format_value(b_theta)},
                                          {"t0", io::format_value(b_t0)},
                                          {"out", b_out}});
            for (const auto& path : cli::run_lie_bench(cfg)) std::cout << "wrote " << path << "\n";
            return exit_ok;
        }
        if (cmd_cx->parsed()) {
            auto cfg = config_from_pairs({{"N", std::to_string(cx_n)},
                                          {"N_s", std::to_string(cx_ns)},
                                          {"N_t", std::to_string(cx_nt)},
                                          {"eps", io::format_value(cx_eps)},
                                          {"eps_t", io::format_value(cx_eps_t)},
                                          {"nu", cx_nu},
                                          {"kappa", io::format_value(cx_kappa)},
                                          {"out", cx_out}});
            for (const auto& path : cli::run_complexity(cfg)) std::cout << "wrote " << path << "\n";
            return exit_ok;
        }
        if (cmd_plot->parsed()) return do_plot(p_csv, p_x, p_y, p_log, p_slope, p_out);
        if (cmd_run->parsed()) {
            const auto cfg = cli::Config::parse_file(r_config);
            for (const auto& path : cli::run(cfg, r_out_dir)) std::cout << "wrote " << path << "\n";
            return exit_ok;
        }
    } catch (const cli::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_bad_parameter;
    } catch (const quantize::StructureError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_structure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_bad_parameter;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.rfind("cannot open", 0) == 0 || msg.rfind("cannot write", 0) == 0) return exit_io;
        return exit_error;
    }
    return exit_error;
}
