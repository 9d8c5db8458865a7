// Command-line front end: path simulation, transform-kernel solving, one-shot
// drift estimation, and the Monte Carlo convergence-rate experiment.
//
// Exit codes: 0 = success / all declared checks pass, 1 = a declared check
// failed or a computation error occurred, 2 = usage or configuration error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <mfbm/mfbm.hpp>

namespace {

mfbm::ThetaSpec theta_from_cli(const std::string& form, double a, double b, double omega,
                               double L, double gamma, double T) {
    if (form == "constant")
        return mfbm::ThetaSpec::constant(a, L, gamma);
    if (form == "linear")
        return mfbm::ThetaSpec::linear(a, b, L < 0.0 ? std::abs(a) + std::abs(b) * T : L,
                                       gamma);
    if (form == "sine")
        return mfbm::ThetaSpec::sine(a, b, omega, L < 0.0 ? std::abs(a) + std::abs(b) : L,
                                     gamma);
    throw CLI::ValidationError("--theta-form", "must be constant|linear|sine");
}

int run_simulate(double H, double T, std::size_t n, std::uint64_t seed,
                 const std::string& method, const std::string& out,
                 const std::string& theta_form, double a, double b, double omega, double L,
                 double x0, double eps, const std::string& scheme) {
    const mfbm::TimeGrid grid(T, n);
    const mfbm::HurstIndex h(H);
    mfbm::SamplerConfig sc;
    sc.seed = seed;
    sc.method = method == "cholesky" || method == "cholesky_exact"
                    ? mfbm::SamplerMethod::cholesky_exact
                    : mfbm::SamplerMethod::spectral_fast;
    const mfbm::MixedPathDraw draw = mfbm::sample_mixed_path(grid, h, sc);

    if (theta_form.empty()) {
        mfbm::CsvWriter csv(out, {"t", "W", "WH", "mixed"});
        for (std::size_t i = 0; i < grid.points(); ++i)
            csv.row(std::vector<double>{grid.t(i), draw.brownian[i], draw.fbm[i],
                                        draw.mixed[i]});
        std::cout << "wrote " << out << " (" << grid.points() << " noise samples)\n";
        return 0;
    }

    const mfbm::ThetaSpec theta = theta_from_cli(theta_form, a, b, omega, L, 1.0, T);
    mfbm::ModelSpec model{theta, x0, eps, h, grid};
    model.validate();
    const mfbm::GridPath x = mfbm::limit_ode(theta, x0, grid);
    const mfbm::GridPath X = mfbm::simulate_X(
        model, draw.mixed,
        scheme == "euler" ? mfbm::SimScheme::euler : mfbm::SimScheme::exact_linear);

    mfbm::CsvWriter csv(out, {"t", "x_limit", "X", "mixed"});
    for (std::size_t i = 0; i < grid.points(); ++i)
        csv.row(std::vector<double>{grid.t(i), x[i], X[i], draw.mixed[i]});
    std::cout << "wrote " << out << " (" << grid.points() << " state samples)\n";
    return 0;
}

int run_solve_kernel(double H, double T, std::size_t n, const std::string& out) {
    const mfbm::TimeGrid grid(T, n);
    const mfbm::HurstIndex h(H);
    const mfbm::GHKernelFamily fam = mfbm::build_family(grid, h);

    mfbm::CsvWriter csv(out, {"t", "g_horizon", "qv", "qv_density"});
    for (std::size_t i = 0; i < grid.points(); ++i)
        csv.row(std::vector<double>{grid.t(i), fam.g[n][i], fam.qv[i], fam.qv_density[i]});
    std::cout << "wrote " << out << " (kernel at horizon T=" << mfbm::fmt_g17(T)
              << ", bracket T -> " << mfbm::fmt_g17(fam.qv[n]) << ")\n";
    return 0;
}

int run_estimate(const std::string& config_path, const std::string& out, double h_const,
                 const std::string& kernel, double gamma, double eps_cli, std::size_t rep,
                 bool emit_z) {
    const mfbm::KvConfig kv = mfbm::KvConfig::load(config_path);
    mfbm::ExperimentConfig cfg = mfbm::ExperimentConfig::from_config(kv);
    if (h_const > 0.0)
        cfg.estimator.bandwidth_constant = h_const;
    if (!kernel.empty()) {
        if (kernel == "epa" || kernel == "epanechnikov")
            cfg.estimator.kernel = mfbm::KernelSpec::epanechnikov();
        else if (kernel == "uniform")
            cfg.estimator.kernel = mfbm::KernelSpec::uniform();
        else
            throw CLI::ValidationError("--kernel", "must be epa|uniform");
    }
    if (gamma > 0.0)
        cfg.estimator.gamma = gamma;
    double eps = eps_cli > 0.0 ? eps_cli : kv.get_double("model.eps", 0.1);

    const mfbm::ExperimentContext ctx = mfbm::build_context(cfg);

    mfbm::SamplerConfig sc;
    sc.seed = mfbm::derive_stream_seed(cfg.seed, rep);
    sc.method = cfg.method;
    const mfbm::MixedPathDraw draw = mfbm::sample_mixed_path(cfg.grid, cfg.H, sc);
    const mfbm::ModelSpec model{cfg.theta, cfg.x0, eps, cfg.H, cfg.grid};
    const mfbm::GridPath X = mfbm::simulate_X(model, draw.mixed, cfg.scheme);
    const mfbm::GridPath Z = mfbm::transform_to_Z(X, ctx.family);
    const mfbm::QHatResult qhat = mfbm::estimate_q_path(Z, ctx.family, cfg.estimator, eps);

    std::vector<std::string> header{"t", "qhat", "qstar", "boundary_flag"};
    if (emit_z)
        header.push_back("Z");
    mfbm::CsvWriter csv(out, header);
    for (std::size_t i = 0; i < cfg.grid.points(); ++i) {
        std::vector<std::string> row{mfbm::fmt_g17(cfg.grid.t(i)), mfbm::fmt_g17(qhat.qhat[i]),
                                     mfbm::fmt_g17(ctx.qstar[i]),
                                     std::to_string(static_cast<int>(qhat.boundary[i]))};
        if (emit_z)
            row.push_back(mfbm::fmt_g17(Z[i]));
        csv.row(row);
    }
    std::cout << "wrote " << out << " (eps=" << mfbm::fmt_g17(eps)
              << ", h=" << mfbm::fmt_g17(qhat.h) << ", replication " << rep << ")\n";
    return 0;
}

int run_rate_experiment(const std::string& config_path, const std::string& out_dir,
                        int threads_cli) {
    const mfbm::KvConfig kv = mfbm::KvConfig::load(config_path);
    mfbm::ExperimentConfig cfg = mfbm::ExperimentConfig::from_config(kv);
    if (threads_cli > 0)
        cfg.threads = static_cast<unsigned>(threads_cli);

    const mfbm::RateReport rep = mfbm::run_rate_experiment(cfg);
    mfbm::write_report_files(rep, cfg, out_dir);

    std::cout << "rate experiment: " << cfg.eps_list.size() << " eps levels x "
              << cfg.replications << " replications (threads=" << cfg.threads << ")\n";
    for (const mfbm::RatePoint& p : rep.points)
        std::cout << "  eps=" << mfbm::fmt_g17(p.eps) << "  h=" << mfbm::fmt_g17(p.h)
                  << "  sup_risk=" << mfbm::fmt_g17(p.risk)
                  << "  se=" << mfbm::fmt_g17(p.se) << "\n";
    std::cout << "monotone_decreasing = " << (rep.monotone ? "true" : "false") << "\n";
    std::cout << "theory_exponent = " << mfbm::fmt_g17(rep.theory_exponent) << "\n";
    if (rep.slope_available)
        std::cout << "fitted_slope = " << mfbm::fmt_g17(rep.slope) << " (band ["
                  << mfbm::fmt_g17(rep.slope_min) << ", " << mfbm::fmt_g17(rep.slope_max)
                  << "])\n";
    std::cout << "pass = " << (rep.pass() ? "true" : "false") << "\n";
    std::cout << "reports in " << out_dir << "\n";
    return rep.pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed fractional Brownian drift-multiplier estimation toolkit"};
    app.require_subcommand(1);

    // --- simulate ---
    auto* sim = app.add_subcommand("simulate", "sample noise (and optionally state) paths");
    double sim_H = 0.7, sim_T = 1.0;
    std::size_t sim_n = 512;
    std::uint64_t sim_seed = 0;
    std::string sim_method = "spectral", sim_out;
    std::string sim_form, sim_scheme = "exact";
    double sim_a = 0.5, sim_b = 0.0, sim_omega = 0.0, sim_L = -1.0, sim_x0 = 1.0,
           sim_eps = 0.1;
    sim->add_option("--H", sim_H, "Hurst index (0.5 or in (0.5,1))")->required();
    sim->add_option("--T", sim_T, "horizon");
    sim->add_option("--n", sim_n, "grid steps")->required();
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--method", sim_method, "spectral|cholesky");
    sim->add_option("--out", sim_out, "output CSV")->required();
    sim->add_option("--theta-form", sim_form, "constant|linear|sine (enables state output)");
    sim->add_option("--theta-a", sim_a, "theta parameter a");
    sim->add_option("--theta-b", sim_b, "theta parameter b");
    sim->add_option("--theta-omega", sim_omega, "theta parameter omega");
    sim->add_option("--theta-L", sim_L, "declared bound on |theta| (default: derived)");
    sim->add_option("--x0", sim_x0, "initial state");
    sim->add_option("--eps", sim_eps, "noise level");
    sim->add_option("--scheme", sim_scheme, "exact|euler");

    // --- solve-kernel ---
    auto* ker = app.add_subcommand("solve-kernel", "solve the transform kernel family");
    double ker_H = 0.7, ker_T = 1.0;
    std::size_t ker_n = 256;
    std::string ker_out;
    ker->add_option("--H", ker_H, "Hurst index")->required();
    ker->add_option("--T", ker_T, "horizon");
    ker->add_option("--n", ker_n, "grid steps")->required();
    ker->add_option("--out", ker_out, "output CSV")->required();

    // --- estimate ---
    auto* est = app.add_subcommand("estimate", "one-shot drift estimate on a simulated path");
    std::string est_cfg, est_out, est_kernel;
    double est_hc = -1.0, est_gamma = -1.0, est_eps = -1.0;
    std::size_t est_rep = 0;
    bool est_emit_z = false;
    est->add_option("--config", est_cfg, "config file")->required();
    est->add_option("--out", est_out, "output CSV")->required();
    est->add_option("--h-const", est_hc, "override bandwidth constant");
    est->add_option("--kernel", est_kernel, "override kernel: epa|uniform");
    est->add_option("--gamma", est_gamma, "override smoothness exponent");
    est->add_option("--eps", est_eps, "override noise level");
    est->add_option("--rep", est_rep, "replication index (noise stream)");
    est->add_flag("--emit-z", est_emit_z, "also write the transformed path Z");

    // --- rate-experiment ---
    auto* rate = app.add_subcommand("rate-experiment", "Monte Carlo convergence-rate study");
    std::string rate_cfg, rate_dir;
    int rate_threads = -1;
    rate->add_option("--config", rate_cfg, "config file")->required();
    rate->add_option("--out-dir", rate_dir, "output directory")->required();
    rate->add_option("--threads", rate_threads, "override worker thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            return run_simulate(sim_H, sim_T, sim_n, sim_seed, sim_method, sim_out, sim_form,
                                sim_a, sim_b, sim_omega, sim_L, sim_x0, sim_eps, sim_scheme);
        if (ker->parsed())
            return run_solve_kernel(ker_H, ker_T, ker_n, ker_out);
        if (est->parsed())
            return run_estimate(est_cfg, est_out, est_hc, est_kernel, est_gamma, est_eps,
                                est_rep, est_emit_z);
        if (rate->parsed())
            return run_rate_experiment(rate_cfg, rate_dir, rate_threads);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
