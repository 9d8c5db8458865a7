#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "fredholm_kernel.hpp"
#include "gaussian_paths.hpp"
#include "grid.hpp"
#include "kernel_estimator.hpp"
#include "rng.hpp"
#include "sde_sim.hpp"
#include "transform.hpp"

namespace mfbm {

/// Full description of a convergence-rate experiment: model, estimator, the
/// eps ladder, and execution parameters.
struct ExperimentConfig {
    ThetaSpec theta = ThetaSpec::constant(0.5);
    double x0 = 1.0;
    HurstIndex H{0.7};
    TimeGrid grid{1.0, 512};
    EstimatorSpec estimator{};
    std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
    std::size_t replications = 200;
    std::uint64_t seed = 20260819;
    SamplerMethod method = SamplerMethod::spectral_fast;
    SimScheme scheme = SimScheme::exact_linear;
    unsigned threads = 1;
    double slope_min = 0.8;
    double slope_max = 1.5;
    KvConfig raw; ///< the parsed config, kept verbatim for echoing

    void validate() const {
        ModelSpec{theta, x0, eps_list.empty() ? 1.0 : eps_list.front(), H, grid}.validate();
        if (eps_list.empty())
            throw std::invalid_argument("experiment: eps_list must be nonempty");
        for (std::size_t i = 0; i < eps_list.size(); ++i) {
            if (!(eps_list[i] > 0.0))
                throw std::invalid_argument("experiment: eps values must be positive");
            if (i && !(eps_list[i] < eps_list[i - 1]))
                throw std::invalid_argument("experiment: eps_list must be strictly decreasing");
        }
        if (replications < 2)
            throw std::invalid_argument("experiment: need at least 2 replications");
        if (threads < 1)
            throw std::invalid_argument("experiment: threads must be >= 1");
        if (!(slope_min < slope_max))
            throw std::invalid_argument("experiment: slope band is empty");
    }

    /// Build from a parsed key = value config (sections [model], [estimator],
    /// [experiment]); unknown keys are ignored, missing keys take defaults.
    static ExperimentConfig from_config(const KvConfig& kv) {
        ExperimentConfig cfg;
        cfg.raw = kv;

        const double T = kv.get_double("model.T", 1.0);
        const auto n = static_cast<std::size_t>(kv.get_u64("model.n", 512));
        cfg.grid = TimeGrid(T, n);
        cfg.H = HurstIndex(kv.get_double("model.H", 0.7));
        cfg.x0 = kv.get_double("model.x0", 1.0);

        const std::string form = kv.get_string("model.theta_form", "constant");
        const double a = kv.get_double("model.theta_a", 0.5);
        const double b = kv.get_double("model.theta_b", 0.0);
        const double omega = kv.get_double("model.theta_omega", 0.0);
        const double gamma = kv.get_double("model.gamma", 1.0);
        const double L = kv.get_double("model.theta_L", -1.0);
        if (form == "constant") {
            cfg.theta = ThetaSpec::constant(a, L, gamma);
        } else if (form == "linear") {
            cfg.theta = ThetaSpec::linear(a, b, L < 0.0 ? std::abs(a) + std::abs(b) * T : L,
                                          gamma);
        } else if (form == "sine") {
            cfg.theta = ThetaSpec::sine(a, b, omega, L < 0.0 ? std::abs(a) + std::abs(b) : L,
                                        gamma);
        } else {
            throw std::invalid_argument("config: unknown model.theta_form '" + form +
                                        "' (constant|linear|sine)");
        }

        const std::string kern = kv.get_string("estimator.kernel", "epanechnikov");
        if (kern == "epanechnikov" || kern == "epa")
            cfg.estimator.kernel = KernelSpec::epanechnikov();
        else if (kern == "uniform")
            cfg.estimator.kernel = KernelSpec::uniform();
        else
            throw std::invalid_argument("config: unknown estimator.kernel '" + kern +
                                        "' (epanechnikov|uniform)");
        cfg.estimator.bandwidth_constant = kv.get_double("estimator.bandwidth_constant", 1.0);
        cfg.estimator.gamma = gamma;
        const std::string policy = kv.get_string("estimator.policy", "interior");
        if (policy == "interior" || policy == "interior_only")
            cfg.estimator.policy = EvalPolicy::interior_only;
        else if (policy == "full" || policy == "full_with_flag")
            cfg.estimator.policy = EvalPolicy::full_with_flag;
        else
            throw std::invalid_argument("config: unknown estimator.policy '" + policy +
                                        "' (interior|full)");

        if (kv.has("experiment.eps_list"))
            cfg.eps_list = kv.get_double_list("experiment.eps_list");
        cfg.replications = static_cast<std::size_t>(kv.get_u64("experiment.replications", 200));
        cfg.seed = kv.get_u64("experiment.seed", 20260819);
        const std::string method = kv.get_string("experiment.method", "spectral_fast");
        if (method == "spectral_fast" || method == "spectral")
            cfg.method = SamplerMethod::spectral_fast;
        else if (method == "cholesky_exact" || method == "cholesky")
            cfg.method = SamplerMethod::cholesky_exact;
        else
            throw std::invalid_argument("config: unknown experiment.method '" + method +
                                        "' (spectral_fast|cholesky_exact)");
        cfg.threads = static_cast<unsigned>(kv.get_u64("experiment.threads", 1));
        cfg.slope_min = kv.get_double("experiment.slope_min", 0.8);
        cfg.slope_max = kv.get_double("experiment.slope_max", 1.5);

        cfg.validate();
        return cfg;
    }
};

/// Expensive per-configuration state shared by every replication: the kernel
/// family for the grid and the deterministic target.
struct ExperimentContext {
    GHKernelFamily family;
    GridPath x_limit;
    QPath qstar;
};

inline ExperimentContext build_context(const ExperimentConfig& cfg) {
    GHKernelFamily fam = build_family(cfg.grid, cfg.H);
    GridPath x_limit = limit_ode(cfg.theta, cfg.x0, cfg.grid);
    QPath qstar = q_star(cfg.theta, cfg.x0, fam);
    return ExperimentContext{std::move(fam), std::move(x_limit), std::move(qstar)};
}

/// Everything one (eps, replication) cell produces.
struct ReplicationResult {
    QHatResult qhat;
    DeviationBoundReport bounds;
};

/// Run replication rep_index at noise level eps. The noise seed depends only
/// on (config seed, rep_index), not on eps, so the same replication index
/// reuses the same noise path across the whole eps ladder (common random
/// numbers); and it does not depend on scheduling, so results are identical
/// for any thread count.
inline ReplicationResult run_replication(const ExperimentConfig& cfg,
                                         const ExperimentContext& ctx, double eps,
                                         std::size_t rep_index) {
    SamplerConfig sc;
    sc.seed = derive_stream_seed(cfg.seed, rep_index);
    sc.method = cfg.method;
    const MixedPathDraw draw = sample_mixed_path(cfg.grid, cfg.H, sc);

    const ModelSpec model{cfg.theta, cfg.x0, eps, cfg.H, cfg.grid};
    const GridPath X = simulate_X(model, draw.mixed, cfg.scheme);
    const GridPath Z = transform_to_Z(X, ctx.family);
    QHatResult qhat = estimate_q_path(Z, ctx.family, cfg.estimator, eps);
    const DeviationBoundReport bounds =
        deviation_bound_report(X, ctx.x_limit, draw.mixed, cfg.theta.bound(), eps, cfg.H);
    return ReplicationResult{std::move(qhat), bounds};
}

/// Ordinary least squares slope of log(risk) against log(eps).
inline double fit_loglog_slope(const std::vector<double>& eps,
                               const std::vector<double>& risk) {
    if (eps.size() != risk.size() || eps.size() < 3)
        throw std::invalid_argument("fit_loglog_slope: need >= 3 matched points");
    std::vector<double> x(eps.size()), y(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0) || !(risk[i] > 0.0))
            throw std::invalid_argument("fit_loglog_slope: values must be positive");
        x[i] = std::log(eps[i]);
        y[i] = std::log(risk[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

/// One row of the rate table (one eps level).
struct RatePoint {
    double eps;
    double h;
    double risk;
    double se;
    std::size_t argmax;
    std::size_t interior_points;
    std::size_t pathwise_violations;     ///< literal deviation envelope failures
    std::size_t pathwise_sup_violations; ///< running-sup envelope failures
};

/// Aggregated outcome of a rate experiment.
struct RateReport {
    std::vector<RatePoint> points;
    std::vector<std::vector<double>> risk_curves; ///< per eps: mean sq error per grid point
    std::vector<std::uint8_t> evaluated;          ///< mask of points entering the sup
    bool monotone = false;       ///< risks strictly decrease along the eps ladder
    bool slope_available = false;
    double slope = 0.0;          ///< meaningful only if slope_available
    double theory_exponent = 0.0;
    double slope_min = 0.0, slope_max = 0.0;
    bool slope_in_band = false;  ///< meaningful only if slope_available
    double runtime_sec = 0.0;

    /// The experiment's declared checks: risks decrease along the ladder,
    /// and (when fitted) the log-log slope lies in the configured band.
    bool pass() const { return monotone && (!slope_available || slope_in_band); }
};

/// Run the full Monte Carlo rate experiment. Replications are distributed
/// over cfg.threads workers; every replication is an independent function of
/// (seed, rep_index, eps) and the reduction runs in fixed index order, so the
/// report (and any files written from it) is identical for any thread count.
inline RateReport run_rate_experiment(const ExperimentConfig& cfg,
                                      const ExperimentContext& ctx) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t R = cfg.replications;
    const std::size_t E = cfg.eps_list.size();

    std::vector<std::vector<std::optional<ReplicationResult>>> cells(E);
    for (auto& v : cells)
        v.resize(R);

    const unsigned workers = std::min<unsigned>(cfg.threads, static_cast<unsigned>(R));
    auto work = [&](std::size_t rep_lo, std::size_t rep_hi) {
        for (std::size_t r = rep_lo; r < rep_hi; ++r)
            for (std::size_t e = 0; e < E; ++e)
                cells[e][r] = run_replication(cfg, ctx, cfg.eps_list[e], r);
    };

    if (workers <= 1) {
        work(0, R);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(workers);
        const std::size_t chunk = (R + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t lo = std::min<std::size_t>(R, w * chunk);
            const std::size_t hi = std::min<std::size_t>(R, lo + chunk);
            pool.emplace_back([&, w, lo, hi] {
                try {
                    work(lo, hi);
                } catch (...) {
                    errs[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool)
            th.join();
        for (auto& ep : errs)
            if (ep)
                std::rethrow_exception(ep);
    }

    RateReport rep;
    rep.theory_exponent = 8.0 * cfg.estimator.gamma / (4.0 * cfg.estimator.gamma + 3.0);
    rep.slope_min = cfg.slope_min;
    rep.slope_max = cfg.slope_max;

    for (std::size_t e = 0; e < E; ++e) {
        std::vector<QHatResult> qhats;
        qhats.reserve(R);
        std::size_t viol = 0, sup_viol = 0;
        for (std::size_t r = 0; r < R; ++r) {
            ReplicationResult& cell = *cells[e][r];
            viol += cell.bounds.pathwise_ok ? 0 : 1;
            sup_viol += cell.bounds.pathwise_sup_ok ? 0 : 1;
            qhats.push_back(std::move(cell.qhat));
        }
        const RiskSummary rs = sup_risk(qhats, ctx.qstar, cfg.estimator.policy);
        RatePoint pt;
        pt.eps = cfg.eps_list[e];
        pt.h = qhats.front().h;
        pt.risk = rs.value;
        pt.se = rs.se_at_argmax;
        pt.argmax = rs.argmax;
        pt.interior_points = 0;
        for (std::uint8_t f : rs.evaluated)
            pt.interior_points += f;
        pt.pathwise_violations = viol;
        pt.pathwise_sup_violations = sup_viol;
        rep.points.push_back(pt);
        rep.risk_curves.push_back(rs.mean_sq);
        if (e == 0)
            rep.evaluated = rs.evaluated;
    }

    rep.monotone = true;
    for (std::size_t e = 1; e < E; ++e)
        rep.monotone = rep.monotone && rep.points[e].risk < rep.points[e - 1].risk;

    if (E >= 3) {
        std::vector<double> es, rs;
        bool positive = true;
        for (const RatePoint& p : rep.points) {
            es.push_back(p.eps);
            rs.push_back(p.risk);
            positive = positive && p.risk > 0.0;
        }
        if (positive) {
            rep.slope = fit_loglog_slope(es, rs);
            rep.slope_available = true;
            rep.slope_in_band = rep.slope >= cfg.slope_min && rep.slope <= cfg.slope_max;
        }
    }

    rep.runtime_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline RateReport run_rate_experiment(const ExperimentConfig& cfg) {
    const ExperimentContext ctx = build_context(cfg);
    return run_rate_experiment(cfg, ctx);
}

/// Write the report's file set into out_dir:
///   risks.csv       one row per eps (byte-stable across thread counts)
///   risk_curves.csv per-point mean squared error curves (byte-stable)
///   report.txt      human-readable summary (includes wall time, not stable)
///   config.json     echo of the raw config
inline void write_report_files(const RateReport& rep, const ExperimentConfig& cfg,
                               const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    {
        CsvWriter csv((dir / "risks.csv").string(),
                      {"eps", "h", "sup_risk", "se_at_argmax", "argmax_t", "interior_points"});
        for (const RatePoint& p : rep.points)
            csv.row({fmt_g17(p.eps), fmt_g17(p.h), fmt_g17(p.risk), fmt_g17(p.se),
                     fmt_g17(cfg.grid.t(p.argmax)), std::to_string(p.interior_points)});
    }

    {
        std::vector<std::string> header{"t", "evaluated"};
        for (std::size_t e = 0; e < rep.points.size(); ++e)
            header.push_back("mse_eps" + std::to_string(e + 1));
        CsvWriter csv((dir / "risk_curves.csv").string(), header);
        for (std::size_t j = 0; j < cfg.grid.points(); ++j) {
            std::vector<std::string> row{fmt_g17(cfg.grid.t(j)),
                                         std::to_string(static_cast<int>(rep.evaluated[j]))};
            for (const auto& curve : rep.risk_curves)
                row.push_back(fmt_g17(curve[j]));
            csv.row(row);
        }
    }

    {
        std::ofstream out(dir / "report.txt");
        if (!out)
            throw std::runtime_error("cannot open report.txt in " + out_dir);
        out << "[experiment]\n";
        out << "replications = " << cfg.replications << "\n";
        out << "seed = " << cfg.seed << "\n";
        out << "threads = " << cfg.threads << "\n";
        out << "grid_steps = " << cfg.grid.steps() << "\n";
        out << "horizon = " << fmt_g17(cfg.grid.horizon()) << "\n";
        out << "hurst = " << fmt_g17(cfg.H.value()) << "\n";
        out << "runtime_sec = " << fmt_g17(rep.runtime_sec) << "\n";
        out << "\n[rate]\n";
        for (std::size_t e = 0; e < rep.points.size(); ++e) {
            const RatePoint& p = rep.points[e];
            out << "eps_" << (e + 1) << " = " << fmt_g17(p.eps) << "\n";
            out << "h_" << (e + 1) << " = " << fmt_g17(p.h) << "\n";
            out << "sup_risk_" << (e + 1) << " = " << fmt_g17(p.risk) << "\n";
            out << "se_" << (e + 1) << " = " << fmt_g17(p.se) << "\n";
            out << "pathwise_violations_" << (e + 1) << " = " << p.pathwise_violations
                << " of " << cfg.replications << "\n";
        }
        out << "\n[verdict]\n";
        out << "monotone_decreasing = " << (rep.monotone ? "true" : "false") << "\n";
        out << "theory_exponent = " << fmt_g17(rep.theory_exponent) << "\n";
        if (rep.slope_available) {
            out << "fitted_slope = " << fmt_g17(rep.slope) << "\n";
            out << "slope_band = [" << fmt_g17(rep.slope_min) << ", "
                << fmt_g17(rep.slope_max) << "]\n";
            out << "slope_in_band = " << (rep.slope_in_band ? "true" : "false") << "\n";
        } else {
            out << "fitted_slope = unavailable (need >= 3 eps levels)\n";
        }
        out << "pass = " << (rep.pass() ? "true" : "false") << "\n";
    }

    {
        std::ofstream out(dir / "config.json");
        if (!out)
            throw std::runtime_error("cannot open config.json in " + out_dir);
        out << cfg.raw.to_json().dump(2) << "\n";
    }
}

} // namespace mfbm
