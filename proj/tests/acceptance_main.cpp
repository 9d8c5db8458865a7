// Acceptance suite: eight end-to-end checks with fixed parameters and time
// budgets, one PASS/FAIL line each. Exit code = number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <mfbm/mfbm.hpp>

#ifndef MFBM_CONFIG_DIR
#define MFBM_CONFIG_DIR "configs"
#endif

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool pass;
    std::string detail;
};

void print_line(int id, const char* name, const Outcome& o, double elapsed) {
    std::printf("[%s] criterion %d: %s — %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name,
                o.detail.c_str(), elapsed);
    std::fflush(stdout);
}

std::string g17(double v) { return mfbm::fmt_g17(v); }

// --- 1: Brownian special case is analytic and exact -------------------------
Outcome criterion1(double budget, double& elapsed) {
    const auto t0 = Clock::now();
    double worst_g = 0.0;
    bool qv_exact = true, density_exact = true;
    for (std::size_t n : {std::size_t{16}, std::size_t{128}, std::size_t{1024}}) {
        const mfbm::TimeGrid grid(1.0, n);
        const mfbm::GHKernelFamily fam = mfbm::build_family(grid, mfbm::HurstIndex(0.5));
        for (std::size_t j = 1; j <= n; ++j) {
            for (double v : fam.g[j])
                worst_g = std::max(worst_g, std::abs(v - 0.5));
            qv_exact = qv_exact && fam.qv[j] == 0.5 * grid.t(j);
            density_exact = density_exact && fam.qv_density[j] == 0.5;
        }
    }
    elapsed = seconds_since(t0);
    const bool ok =
        worst_g <= 1e-8 && qv_exact && density_exact && elapsed < budget;
    return {ok, "max |g - 1/2| = " + g17(worst_g) + ", qv = t/2 " +
                    (qv_exact ? "exactly" : "VIOLATED") + ", density = 1/2 " +
                    (density_exact ? "exactly" : "VIOLATED") + ", n up to 1024"};
}

// --- 2: energy identity residual, small and refining ------------------------
Outcome criterion2(double budget, double& elapsed) {
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (double hv : {0.6, 0.7, 0.9}) {
        const mfbm::HurstIndex H(hv);
        double prev = 1e300;
        double r256 = 0.0;
        bool mono = true;
        for (std::size_t m : {std::size_t{128}, std::size_t{256}, std::size_t{512}}) {
            const double r = mfbm::energy_residual(mfbm::solve_g(1.0, H, m), 1.0, H);
            if (m == 256)
                r256 = r;
            mono = mono && r <= prev;
            prev = r;
        }
        ok = ok && r256 <= 1e-3 && mono;
        detail += "H=" + g17(hv) + ": res(256)=" + g17(r256) +
                  (mono ? " decreasing" : " NOT-DECREASING") + "; ";
    }
    elapsed = seconds_since(t0);
    ok = ok && elapsed < budget;
    return {ok, detail + "threshold 1e-3 at m=256"};
}

// --- 3: transformed noise is a martingale with the computed bracket ---------
Outcome criterion3(double budget, double& elapsed) {
    const auto t0 = Clock::now();
    const std::size_t n = 128, reps = 4000;
    const mfbm::TimeGrid grid(1.0, n);
    const mfbm::HurstIndex H(0.7);
    const mfbm::GHKernelFamily fam = mfbm::build_family(grid, H);

    double sumsq_T = 0.0, cross = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        mfbm::SamplerConfig sc;
        sc.seed = mfbm::derive_stream_seed(90210, r);
        const mfbm::MixedPathDraw d = mfbm::sample_mixed_path(grid, H, sc);
        double m_half = 0.0, m_T = 0.0;
        for (std::size_t i = 0; i < n / 2; ++i)
            m_half += fam.g[n / 2][i] * (d.mixed[i + 1] - d.mixed[i]);
        for (std::size_t i = 0; i < n; ++i)
            m_T += fam.g[n][i] * (d.mixed[i + 1] - d.mixed[i]);
        sumsq_T += m_T * m_T;
        cross += m_half * (m_T - m_half);
    }
    const double R = static_cast<double>(reps);
    const double var_T = sumsq_T / R; // M_T has mean zero by construction
    const double qv_T = fam.qv[n];
    const double qv_half = fam.qv[n / 2];
    const double se_var = qv_T * std::sqrt(2.0 / R);
    const double cov_hat = cross / R;
    const double se_cov = std::sqrt(qv_half * (qv_T - qv_half) / R);

    elapsed = seconds_since(t0);
    const bool var_ok = std::abs(var_T - qv_T) <= 3.0 * se_var;
    const bool cov_ok = std::abs(cov_hat) <= 3.0 * se_cov;
    const bool ok = var_ok && cov_ok && elapsed < budget;
    return {ok, "Var(M_T)=" + g17(var_T) + " vs qv(T)=" + g17(qv_T) + " (|diff| " +
                    (var_ok ? "<=" : ">") + " 3se=" + g17(3.0 * se_var) +
                    "); disjoint-increment cov=" + g17(cov_hat) + " (|cov| " +
                    (cov_ok ? "<=" : ">") + " 3se=" + g17(3.0 * se_cov) + "); 4000 draws"};
}

// --- 4: small-noise deviation bound, literal form ---------------------------
Outcome criterion4(double budget, double& elapsed, std::string& note) {
    const auto t0 = Clock::now();
    const std::size_t n = 256, reps = 1000;
    const mfbm::TimeGrid grid(1.0, n);
    const mfbm::HurstIndex H(0.7);
    const double eps = 0.1, L = 0.5;
    const mfbm::ThetaSpec th = mfbm::ThetaSpec::constant(0.5, L);
    const mfbm::ModelSpec model{th, 1.0, eps, H, grid};
    const mfbm::GridPath x = mfbm::limit_ode(th, 1.0, grid);

    std::size_t literal_viol = 0, sup_viol = 0;
    double sum_sq_dev = 0.0, sumsq_sq_dev = 0.0, worst_slack = -1e300;
    double moment_bound = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        mfbm::SamplerConfig sc;
        sc.seed = mfbm::derive_stream_seed(31337, r);
        const mfbm::MixedPathDraw d = mfbm::sample_mixed_path(grid, H, sc);
        const mfbm::GridPath X = mfbm::simulate_X(model, d.mixed, mfbm::SimScheme::exact_linear);
        const mfbm::DeviationBoundReport rep = mfbm::deviation_bound_report(X, x, d.mixed, L, eps, H);
        literal_viol += rep.pathwise_ok ? 0 : 1;
        sup_viol += rep.pathwise_sup_ok ? 0 : 1;
        worst_slack = std::max(worst_slack, rep.max_slack);
        const double dev = X[n] - x[n];
        sum_sq_dev += dev * dev;
        sumsq_sq_dev += dev * dev * dev * dev;
        moment_bound = rep.moment_bound;
    }
    const double R = static_cast<double>(reps);
    const double mean_sq = sum_sq_dev / R;
    const double se_mean = std::sqrt((sumsq_sq_dev / R - mean_sq * mean_sq) / R);
    const bool moment_ok = mean_sq <= moment_bound + 3.0 * se_mean;
    const bool pathwise_ok = literal_viol == 0;

    elapsed = seconds_since(t0);
    const bool ok = pathwise_ok && moment_ok && elapsed < budget;
    note = "criterion 4 note: the literal per-time envelope e^{Lt} eps |V_t| fails near\n"
           "  zero crossings of V (a Gronwall argument controls the deviation by the\n"
           "  running supremum of |V|, a monotone majorant, not by the instantaneous\n"
           "  |V_t|). The running-sup envelope holds on " +
           std::to_string(reps - sup_viol) + "/" + std::to_string(reps) +
           " paths here, which is the provable form; the literal check above is\n"
           "  reported unmodified.";
    return {ok, "literal envelope holds on " + std::to_string(reps - literal_viol) + "/" +
                    std::to_string(reps) + " paths (worst slack " + g17(worst_slack) +
                    "); running-sup envelope holds on " + std::to_string(reps - sup_viol) + "/" +
                    std::to_string(reps) + "; E|X_T - x_T|^2 = " + g17(mean_sq) +
                    (moment_ok ? " <= " : " > ") + "bound " + g17(moment_bound) + " + 3se"};
}

// --- 5/6/8 share the headline experiment ------------------------------------
struct HeadlineRuns {
    mfbm::ExperimentConfig cfg1;
    mfbm::ExperimentConfig cfg8;
    mfbm::RateReport rep1;
    mfbm::RateReport rep8;
    double build_sec = 0.0;
    double run1_sec = 0.0;
    double run8_sec = 0.0;
};

HeadlineRuns run_headline() {
    HeadlineRuns out;
    const std::string cfg_path = std::string(MFBM_CONFIG_DIR) + "/rate_default.cfg";
    const mfbm::KvConfig kv = mfbm::KvConfig::load(cfg_path);
    out.cfg1 = mfbm::ExperimentConfig::from_config(kv);
    out.cfg1.threads = 1;
    out.cfg8 = out.cfg1;
    out.cfg8.threads = 8;

    auto t0 = Clock::now();
    const mfbm::ExperimentContext ctx = mfbm::build_context(out.cfg1);
    out.build_sec = seconds_since(t0);

    t0 = Clock::now();
    out.rep1 = mfbm::run_rate_experiment(out.cfg1, ctx);
    out.run1_sec = seconds_since(t0);

    t0 = Clock::now();
    out.rep8 = mfbm::run_rate_experiment(out.cfg8, ctx);
    out.run8_sec = seconds_since(t0);
    return out;
}

Outcome criterion5(const HeadlineRuns& hr, double budget) {
    std::string detail = "sup-risk over eps ladder: ";
    for (const mfbm::RatePoint& p : hr.rep1.points)
        detail += "(" + g17(p.eps) + " -> " + g17(p.risk) + ") ";
    const double elapsed = hr.build_sec + hr.run1_sec;
    const bool ok = hr.rep1.monotone && elapsed < budget;
    detail += hr.rep1.monotone ? "strictly decreasing" : "NOT strictly decreasing";
    detail += "; 200 reps, common random numbers";
    return {ok, detail};
}

Outcome criterion6(const HeadlineRuns& hr) {
    const mfbm::RateReport& r = hr.rep1;
    const bool ok = r.slope_available && r.slope_in_band;
    return {ok, "fitted log-log slope = " + (r.slope_available ? g17(r.slope) : "n/a") +
                    ", theoretical exponent 8*gamma/(4*gamma+3) = " +
                    g17(r.theory_exponent) + ", acceptance band [" + g17(r.slope_min) +
                    ", " + g17(r.slope_max) + "]"};
}

// --- 7: zero drift, zero noise => identically zero estimate -----------------
Outcome criterion7(double& elapsed) {
    const auto t0 = Clock::now();
    const std::size_t n = 64;
    const mfbm::TimeGrid grid(1.0, n);
    const mfbm::HurstIndex H(0.7);
    const mfbm::GHKernelFamily fam = mfbm::build_family(grid, H);
    const mfbm::ThetaSpec th = mfbm::ThetaSpec::constant(0.0);

    const mfbm::ModelSpec model{th, 1.0, 0.0, H, grid};
    const mfbm::GridPath noise(grid, mfbm::PathRole::mixed);
    const mfbm::GridPath X = mfbm::simulate_X(model, noise, mfbm::SimScheme::exact_linear);
    const mfbm::GridPath Z = mfbm::transform_to_Z(X, fam);
    mfbm::EstimatorSpec spec;
    const mfbm::QHatResult qhat = mfbm::estimate_q_path(Z, fam, spec, 0.1);
    const mfbm::QPath qs = mfbm::q_star(th, 1.0, fam);

    bool exact = true;
    for (std::size_t j = 0; j <= n; ++j)
        exact = exact && qhat.qhat[j] == 0.0 && qs[j] == 0.0;
    elapsed = seconds_since(t0);
    return {exact, exact ? "Qhat and Qstar are 0.0 at every grid point (bit-exact)"
                         : "nonzero value leaked into a zero-drift, zero-noise run"};
}

// --- 8: thread-count invariance of the written artifacts --------------------
Outcome criterion8(const HeadlineRuns& hr, double budget) {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "mfbm_acceptance_rate";
    fs::remove_all(base);
    mfbm::write_report_files(hr.rep1, hr.cfg1, (base / "t1").string());
    mfbm::write_report_files(hr.rep8, hr.cfg8, (base / "t8").string());

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool risks_same = slurp(base / "t1" / "risks.csv") == slurp(base / "t8" / "risks.csv");
    const bool curves_same =
        slurp(base / "t1" / "risk_curves.csv") == slurp(base / "t8" / "risk_curves.csv");
    fs::remove_all(base);

    const double elapsed = hr.run8_sec;
    const bool ok = risks_same && curves_same && elapsed < budget;
    return {ok, std::string("threads=1 vs threads=8: risks.csv ") +
                    (risks_same ? "byte-identical" : "DIFFER") + ", risk_curves.csv " +
                    (curves_same ? "byte-identical" : "DIFFER")};
}

} // namespace

int main() {
    std::printf("acceptance suite: drift-multiplier estimation toolkit\n");
    int failures = 0;
    double elapsed = 0.0;
    std::string note4;

    {
        const Outcome o = criterion1(1.0, elapsed);
        print_line(1, "Brownian reduction is analytic and exact", o, elapsed);
        failures += o.pass ? 0 : 1;
    }
    {
        const Outcome o = criterion2(30.0, elapsed);
        print_line(2, "kernel solutions satisfy the energy identity", o, elapsed);
        failures += o.pass ? 0 : 1;
    }
    {
        const Outcome o = criterion3(120.0, elapsed);
        print_line(3, "transformed noise has the computed bracket", o, elapsed);
        failures += o.pass ? 0 : 1;
    }
    {
        const Outcome o = criterion4(120.0, elapsed, note4);
        print_line(4, "small-noise deviation bounds on 1000 paths", o, elapsed);
        failures += o.pass ? 0 : 1;
    }

    const HeadlineRuns hr = run_headline();
    {
        const Outcome o = criterion5(hr, 600.0);
        print_line(5, "sup-risk decreases along the eps ladder", o,
                   hr.build_sec + hr.run1_sec);
        failures += o.pass ? 0 : 1;
    }
    {
        const Outcome o = criterion6(hr);
        print_line(6, "log-log slope matches the theoretical rate", o, 0.0);
        failures += o.pass ? 0 : 1;
    }
    {
        const Outcome o = criterion7(elapsed);
        print_line(7, "zero drift and zero noise estimate exactly zero", o, elapsed);
        failures += o.pass ? 0 : 1;
    }
    {
        const Outcome o = criterion8(hr, 600.0);
        print_line(8, "outputs are byte-identical across thread counts", o, hr.run8_sec);
        failures += o.pass ? 0 : 1;
    }

    if (!note4.empty())
        std::printf("\n%s\n", note4.c_str());
    std::printf("\n%d/8 criteria passed\n", 8 - failures);
    return failures;
}
