#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include <mfbm/gaussian_paths.hpp>
#include <mfbm/sde_sim.hpp>

using namespace mfbm;

namespace {

double numeric_integral(const ThetaSpec& th, double t, std::size_t cells = 200000) {
    double acc = 0.0;
    const double d = t / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i)
        acc += th.value((static_cast<double>(i) + 0.5) * d) * d;
    return acc;
}

} // namespace

TEST_CASE("ThetaSpec closed-form integrals match quadrature") {
    const ThetaSpec c = ThetaSpec::constant(0.5);
    CHECK(c.integral(2.0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(c.value(0.3) == 0.5);
    CHECK(c.bound() == 0.5);

    const ThetaSpec lin = ThetaSpec::linear(0.2, -0.4, 1.0);
    CHECK(lin.value(1.5) == Catch::Approx(0.2 - 0.6).margin(1e-15));
    CHECK(lin.integral(1.5) == Catch::Approx(numeric_integral(lin, 1.5)).margin(1e-9));

    const ThetaSpec sine = ThetaSpec::sine(0.5, 0.2, 6.283185307179586, 0.7);
    CHECK(sine.integral(0.77) == Catch::Approx(numeric_integral(sine, 0.77)).margin(1e-9));
    CHECK(sine.integral(1.0) == Catch::Approx(0.5).margin(1e-12)); // full period

    // zero-frequency sine degenerates to the constant
    const ThetaSpec s0 = ThetaSpec::sine(0.3, 0.9, 0.0, 1.2);
    CHECK(s0.integral(2.0) == Catch::Approx(0.6).margin(1e-15));
}

TEST_CASE("ThetaSpec tabulated form interpolates and integrates") {
    const TimeGrid grid(1.0, 1024);
    std::vector<double> vals(grid.points());
    for (std::size_t i = 0; i < grid.points(); ++i)
        vals[i] = 0.5 + 0.2 * std::sin(6.283185307179586 * grid.t(i));
    const ThetaSpec tab = ThetaSpec::tabulated(grid, vals, 0.7);
    const ThetaSpec ref = ThetaSpec::sine(0.5, 0.2, 6.283185307179586, 0.7);

    CHECK(tab.value(0.375) == Catch::Approx(ref.value(0.375)).margin(1e-5));
    CHECK(tab.integral(0.81) == Catch::Approx(ref.integral(0.81)).margin(1e-5));
}

TEST_CASE("ThetaSpec validation enforces the declared contract") {
    const TimeGrid grid(1.0, 16);
    CHECK_THROWS_AS(ThetaSpec::constant(0.5, 0.5, 0.0).validate(grid), std::invalid_argument);
    CHECK_THROWS_AS(ThetaSpec::constant(0.5, 0.5, 1.5).validate(grid), std::invalid_argument);
    // |theta| exceeds the declared bound somewhere on the grid
    CHECK_THROWS_AS(ThetaSpec::linear(0.0, 1.0, /*L=*/0.5).validate(grid),
                    std::invalid_argument);
    CHECK_NOTHROW(ThetaSpec::linear(0.0, 1.0, 1.0).validate(grid));
}

TEST_CASE("ModelSpec validation") {
    const TimeGrid grid(1.0, 16);
    ModelSpec m{ThetaSpec::constant(0.5), 1.0, 0.1, HurstIndex(0.7), grid};
    CHECK_NOTHROW(m.validate());
    m.x0 = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.x0 = 1.0;
    m.eps = -0.1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("limit ODE is the exponential of the integrated multiplier") {
    const TimeGrid grid(1.0, 8);
    const GridPath x = limit_ode(ThetaSpec::constant(0.5), 2.0, grid);
    CHECK(x.role() == PathRole::limit_x);
    for (std::size_t i = 0; i < grid.points(); ++i)
        CHECK(x[i] == Catch::Approx(2.0 * std::exp(0.5 * grid.t(i))).margin(1e-14));

    const GridPath flat = limit_ode(ThetaSpec::constant(0.0), -1.5, grid);
    for (std::size_t i = 0; i < grid.points(); ++i)
        CHECK(flat[i] == -1.5);
}

TEST_CASE("simulate_X with eps = 0 reproduces the limit path exactly") {
    const TimeGrid grid(1.0, 64);
    const ThetaSpec th = ThetaSpec::sine(0.5, 0.2, 6.283185307179586, 0.7);
    const ModelSpec model{th, 1.0, 0.0, HurstIndex(0.7), grid};

    SamplerConfig sc;
    sc.seed = 7;
    const MixedPathDraw d = sample_mixed_path(grid, model.H, sc);
    const GridPath X = simulate_X(model, d.mixed, SimScheme::exact_linear);
    const GridPath x = limit_ode(th, 1.0, grid);
    for (std::size_t i = 0; i < grid.points(); ++i)
        CHECK(X[i] == x[i]); // identical expressions, bitwise equal
}

TEST_CASE("simulate_X validates its inputs") {
    const TimeGrid grid(1.0, 16);
    const ModelSpec model{ThetaSpec::constant(0.5), 1.0, 0.1, HurstIndex(0.7), grid};
    SamplerConfig sc;
    const MixedPathDraw d = sample_mixed_path(TimeGrid(1.0, 8), model.H, sc);
    CHECK_THROWS_AS(simulate_X(model, d.mixed, SimScheme::exact_linear),
                    std::invalid_argument);
}

TEST_CASE("theta = 0 turns the state into scaled noise around x0") {
    const TimeGrid grid(1.0, 128);
    const ModelSpec model{ThetaSpec::constant(0.0), 1.0, 0.3, HurstIndex(0.7), grid};
    SamplerConfig sc;
    sc.seed = 21;
    const MixedPathDraw d = sample_mixed_path(grid, model.H, sc);
    const GridPath X = simulate_X(model, d.mixed, SimScheme::exact_linear);
    for (std::size_t i = 0; i < grid.points(); ++i)
        CHECK(X[i] == Catch::Approx(1.0 + 0.3 * d.mixed[i]).margin(1e-12));
}

TEST_CASE("euler scheme converges to the exact scheme as the grid refines") {
    const HurstIndex h(0.7);
    const ThetaSpec th = ThetaSpec::constant(0.5);

    // One noise path drawn on the fine grid and restricted to the coarse one,
    // so both gaps measure the euler bias on the same trajectory.
    const TimeGrid fine(1.0, 1024);
    SamplerConfig sc;
    sc.seed = 11;
    const MixedPathDraw d = sample_mixed_path(fine, h, sc);

    auto max_gap = [&](std::size_t n) {
        const TimeGrid grid(1.0, n);
        const std::size_t stride = fine.steps() / n;
        std::vector<double> v(grid.points());
        for (std::size_t i = 0; i < grid.points(); ++i)
            v[i] = d.mixed[i * stride];
        const GridPath noise(grid, PathRole::mixed, v);
        const ModelSpec model{th, 1.0, 0.1, h, grid};
        const GridPath a = simulate_X(model, noise, SimScheme::exact_linear);
        const GridPath b = simulate_X(model, noise, SimScheme::euler);
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.points(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]));
        return worst;
    };

    const double gap256 = max_gap(256);
    const double gap1024 = max_gap(1024);
    INFO("gap256=" << gap256 << " gap1024=" << gap1024);
    CHECK(gap1024 < 0.5 * gap256); // first-order bias: quartering dt, expect ~1/4
}

TEST_CASE("deviation report: theta = 0 attains the envelope exactly") {
    const TimeGrid grid(1.0, 64);
    const HurstIndex h(0.7);
    const double eps = 0.2;
    const ModelSpec model{ThetaSpec::constant(0.0), 1.0, eps, h, grid};
    SamplerConfig sc;
    sc.seed = 5;
    const MixedPathDraw d = sample_mixed_path(grid, h, sc);
    const GridPath X = simulate_X(model, d.mixed, SimScheme::exact_linear);
    const GridPath x = limit_ode(model.theta, 1.0, grid);

    // X - x = eps * V, so with L = 0 the literal envelope binds with slack 0.
    const DeviationBoundReport rep = deviation_bound_report(X, x, d.mixed, 0.0, eps, h);
    CHECK(rep.pathwise_ok);
    CHECK(rep.pathwise_sup_ok);
    CHECK(std::abs(rep.max_slack) <= 1e-9);
    CHECK(rep.moment_bound ==
          Catch::Approx(eps * eps * (std::pow(1.0, 1.4) + 1.0)).margin(1e-15));
}

TEST_CASE("deviation report: moment bound formula") {
    const TimeGrid grid(2.0, 16);
    const HurstIndex h(0.8);
    const GridPath zero(grid, PathRole::mixed);
    const GridPath x(grid, PathRole::limit_x, std::vector<double>(17, 1.0));
    const GridPath X(grid, PathRole::state_x, std::vector<double>(17, 1.0));
    const DeviationBoundReport rep = deviation_bound_report(X, x, zero, 0.3, 0.05, h);
    const double expect = std::exp(2.0 * 0.3 * 2.0) * 0.0025 * (std::pow(2.0, 1.6) + 2.0);
    CHECK(rep.moment_bound == Catch::Approx(expect).margin(1e-15));
    CHECK(rep.pathwise_ok); // zero deviation, zero noise
}
