#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/LU>

#include "grid.hpp"

namespace mfbm {

namespace detail {

/// F(y) = y^alpha / alpha, the antiderivative used by every closed-form
/// integral of |x - r|^{alpha-1} over a cell. F(0) = 0 since alpha > 0.
inline double power_antiderivative(double y, double alpha) {
    return std::pow(y, alpha) / alpha;
}

/// Table E[q] = F(q * half, alpha) for q = 0..qmax, where half = spacing/2.
/// All node-to-cell-edge distances on a uniform grid are integer multiples
/// of half the spacing, so every singular weight is a difference of two
/// table entries.
inline std::vector<double> edge_antiderivative_table(std::size_t qmax, double half,
                                                     double alpha) {
    std::vector<double> E(qmax + 1, 0.0);
    for (std::size_t q = 1; q <= qmax; ++q)
        E[q] = power_antiderivative(static_cast<double>(q) * half, alpha);
    return E;
}

} // namespace detail

/// Solve the weakly singular Fredholm equation of the second kind
///   g(s) + H(2H-1) * Int_0^t g(r) |s-r|^{2H-2} dr = 1,   0 <= s <= t,
/// by Nystrom product integration on m uniform nodes (node-centered cells,
/// half cells at the ends; the singular factor is integrated exactly over
/// each cell against a piecewise-constant g). Returns g at the nodes.
///
/// For H = 1/2 the equation degenerates and the solution is identically 1/2,
/// returned exactly.
inline std::vector<double> solve_g(double t_end, const HurstIndex& H, std::size_t m) {
    if (!(t_end > 0.0))
        throw std::invalid_argument("solve_g: t_end must be positive");
    if (m < 2)
        throw std::invalid_argument("solve_g: need at least 2 nodes");

    if (H.is_brownian())
        return std::vector<double>(m, 0.5);

    const double alpha = 2.0 * H.value() - 1.0; // in (0,1): integrable singularity
    const double lam = H.value() * alpha;
    const double d = t_end / static_cast<double>(m - 1);
    const std::vector<double> E = detail::edge_antiderivative_table(2 * m, 0.5 * d, alpha);

    const auto N = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < m; ++i) {
            double w;
            if (i == 0) {
                // left half cell [0, d/2]
                w = (k == 0) ? E[1] : E[2 * k] - E[2 * k - 1];
            } else if (i == m - 1) {
                // right half cell [t_end - d/2, t_end]
                const std::size_t q = m - 1 - k;
                w = (q == 0) ? E[1] : E[2 * q] - E[2 * q - 1];
            } else if (i == k) {
                // node's own cell: the singularity sits at its center
                w = 2.0 * E[1];
            } else {
                const std::size_t q = (k > i) ? k - i : i - k;
                w = E[2 * q + 1] - E[2 * q - 1];
            }
            A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) += lam * w;
        }
    }

    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(N);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    Eigen::VectorXd g = lu.solve(rhs);
    if (!g.allFinite())
        throw std::runtime_error("solve_g: discretized system solve failed (non-finite "
                                 "solution), t_end=" + std::to_string(t_end));

    return std::vector<double>(g.data(), g.data() + m);
}

/// Relative residual of the energy identity
///   Int g^2 + H(2H-1) * IntInt g(u) g(v) |u-v|^{2H-2} du dv = Int g
/// for a candidate solution g given at uniform nodes on [0, t_end].
///
/// The identity follows from multiplying the kernel equation by g and
/// integrating, so it is an independent check only if evaluated with a
/// quadrature different from the solver's. This evaluator therefore uses a
/// fixed fine midpoint grid (2048 product-integration cells) and linear
/// interpolation of g, regardless of the solver's node count.
inline double energy_residual(const std::vector<double>& g, double t_end,
                              const HurstIndex& H) {
    if (H.is_brownian())
        throw std::invalid_argument("energy_residual: identity is specific to H > 1/2");
    if (!(t_end > 0.0))
        throw std::invalid_argument("energy_residual: t_end must be positive");
    if (g.size() < 2)
        throw std::invalid_argument("energy_residual: need at least 2 nodes");

    constexpr std::size_t kFineCells = 2048;
    const double alpha = 2.0 * H.value() - 1.0;
    const double lam = H.value() * alpha;
    const double dd = t_end / static_cast<double>(kFineCells);
    const double node_d = t_end / static_cast<double>(g.size() - 1);

    // g at fine-cell midpoints, by linear interpolation between nodes.
    std::vector<double> gm(kFineCells);
    for (std::size_t k = 0; k < kFineCells; ++k) {
        const double x = (static_cast<double>(k) + 0.5) * dd;
        const double pos = x / node_d;
        std::size_t i0 = static_cast<std::size_t>(pos);
        if (i0 >= g.size() - 1)
            i0 = g.size() - 2;
        const double w = pos - static_cast<double>(i0);
        gm[k] = (1.0 - w) * g[i0] + w * g[i0 + 1];
    }

    // Exact integrals of |x_k - r|^{alpha-1} over fine cells, by offset.
    std::vector<double> T(kFineCells);
    T[0] = 2.0 * detail::power_antiderivative(0.5 * dd, alpha);
    for (std::size_t q = 1; q < kFineCells; ++q)
        T[q] = detail::power_antiderivative((static_cast<double>(q) + 0.5) * dd, alpha) -
               detail::power_antiderivative((static_cast<double>(q) - 0.5) * dd, alpha);

    double lin = 0.0, quad = 0.0, dbl = 0.0;
    for (std::size_t k = 0; k < kFineCells; ++k) {
        lin += gm[k] * dd;
        quad += gm[k] * gm[k] * dd;
        double inner = 0.0;
        for (std::size_t i = 0; i < kFineCells; ++i)
            inner += gm[i] * T[k > i ? k - i : i - k];
        dbl += gm[k] * inner * dd;
    }

    return std::abs(quad + lam * dbl - lin) / std::abs(lin);
}

/// Transform kernel data for one grid: the triangular array of kernel values
/// and the induced bracket (quadratic-variation clock) of the core
/// martingale.
///
/// g[j] holds g_j(t_i) for i = 0..j, the solution of the kernel equation on
/// [0, t_j] (j >= 1; the j = 0 slice is empty since no increments precede
/// t_0). qv[j] approximates Int_0^{t_j} g_j, the bracket at t_j, and
/// qv_density is its time derivative by central differences.
struct GHKernelFamily {
    TimeGrid grid;
    HurstIndex H;
    std::vector<std::vector<double>> g;
    std::vector<double> qv;
    std::vector<double> qv_density;

    double qv_increment(std::size_t j) const { return qv[j + 1] - qv[j]; }
};

/// Build the kernel family for every horizon t_1..t_n on the grid. For
/// H = 1/2 all values are analytic (g = 1/2, qv = t/2, density 1/2) and are
/// written exactly rather than solved for.
inline GHKernelFamily build_family(const TimeGrid& grid, const HurstIndex& H) {
    const std::size_t n = grid.steps();
    GHKernelFamily fam{grid, H, {}, {}, {}};
    fam.g.resize(n + 1);
    fam.qv.assign(n + 1, 0.0);
    fam.qv_density.assign(n + 1, 0.0);

    if (H.is_brownian()) {
        for (std::size_t j = 1; j <= n; ++j) {
            fam.g[j].assign(j + 1, 0.5);
            fam.qv[j] = 0.5 * grid.t(j);
            fam.qv_density[j] = 0.5;
        }
        fam.qv_density[0] = 0.5;
        return fam;
    }

    const double dt = grid.dt();
    for (std::size_t j = 1; j <= n; ++j) {
        fam.g[j] = solve_g(grid.t(j), H, j + 1);
        // Node-centered cells: half weight at both ends.
        double s = 0.5 * fam.g[j][0] + 0.5 * fam.g[j][j];
        for (std::size_t i = 1; i < j; ++i)
            s += fam.g[j][i];
        fam.qv[j] = s * dt;
        if (!(fam.qv[j] > fam.qv[j - 1]))
            throw std::runtime_error("build_family: bracket is not strictly increasing at j=" +
                                     std::to_string(j));
    }

    fam.qv_density[0] = (fam.qv[1] - fam.qv[0]) / dt;
    for (std::size_t j = 1; j < n; ++j)
        fam.qv_density[j] = (fam.qv[j + 1] - fam.qv[j - 1]) / (2.0 * dt);
    fam.qv_density[n] = (fam.qv[n] - fam.qv[n - 1]) / dt;

    for (std::size_t j = 0; j <= n; ++j)
        if (!(fam.qv_density[j] > 0.0))
            throw std::runtime_error("build_family: bracket density must be positive at j=" +
                                     std::to_string(j));
    return fam;
}

} // namespace mfbm
