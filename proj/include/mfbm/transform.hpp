#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fredholm_kernel.hpp"
#include "grid.hpp"
#include "sde_sim.hpp"

namespace mfbm {

/// Which drift-in-intrinsic-time object a QPath holds.
enum class QKind {
    target_qstar, ///< the estimand induced by (theta, x0) through the transform
    generic_qh,   ///< transform drift of an arbitrary absolutely continuous drift
    estimate_qhat ///< a kernel estimate computed from one observed path
};

/// A drift path in the martingale's intrinsic time (one value per grid point).
struct QPath {
    TimeGrid grid;
    QKind kind;
    std::vector<double> values;

    QPath(TimeGrid g, QKind k, std::vector<double> v)
        : grid(g), kind(k), values(std::move(v)) {
        if (values.size() != grid.points())
            throw std::invalid_argument("QPath: values/grid size mismatch");
    }

    double operator[](std::size_t i) const noexcept { return values[i]; }
    std::size_t size() const noexcept { return values.size(); }
};

namespace detail {

/// Z(t_j) = Sum_{i<j} g[j][i] * (P_{i+1} - P_i): the kernel applied to a
/// path's increments, re-weighted for each horizon t_j (the kernel depends
/// on the horizon, so this is a triangular O(n^2) pass, not a convolution).
inline std::vector<double> apply_family(const std::vector<double>& p,
                                        const GHKernelFamily& fam) {
    const std::size_t n = fam.grid.steps();
    std::vector<double> z(n + 1, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::vector<double>& gj = fam.g[j];
        double acc = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            acc += gj[i] * (p[i + 1] - p[i]);
        z[j] = acc;
    }
    return z;
}

} // namespace detail

/// Transform an observation path Y into the semimartingale Z whose bracket
/// is the family's qv clock: Z(t_j) = Sum_{i<j} g[j][i] (Y_{i+1} - Y_i).
inline GridPath transform_to_Z(const GridPath& Y, const GHKernelFamily& fam) {
    require_same_grid(Y.grid(), fam.grid, "transform_to_Z");
    return GridPath(fam.grid, PathRole::transform_z, detail::apply_family(Y.values(), fam));
}

/// The transform applied to pure noise: the core martingale M^H, whose
/// variance process is the family's qv clock.
inline GridPath martingale_from_noise(const GridPath& mixed, const GHKernelFamily& fam) {
    require_same_grid(mixed.grid(), fam.grid, "martingale_from_noise");
    if (mixed[0] != 0.0)
        throw std::invalid_argument("martingale_from_noise: noise must start at 0");
    return GridPath(fam.grid, PathRole::martingale_m, detail::apply_family(mixed.values(), fam));
}

/// Drift of the transformed process in intrinsic time for an observation
/// drift with density c(t) (i.e. dY = c(t) dt + noise):
///   Q(t_j) ~= [N(t_{j+1}) - N(t_{j-1})] / [qv(t_{j+1}) - qv(t_{j-1})],
/// where N(t_j) = Sum_{i<j} g[j][i] c(t_i) dt (one-sided ratios at the ends).
inline QPath q_from_drift_density(const std::vector<double>& c, const GHKernelFamily& fam,
                                  QKind kind) {
    const std::size_t n = fam.grid.steps();
    if (c.size() != fam.grid.points())
        throw std::invalid_argument("q_from_drift_density: density/grid size mismatch");

    const double dt = fam.grid.dt();
    std::vector<double> N(n + 1, 0.0);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::vector<double>& gj = fam.g[j];
        double acc = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            acc += gj[i] * c[i] * dt;
        N[j] = acc;
    }

    std::vector<double> q(n + 1);
    auto ratio = [&](std::size_t hi, std::size_t lo) {
        const double den = fam.qv[hi] - fam.qv[lo];
        if (!(den > 0.0))
            throw std::runtime_error("q_from_drift_density: bracket increment vanished");
        return (N[hi] - N[lo]) / den;
    };
    q[0] = ratio(1, 0);
    for (std::size_t j = 1; j < n; ++j)
        q[j] = ratio(j + 1, j - 1);
    q[n] = ratio(n, n - 1);

    return QPath(fam.grid, kind, std::move(q));
}

/// The estimation target: the intrinsic-time drift induced by the model's
/// theta through the noise-free limit path, i.e. c(t) = theta(t) x_limit(t).
inline QPath q_star(const ThetaSpec& theta, double x0, const GHKernelFamily& fam) {
    std::vector<double> c(fam.grid.points());
    for (std::size_t i = 0; i < fam.grid.points(); ++i) {
        const double t = fam.grid.t(i);
        c[i] = theta.value(t) * x0 * std::exp(theta.integral(t));
    }
    return q_from_drift_density(c, fam, QKind::target_qstar);
}

/// Discrete log-likelihood of a candidate drift Q against an observed
/// transformed path Z under the family's clock:
///   Sum_j Q_j (Z_{j+1} - Z_j) - 1/2 Sum_j Q_j^2 (qv_{j+1} - qv_j).
inline double log_likelihood(const QPath& Q, const GridPath& Z, const GHKernelFamily& fam) {
    require_same_grid(Q.grid, fam.grid, "log_likelihood");
    require_same_grid(Z.grid(), fam.grid, "log_likelihood");
    const std::size_t n = fam.grid.steps();
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dz = Z[j + 1] - Z[j];
        const double dqv = fam.qv_increment(j);
        acc += Q[j] * dz - 0.5 * Q[j] * Q[j] * dqv;
    }
    return acc;
}

} // namespace mfbm
