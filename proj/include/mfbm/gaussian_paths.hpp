#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "grid.hpp"
#include "rng.hpp"

namespace mfbm {

/// Covariance of fractional Brownian motion with Hurst index H:
///   E[W^H_s W^H_t] = (s^{2H} + t^{2H} - |s-t|^{2H}) / 2,  s, t >= 0.
inline double fbm_covariance(double s, double t, const HurstIndex& H) {
    if (s < 0.0 || t < 0.0)
        throw std::invalid_argument("fbm_covariance: times must be nonnegative");
    const double twoH = 2.0 * H.value();
    return 0.5 * (std::pow(s, twoH) + std::pow(t, twoH) - std::pow(std::abs(s - t), twoH));
}

/// Covariance of the mixed process W + W^H (independent components):
/// min(s,t) + fbm_covariance(s,t).
inline double mixed_covariance(double s, double t, const HurstIndex& H) {
    return std::min(s, t) + fbm_covariance(s, t, H);
}

/// One draw of the mixed noise and its two components on a common grid.
/// All three paths start at 0; mixed = brownian + fbm pointwise.
struct MixedPathDraw {
    GridPath brownian;
    GridPath fbm;
    GridPath mixed;
};

namespace detail {

/// n i.i.d. N(0, dt) increments accumulated into a Brownian path value array
/// of length n+1 (index 0 pinned at 0).
inline std::vector<double> brownian_values(const TimeGrid& grid, GaussianRng& rng) {
    const std::size_t n = grid.steps();
    const double sd = std::sqrt(grid.dt());
    std::vector<double> w(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        w[i + 1] = w[i] + sd * rng.normal();
    return w;
}

/// fBm values at t_1..t_n via dense Cholesky of the exact covariance.
/// t_0 is excluded (its covariance row is identically zero).
inline std::vector<double> fbm_values_cholesky(const TimeGrid& grid, const HurstIndex& H,
                                               double jitter_tol, GaussianRng& rng) {
    const std::size_t n = grid.steps();
    Eigen::MatrixXd C(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k <= i; ++k) {
            const double v = fbm_covariance(grid.t(i + 1), grid.t(k + 1), H);
            C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
            C(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v;
        }

    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success) {
        // One retry with the declared jitter cap; more would silently change the law.
        Eigen::MatrixXd Cj = C;
        Cj.diagonal().array() += jitter_tol;
        llt.compute(Cj);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error(
                "sample_mixed_path: fBm covariance is not factorizable within jitter_tol");
    }

    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        z(static_cast<Eigen::Index>(i)) = rng.normal();
    Eigen::VectorXd x = llt.matrixL() * z;

    std::vector<double> wh(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        wh[i + 1] = x(static_cast<Eigen::Index>(i));
    return wh;
}

/// Circulant-embedding eigenvalues for fractional Gaussian noise on n uniform
/// steps of size dt: the FFT of the length-2n wrapped autocovariance.
inline std::vector<double> fgn_circulant_eigenvalues(std::size_t n, double dt,
                                                     const HurstIndex& H) {
    const double twoH = 2.0 * H.value();
    const double scale = std::pow(dt, twoH);
    auto rho = [&](std::size_t k) {
        if (k == 0)
            return scale;
        const double kd = static_cast<double>(k);
        return 0.5 * scale *
               (std::pow(kd + 1.0, twoH) - 2.0 * std::pow(kd, twoH) + std::pow(kd - 1.0, twoH));
    };

    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> c(m);
    for (std::size_t k = 0; k <= n; ++k)
        c[k] = rho(k);
    for (std::size_t k = 1; k < n; ++k)
        c[m - k] = c[k];

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> lam(m);
    fft.fwd(lam, c);

    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k) {
        double v = lam[k].real();
        if (v < -1e-9)
            throw std::runtime_error(
                "sample_mixed_path: circulant embedding is not nonnegative definite "
                "for this (H, n); use cholesky_exact");
        out[k] = v < 0.0 ? 0.0 : v;
    }
    return out;
}

/// fBm values via Davies-Harte synthesis of fractional Gaussian noise.
inline std::vector<double> fbm_values_spectral(const TimeGrid& grid, const HurstIndex& H,
                                               GaussianRng& rng) {
    const std::size_t n = grid.steps();
    const std::vector<double> lam = fgn_circulant_eigenvalues(n, grid.dt(), H);
    const std::size_t m = 2 * n;

    // Hermitian-symmetric spectrum with the right per-mode variances.
    std::vector<std::complex<double>> u(m);
    u[0] = std::sqrt(lam[0]) * rng.normal();
    u[n] = std::sqrt(lam[n]) * rng.normal();
    for (std::size_t k = 1; k < n; ++k) {
        const double a = rng.normal();
        const double b = rng.normal();
        const double s = std::sqrt(0.5 * lam[k]);
        u[k] = std::complex<double>(s * a, s * b);
        u[m - k] = std::conj(u[k]);
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> v(m);
    fft.fwd(v, u);

    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<double> wh(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        wh[i + 1] = wh[i] + norm * v[i].real();
    return wh;
}

} // namespace detail

/// Draw one mixed path W + W^H on the grid. The Brownian component is always
/// drawn first (n normals), then the fBm component, so a fixed seed yields
/// the same draw for a fixed method regardless of the caller.
inline MixedPathDraw sample_mixed_path(const TimeGrid& grid, const HurstIndex& H,
                                       const SamplerConfig& cfg) {
    GaussianRng rng(cfg.seed);
    std::vector<double> w = detail::brownian_values(grid, rng);

    std::vector<double> wh;
    if (H.is_brownian()) {
        // W^H is itself a standard Brownian motion; both methods coincide and
        // sampling increments directly is exact.
        wh = detail::brownian_values(grid, rng);
    } else if (cfg.method == SamplerMethod::cholesky_exact) {
        wh = detail::fbm_values_cholesky(grid, H, cfg.jitter_tol, rng);
    } else {
        wh = detail::fbm_values_spectral(grid, H, rng);
    }

    std::vector<double> mix(grid.points());
    for (std::size_t i = 0; i < grid.points(); ++i)
        mix[i] = w[i] + wh[i];

    return MixedPathDraw{GridPath(grid, PathRole::brownian, std::move(w)),
                         GridPath(grid, PathRole::fbm, std::move(wh)),
                         GridPath(grid, PathRole::mixed, std::move(mix))};
}

} // namespace mfbm
