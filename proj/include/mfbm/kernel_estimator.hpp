#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fredholm_kernel.hpp"
#include "grid.hpp"
#include "transform.hpp"

namespace mfbm {

/// Smoothing kernel G with compact support [A, B]. Built-ins are the
/// Epanechnikov and uniform kernels on [-1, 1]; custom kernels are tabulated
/// (piecewise linear) and must integrate to 1.
class KernelSpec {
public:
    enum class Kind { epanechnikov, uniform, custom };

    static KernelSpec epanechnikov() { return KernelSpec(Kind::epanechnikov, -1.0, 1.0); }
    static KernelSpec uniform() { return KernelSpec(Kind::uniform, -1.0, 1.0); }

    /// Tabulated kernel on strictly increasing breakpoints us (support
    /// [us.front(), us.back()], which must straddle 0), linearly
    /// interpolated. Must be nonnegative and integrate to 1 within 1e-10.
    static KernelSpec custom(std::vector<double> us, std::vector<double> gs) {
        if (us.size() < 2 || us.size() != gs.size())
            throw std::invalid_argument("KernelSpec::custom: need matching tables, size >= 2");
        for (std::size_t i = 1; i < us.size(); ++i)
            if (!(us[i] > us[i - 1]))
                throw std::invalid_argument("KernelSpec::custom: breakpoints must increase");
        if (!(us.front() < 0.0 && us.back() > 0.0))
            throw std::invalid_argument("KernelSpec::custom: support must straddle 0");
        double mass = 0.0;
        for (std::size_t i = 1; i < us.size(); ++i) {
            if (gs[i] < 0.0 || gs[i - 1] < 0.0)
                throw std::invalid_argument("KernelSpec::custom: kernel must be nonnegative");
            mass += 0.5 * (gs[i] + gs[i - 1]) * (us[i] - us[i - 1]);
        }
        if (std::abs(mass - 1.0) > 1e-10)
            throw std::invalid_argument("KernelSpec::custom: kernel mass " +
                                        std::to_string(mass) + " is not 1");
        KernelSpec k(Kind::custom, us.front(), us.back());
        k.us_ = std::move(us);
        k.gs_ = std::move(gs);
        return k;
    }

    /// Convenience: rescale a nonnegative table so it integrates to 1.
    static KernelSpec custom_normalized(std::vector<double> us, std::vector<double> gs) {
        double mass = 0.0;
        for (std::size_t i = 1; i < us.size() && i < gs.size(); ++i)
            mass += 0.5 * (gs[i] + gs[i - 1]) * (us[i] - us[i - 1]);
        if (!(mass > 0.0))
            throw std::invalid_argument("KernelSpec::custom_normalized: zero mass");
        for (double& v : gs)
            v /= mass;
        return custom(std::move(us), std::move(gs));
    }

    Kind kind() const noexcept { return kind_; }
    double support_lo() const noexcept { return A_; }
    double support_hi() const noexcept { return B_; }

    double eval(double u) const {
        if (u < A_ || u > B_)
            return 0.0;
        switch (kind_) {
        case Kind::epanechnikov:
            return 0.75 * (1.0 - u * u);
        case Kind::uniform:
            return 0.5;
        case Kind::custom: {
            // binary search for the bracketing breakpoints
            std::size_t lo = 0, hi = us_.size() - 1;
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                (us_[mid] <= u ? lo : hi) = mid;
            }
            const double w = (u - us_[lo]) / (us_[hi] - us_[lo]);
            return (1.0 - w) * gs_[lo] + w * gs_[hi];
        }
        }
        return 0.0; // unreachable
    }

private:
    KernelSpec(Kind k, double a, double b) : kind_(k), A_(a), B_(b) {}
    Kind kind_;
    double A_, B_;
    std::vector<double> us_, gs_;
};

inline double kernel_eval(double u, const KernelSpec& spec) { return spec.eval(u); }

/// Bandwidth rule h = c * eps^{4/(4*gamma+3)}. The exponent balances the
/// kernel bias term h^{2 gamma} against the stochastic term eps^2 h^{-3/2}
/// exactly, which is what yields the eps^{8 gamma/(4 gamma+3)} risk rate.
inline double bandwidth(double eps, double gamma, double c) {
    if (!(eps > 0.0))
        throw std::invalid_argument("bandwidth: eps must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("bandwidth: gamma must lie in (0,1]");
    if (!(c > 0.0))
        throw std::invalid_argument("bandwidth: constant must be positive");
    const double beta = 4.0 / (4.0 * gamma + 3.0);
    return c * std::pow(eps, beta);
}

/// Which grid points a risk aggregate uses.
enum class EvalPolicy {
    interior_only,  ///< drop points whose kernel window leaves [0, T]
    full_with_flag, ///< keep all points; boundary flags are informational
};

struct EstimatorSpec {
    KernelSpec kernel = KernelSpec::epanechnikov();
    double bandwidth_constant = 1.0;
    double gamma = 1.0;
    EvalPolicy policy = EvalPolicy::interior_only;
};

/// Raw kernel smoother of a path's increments in Lebesgue time:
///   S(t_j) = (1/h) Sum_{i<n} G((t_i - t_j)/h) (P_{i+1} - P_i).
/// boundary[j] is set when the window [t_j + A h, t_j + B h] leaves [0, T].
/// This is the estimator's smoothing stage; it recovers q(t) when the
/// increments satisfy dP = q(t) dt.
struct SmoothedIncrements {
    std::vector<double> values;
    std::vector<std::uint8_t> boundary;
    double h;
};

inline SmoothedIncrements smooth_increments(const GridPath& path, const KernelSpec& kernel,
                                            double h) {
    const TimeGrid& grid = path.grid();
    const double dt = grid.dt();
    const double T = grid.horizon();
    if (!(h >= 2.0 * dt))
        throw std::invalid_argument("smooth_increments: bandwidth below twice the grid step");

    const std::size_t n = grid.steps();
    SmoothedIncrements out;
    out.h = h;
    out.values.assign(n + 1, 0.0);
    out.boundary.assign(n + 1, 0);

    for (std::size_t j = 0; j <= n; ++j) {
        const double tj = grid.t(j);
        const double wlo = tj + kernel.support_lo() * h;
        const double whi = tj + kernel.support_hi() * h;
        out.boundary[j] = (wlo < -1e-12 || whi > T + 1e-12) ? 1 : 0;

        // increments with left endpoint inside the kernel window
        std::size_t ilo = wlo <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(wlo / dt - 1e-12));
        std::size_t ihi =
            whi >= T ? n - 1
                     : std::min(n - 1, static_cast<std::size_t>(std::floor(whi / dt + 1e-12)));
        double acc = 0.0;
        for (std::size_t i = ilo; i <= ihi && i < n; ++i)
            acc += kernel.eval((grid.t(i) - tj) / h) * (path[i + 1] - path[i]);
        out.values[j] = acc / h;
    }
    return out;
}

/// A kernel drift estimate with its evaluation metadata.
struct QHatResult {
    QPath qhat;
    std::vector<std::uint8_t> boundary;
    double h;
};

/// Estimate the intrinsic-time drift from one transformed path Z:
///   Qhat(t_j) = [Sum_i G((t_i - t_j)/h) dZ_i] / [Sum_i G((t_i - t_j)/h) dqv_i],
/// i.e. the smoothed Z increments normalized by the identically smoothed
/// bracket increments. Normalizing by the bracket rather than by Lebesgue
/// measure is what makes the estimate target the drift *in intrinsic time*:
/// dZ = Q d<M> + dM, so smoothing dZ against dt alone would estimate
/// Q times the bracket density instead of Q itself.
inline QHatResult estimate_q_path(const GridPath& Z, const GHKernelFamily& fam,
                                  const EstimatorSpec& spec, double eps) {
    require_same_grid(Z.grid(), fam.grid, "estimate_q_path");
    const double h = bandwidth(eps, spec.gamma, spec.bandwidth_constant);

    SmoothedIncrements num = smooth_increments(Z, spec.kernel, h);
    GridPath qv_path(fam.grid, PathRole::q_path, fam.qv);
    SmoothedIncrements den = smooth_increments(qv_path, spec.kernel, h);

    const std::size_t n = fam.grid.steps();
    std::vector<double> q(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        if (!(den.values[j] > 0.0))
            throw std::runtime_error("estimate_q_path: smoothed bracket mass vanished at j=" +
                                     std::to_string(j));
        q[j] = num.values[j] / den.values[j];
    }

    return QHatResult{QPath(fam.grid, QKind::estimate_qhat, std::move(q)),
                      std::move(num.boundary), h};
}

/// Monte Carlo sup-risk of a set of replicated estimates against the target.
struct RiskSummary {
    double value;                        ///< max over evaluated points of the MC mean squared error
    std::size_t argmax;                  ///< grid index attaining the max
    double se_at_argmax;                 ///< MC standard error of the mean squared error there
    std::vector<double> mean_sq;         ///< full per-point mean squared error curve
    std::vector<std::uint8_t> evaluated; ///< 1 where the point entered the sup
};

inline RiskSummary sup_risk(const std::vector<QHatResult>& reps, const QPath& target,
                            EvalPolicy policy) {
    if (reps.size() < 2)
        throw std::invalid_argument("sup_risk: need at least 2 replications");
    const std::size_t np = target.size();
    for (const QHatResult& r : reps)
        require_same_grid(r.qhat.grid, target.grid, "sup_risk");

    // Boundary flags are determined by (grid, kernel, h), identical across
    // replications; take them from the first.
    std::vector<std::uint8_t> evaluated(np, 1);
    if (policy == EvalPolicy::interior_only) {
        bool any = false;
        for (std::size_t j = 0; j < np; ++j) {
            evaluated[j] = reps.front().boundary[j] ? 0 : 1;
            any = any || evaluated[j];
        }
        if (!any)
            throw std::runtime_error("sup_risk: no interior points (bandwidth too large "
                                     "for the horizon)");
    }

    const double R = static_cast<double>(reps.size());
    std::vector<double> mean_sq(np, 0.0);
    for (const QHatResult& r : reps)
        for (std::size_t j = 0; j < np; ++j) {
            const double e = r.qhat[j] - target[j];
            mean_sq[j] += e * e;
        }
    for (double& v : mean_sq)
        v /= R;

    std::size_t argmax = 0;
    double best = -1.0;
    for (std::size_t j = 0; j < np; ++j)
        if (evaluated[j] && mean_sq[j] > best) {
            best = mean_sq[j];
            argmax = j;
        }

    double var = 0.0;
    for (const QHatResult& r : reps) {
        const double e = r.qhat[argmax] - target[argmax];
        const double d = e * e - mean_sq[argmax];
        var += d * d;
    }
    var /= (R - 1.0);

    RiskSummary s;
    s.value = best;
    s.argmax = argmax;
    s.se_at_argmax = std::sqrt(var / R);
    s.mean_sq = std::move(mean_sq);
    s.evaluated = std::move(evaluated);
    return s;
}

} // namespace mfbm
