#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mfbm {

/// Uniform discretization of [0, T]: t_i = i*T/n for i = 0..n.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps) : T_(horizon), n_(steps) {
        if (!(horizon > 0.0))
            throw std::invalid_argument("TimeGrid: horizon must be positive");
        if (steps < 2)
            throw std::invalid_argument("TimeGrid: need at least 2 steps");
    }

    double horizon() const noexcept { return T_; }
    std::size_t steps() const noexcept { return n_; }
    std::size_t points() const noexcept { return n_ + 1; }
    double dt() const noexcept { return T_ / static_cast<double>(n_); }
    double t(std::size_t i) const noexcept {
        return static_cast<double>(i) * T_ / static_cast<double>(n_);
    }

    friend bool operator==(const TimeGrid& a, const TimeGrid& b) noexcept {
        return a.T_ == b.T_ && a.n_ == b.n_;
    }
    friend bool operator!=(const TimeGrid& a, const TimeGrid& b) noexcept { return !(a == b); }

private:
    double T_;
    std::size_t n_;
};

/// What a sampled/derived path represents. Noise-like roles are pinned to 0
/// at t_0; state roles start at x0.
enum class PathRole {
    brownian,
    fbm,
    mixed,
    state_x,
    limit_x,
    transform_z,
    martingale_m,
    q_path,
};

inline bool role_starts_at_zero(PathRole r) noexcept {
    switch (r) {
    case PathRole::brownian:
    case PathRole::fbm:
    case PathRole::mixed:
    case PathRole::transform_z:
    case PathRole::martingale_m:
        return true;
    default:
        return false;
    }
}

/// A real-valued path sampled on a TimeGrid (one value per grid point).
class GridPath {
public:
    GridPath(TimeGrid grid, PathRole role, std::vector<double> values)
        : grid_(grid), role_(role), values_(std::move(values)) {
        if (values_.size() != grid_.points())
            throw std::invalid_argument("GridPath: values/grid size mismatch");
        if (role_starts_at_zero(role_) && values_.front() != 0.0)
            throw std::invalid_argument("GridPath: this role must start at 0");
    }

    /// Zero-initialized path.
    GridPath(TimeGrid grid, PathRole role)
        : grid_(grid), role_(role), values_(grid.points(), 0.0) {}

    const TimeGrid& grid() const noexcept { return grid_; }
    PathRole role() const noexcept { return role_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    TimeGrid grid_;
    PathRole role_;
    std::vector<double> values_;
};

/// Hurst index restricted to {1/2} u (1/2, 1). The transform kernel equation
/// is reduced to a weakly singular Fredholm equation whose kernel
/// |s-r|^{2H-2} is integrable only for H > 1/2; H = 1/2 is handled
/// analytically, and H < 1/2 is rejected outright.
class HurstIndex {
public:
    explicit HurstIndex(double h) : h_(h) {
        if (!(h > 0.0 && h < 1.0))
            throw std::invalid_argument("HurstIndex: H must lie in (0,1), got " +
                                        std::to_string(h));
        if (h < 0.5)
            throw std::invalid_argument(
                "HurstIndex: H in (0,1/2) is unsupported (the kernel equation's "
                "Fredholm reduction needs H >= 1/2), got " + std::to_string(h));
    }

    double value() const noexcept { return h_; }
    bool is_brownian() const noexcept { return h_ == 0.5; }

private:
    double h_;
};

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* what) {
    if (a != b)
        throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

} // namespace mfbm
