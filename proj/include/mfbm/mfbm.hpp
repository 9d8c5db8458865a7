#pragma once

// Umbrella header: estimation of a time-varying linear drift multiplier
// driven by mixed fractional Brownian motion, via a martingale transform and
// kernel smoothing in the martingale's intrinsic time.

#include "config.hpp"
#include "csv.hpp"
#include "experiment.hpp"
#include "fredholm_kernel.hpp"
#include "gaussian_paths.hpp"
#include "grid.hpp"
#include "kernel_estimator.hpp"
#include "rng.hpp"
#include "sde_sim.hpp"
#include "transform.hpp"
