#pragma once

#include <random>

#include "kgz/spectral.hpp"

namespace oracle {

/// Q(0) of the positive radial solution of -Lap Q + Q = Q^3 by an independent
/// route: v = r Q solves v'' = v - v^3 / r^2 with v(0) = 0 and v' = -v at r = L.
/// Second-order finite differences on h, h/2, h/4, Newton with a tridiagonal
/// solve, Q(0) from an even polynomial fit at the origin, then Richardson.
struct BvpResult {
    double Q0 = 0;
    double Q0_coarse = 0;  ///< before extrapolation, finest grid
    bool positive = false;
    int newton_iterations = 0;
};
BvpResult ground_state_central_value(double L = 20.0, double h = 0.01);

// Closed forms for f(r) = exp(-r^2) on R^3.
double gaussian_l2_squared();     // (pi/2)^{3/2}
double gaussian_grad_squared();   // 3 pi^{3/2} / (2 sqrt 2)
double gaussian_l4_fourth();      // pi^{3/2} / 8

/// Smooth random radial field: Gaussian-damped random sine coefficients.
kgz::RadialField random_field(const kgz::RadialGrid& g, std::mt19937_64& rng,
                              double scale_lo = 1.0, double scale_hi = 6.0);

/// Zero-mean bump B (3 - 2 r^2/s^2) exp(-r^2/s^2) (proportional to a Laplacian).
kgz::RadialField zero_mean_bump(const kgz::RadialGrid& g, double B, double s);

}  // namespace oracle
