#pragma once

#include "kgz/spectral.hpp"

namespace kgz {

/// One snapshot (u, u_t, n, n_t) of the Klein-Gordon-Zakharov flow
///
///   u_tt - Lap u + u = n u,    n_tt / alpha^2 - Lap n = -Lap(u^2).
///
/// The model is only considered for alpha != 1; construction enforces it.
struct SystemState {
    double t = 0.0;
    RadialField u, udot, n, ndot;
    double alpha = 0.5;

    SystemState(RadialField u_, RadialField udot_, RadialField n_, RadialField ndot_,
                double alpha_, double t_ = 0.0);

    /// All four fields zero.
    static SystemState zero(const RadialGrid& grid, double alpha);

    const RadialGrid& grid() const { return u.grid; }
    bool all_finite() const;
};

/// Throws std::invalid_argument unless alpha > 0 and alpha != 1.
void validate_alpha(double alpha);

}  // namespace kgz
