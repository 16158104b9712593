#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgz/spectral.hpp"
#include "kgz/state.hpp"

namespace kgz {

enum class ShootOutcome { Decay, Crossed, Diverged };

const char* to_string(ShootOutcome o);

struct ShootResult {
    ShootOutcome outcome = ShootOutcome::Diverged;
    /// Q(r_j) for j = 0..N; entries past stop_node are NaN.
    std::vector<double> q;
    std::size_t stop_node = 0;
};

/// Integrates Q'' + (2/r) Q' - Q + Q^3 = 0, Q(0) = a, Q'(0) = 0 with RK4
/// (`substeps` steps per grid cell), starting from the Taylor series at r_1.
///
/// Crossed: Q reaches 0. Diverged: Q turns upward (undershoot) or |Q| > 10a.
/// Decay: reaches R with Q in (0, a] and |Q(R)| < exp(-R/2) a.
ShootResult shoot_static_ode(double a, const RadialGrid& grid, int substeps = 4);

/// The radial ground state of -Lap Q + Q = Q^3 and its certification data.
struct GroundState {
    RadialField profile;
    double Q0 = 0;        ///< central value, from the spectral series at r = 0
    double JQ = 0;        ///< J(Q_h), the threshold energy
    double residual_pde = 0;  ///< ||-Lap Q + Q - Q^3|| / ||Q||
    double pohozaev_K0 = 0;   ///< |K0(Q)| / ||Q||_4^4
    double pohozaev_K2 = 0;   ///< |K2(Q)| / ||Q||_4^4
    double shooting_a = 0;    ///< bisection fixed point of the shooting map
    double tol = 0;           ///< bracket width requested
    bool positive = false;
    bool decreasing = false;

    explicit GroundState(const RadialGrid& g) : profile(g) {}

    bool certified() const;
};

constexpr double kResidualCertTol = 1e-8;
constexpr double kPohozaevCertTol = 1e-6;

/// Shooting + bisection for the central value, exponential tail stitching,
/// then a Petviashvili polish on the spectral discretization.
/// Throws std::runtime_error if no Crossed/Diverged bracket exists in [0.5, 50].
GroundState find_ground_state(const RadialGrid& grid, double tol = 1e-12);

/// Recomputes all certification fields of gs from its profile.
void certify(GroundState& gs);

/// (sign*Q, 0, Q^2, 0). Throws std::invalid_argument for an uncertified gs.
SystemState standing_wave_state(int sign, const GroundState& gs, double alpha);

/// Grid-refinement study of J(Q_h) at fixed R.
struct ThresholdStudy {
    std::vector<std::size_t> sizes;
    std::vector<double> values;
    double observed_order = 0;
    double extrapolated = 0;
};

/// J(Q_h) on N/2^(levels-1), ..., N/2, N. The observed order uses the three
/// finest levels whose successive differences are above round-off.
ThresholdStudy threshold_refinement(double radius, std::size_t n, double tol, int levels = 5);

// Cache file: text record tagged with a format version, keyed by (R, N, tol).

std::string ground_state_cache_key(const RadialGrid& grid, double tol);
void save_ground_state(const GroundState& gs, const std::filesystem::path& file);
/// Returns nullopt if the file is missing or its key does not match.
std::optional<GroundState> load_ground_state(const std::filesystem::path& file,
                                             const RadialGrid& grid, double tol);
/// Loads from cache_dir if a matching record exists, else computes and stores it.
GroundState load_or_compute_ground_state(const RadialGrid& grid, double tol,
                                         const std::optional<std::filesystem::path>& cache_dir);

}  // namespace kgz
