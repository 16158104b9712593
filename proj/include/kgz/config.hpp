#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgz/diagnostics.hpp"
#include "kgz/evolution.hpp"

namespace kgz {

enum class InitialKind { GroundState, Gaussian, Checkpoint };

const char* to_string(InitialKind k);

/// u0 = A exp(-r^2/s^2); u1, n1 zero and n0 = u0^2 unless overridden.
struct GaussianParams {
    double amplitude = 1.0;
    double width = 2.0;
    double u1_amplitude = 0.0;
    double u1_width = 2.0;
    std::optional<double> n0_amplitude;  ///< unset: n0 = u0^2
    double n0_width = 2.0;
    double n1_amplitude = 0.0;
    double n1_width = 2.0;
};

/// Flat key-value run configuration. See README for the key list.
struct RunConfig {
    double R = 30.0;
    std::size_t N = 2048;
    double alpha = 0.5;
    double dt = 1e-3;
    double t_max = 0.0;  ///< defaults to 0.8 R / max(1, alpha)
    bool t_max_explicit = false;
    double record_interval = 0.1;
    double blowup_threshold = 10.0;
    double sponge_width = 0.0;
    bool dealias = true;
    bool confirm_blowup = true;

    InitialKind initial = InitialKind::GroundState;
    double lambda = 1.0;
    int sign = 1;
    GaussianParams gaussian;
    std::string checkpoint_path;

    std::vector<double> local_virial_radii;
    double scattering_interval = 3.0;
    std::optional<double> eps_target;

    std::string output_dir = "kgz_out";
    double checkpoint_interval = 0.0;  ///< 0: only a final checkpoint if requested
    bool write_final_checkpoint = false;
    double ground_state_tol = 1e-12;
    std::uint64_t seed = 0;

    /// Non-fatal findings from validation (alpha > 1, large dt * frequency).
    std::vector<std::string> warnings;

    /// Every key with its materialized value, in a fixed order.
    nlohmann::ordered_json to_json() const;
    /// crc32 of the canonical JSON with output_dir removed, as 8 hex digits.
    std::string hash() const;

    std::size_t observe_every() const;
    std::size_t scattering_every() const;
    EvolveConfig evolve_config() const;
    MonitorOptions monitor_options() const;
};

/// Throws std::invalid_argument on unknown keys, keys that do not apply to
/// the chosen initial data, wrong types, or invalid values.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(std::string_view text);

/// Re-checks all invariants of an assembled config and refreshes warnings.
void validate(RunConfig& cfg);

}  // namespace kgz
