#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgz/config.hpp"
#include "kgz/diagnostics.hpp"
#include "kgz/ground_state.hpp"

namespace kgz {

struct RunSummary {
    std::string config_hash;
    double JQ = 0;
    double E0 = 0;
    double K0_initial = 0;
    double K2_initial = 0;
    Verdict verdict;
    Termination termination = Termination::Horizon;
    double t_end = 0;
    double peak_h1 = 0;
    double h1_reference = 0;
    int lowfreq_K = 0;
    double lowfreq_eps0 = 0;
    std::size_t records = 0;
    std::vector<std::string> warnings;
    double wall_seconds = 0;  ///< kept out of summary.json
};

/// Deterministic JSON form (everything but wall time).
nlohmann::ordered_json to_json(const RunSummary& s);

struct RunOutcome {
    RunSummary summary;
    RunRecord record;
};

struct RunContext {
    /// Shared ground state on the config's grid; computed (or loaded) when null.
    const GroundState* ground_state = nullptr;
    std::optional<std::filesystem::path> cache_dir;
    bool write_artifacts = true;
};

/// Initial data for cfg. For checkpoint data, *h1_reference receives the
/// stored reference norm.
SpectralState initial_state(const RunConfig& cfg, const GroundState& gs,
                            std::optional<double>* h1_reference = nullptr);

/// Ground-state load, initial data, monitored evolution, classification.
/// Artifacts in cfg.output_dir: config.json, series.csv, summary.json,
/// timing.json and checkpoints when requested. Blow-up is a normal outcome;
/// I/O and setup errors throw.
RunOutcome run(const RunConfig& cfg, const RunContext& ctx = {});

enum class SweepAxis { Lambda, Alpha };

struct SweepEntry {
    double value = 0;
    bool ok = false;
    std::string error;
    RunSummary summary;
};

struct SweepReport {
    SweepAxis axis = SweepAxis::Lambda;
    std::vector<SweepEntry> entries;
    /// No failed run and no inconsistent verdict.
    bool all_consistent() const;
    bool any_failed() const;
};

/// One run per axis value, each in <output_dir>/<axis>_<value>, on `threads`
/// workers (0: hardware concurrency). A failing run is recorded in its entry
/// and does not affect the others. Writes <output_dir>/sweep.csv.
SweepReport sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values,
                  unsigned threads, const RunContext& ctx = {});

std::string sweep_table(const SweepReport& report);

/// Whitespace-delimited column files, one per panel, from <run_dir>/series.csv,
/// plus index.txt and the I1 second-difference companion file.
/// Throws std::runtime_error if series.csv is missing or malformed.
void emit_plot_data(const std::filesystem::path& run_dir, const std::filesystem::path& out_dir);

}  // namespace kgz
