// kgz: command-line front end.
//
// Exit codes: 0 ok, 1 usage or invalid configuration, 2 inconsistency detected,
// 3 runtime failure.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "kgz/ground_state.hpp"
#include "kgz/runner.hpp"
#include "verify.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kInconsistent = 2;
constexpr int kFailure = 3;

const char* const kConfigKeys[] = {
    "R", "N", "alpha", "dt", "t_max", "record_interval", "blowup_threshold", "sponge_width",
    "dealias", "confirm_blowup", "initial_data", "lambda", "sign", "amplitude", "width",
    "u1_amplitude", "u1_width", "n0_amplitude", "n0_width", "n1_amplitude", "n1_width",
    "checkpoint_path", "local_virial_radii", "scattering_interval", "eps_target", "output_dir",
    "checkpoint_interval", "write_final_checkpoint", "ground_state_tol", "seed",
};

struct ConfigFlags {
    std::string file;
    std::map<std::string, std::string> values;

    void attach(CLI::App* app) {
        app->add_option("--config", file, "JSON config file; flags below override its keys");
        for (const char* key : kConfigKeys) {
            app->add_option(std::string("--") + key, values[key], "config key " + std::string(key));
        }
    }

    kgz::RunConfig build() const {
        nlohmann::json j = nlohmann::json::object();
        if (!file.empty()) {
            std::ifstream in(file);
            if (!in) throw std::invalid_argument("cannot read config file " + file);
            std::stringstream ss;
            ss << in.rdbuf();
            try {
                j = nlohmann::json::parse(ss.str());
            } catch (const nlohmann::json::parse_error& e) {
                throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
            }
        }
        for (const auto& [key, text] : values) {
            if (text.empty()) continue;
            try {
                j[key] = nlohmann::json::parse(text);
            } catch (const nlohmann::json::parse_error&) {
                j[key] = text;
            }
        }
        return kgz::parse_config(j);
    }
};

std::optional<std::filesystem::path> cache_dir(const std::string& flag) {
    if (!flag.empty()) return std::filesystem::path(flag);
    if (const char* env = std::getenv("KGZ_CACHE_DIR"); env && *env) {
        return std::filesystem::path(env);
    }
    return std::nullopt;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("bad list entry '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

void print_warnings(const kgz::RunConfig& cfg) {
    for (const auto& w : cfg.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

int cmd_groundstate(double R, std::size_t N, double tol, int levels, const std::string& cache) {
    const kgz::RadialGrid grid = kgz::RadialGrid::make(R, N);
    const kgz::GroundState gs = kgz::load_or_compute_ground_state(grid, tol, cache_dir(cache));
    std::printf("R = %g  N = %zu\n", R, N);
    std::printf("Q(0)          = %.12f\n", gs.Q0);
    std::printf("J(Q)          = %.12f\n", gs.JQ);
    std::printf("PDE residual  = %.3e\n", gs.residual_pde);
    std::printf("|K0|/||Q||^4  = %.3e\n", gs.pohozaev_K0);
    std::printf("|K2|/||Q||^4  = %.3e\n", gs.pohozaev_K2);
    std::printf("positive %s, decreasing %s, certified %s\n", gs.positive ? "yes" : "no",
                gs.decreasing ? "yes" : "no", gs.certified() ? "yes" : "no");
    if (levels > 0) {
        const kgz::ThresholdStudy st = kgz::threshold_refinement(R, N, tol, levels);
        for (std::size_t i = 0; i < st.sizes.size(); ++i) {
            std::printf("  N = %6zu  J = %.15f\n", st.sizes[i], st.values[i]);
        }
        std::printf("observed order %g, extrapolated J = %.15f\n", st.observed_order,
                    st.extrapolated);
    }
    return gs.certified() ? kOk : kFailure;
}

int cmd_run(const ConfigFlags& flags, const std::string& cache) {
    const kgz::RunConfig cfg = flags.build();
    print_warnings(cfg);
    kgz::RunContext ctx;
    ctx.cache_dir = cache_dir(cache);
    const kgz::RunOutcome out = kgz::run(cfg, ctx);
    std::cout << kgz::to_json(out.summary).dump(2) << "\n";
    return out.summary.verdict.consistent ? kOk : kInconsistent;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& lambdas, const std::string& alphas,
              unsigned threads, const std::string& cache) {
    if (lambdas.empty() == alphas.empty()) {
        throw std::invalid_argument("give exactly one of --lambdas or --alphas");
    }
    const kgz::RunConfig cfg = flags.build();
    print_warnings(cfg);
    kgz::RunContext ctx;
    ctx.cache_dir = cache_dir(cache);
    const auto axis = lambdas.empty() ? kgz::SweepAxis::Alpha : kgz::SweepAxis::Lambda;
    const auto report =
        kgz::sweep(cfg, axis, parse_list(lambdas.empty() ? alphas : lambdas), threads, ctx);
    std::cout << kgz::sweep_table(report);
    if (report.any_failed()) return kFailure;
    return report.all_consistent() ? kOk : kInconsistent;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial Klein-Gordon-Zakharov laboratory"};
    app.require_subcommand(1);

    std::string cache;
    app.add_option("--cache-dir", cache, "ground-state cache directory (default: $KGZ_CACHE_DIR)");

    auto* gs = app.add_subcommand("groundstate", "compute, certify and cache the ground state");
    double gs_R = 30.0, gs_tol = 1e-12;
    std::size_t gs_N = 4096;
    int gs_levels = 0;
    gs->add_option("--R", gs_R, "domain radius")->capture_default_str();
    gs->add_option("--N", gs_N, "grid intervals (power of two)")->capture_default_str();
    gs->add_option("--tol", gs_tol, "bisection tolerance")->capture_default_str();
    gs->add_option("--refine", gs_levels, "also run a refinement study with this many levels");

    auto* run = app.add_subcommand("run", "evolve one configuration");
    ConfigFlags run_flags;
    run_flags.attach(run);

    auto* sw = app.add_subcommand("sweep", "parallel runs over lambda or alpha");
    ConfigFlags sweep_flags;
    sweep_flags.attach(sw);
    std::string lambdas, alphas;
    unsigned threads = 0;
    sw->add_option("--lambdas", lambdas, "comma-separated lambda values");
    sw->add_option("--alphas", alphas, "comma-separated alpha values");
    sw->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* pd = app.add_subcommand("plotdata", "column files for plotting from a run directory");
    std::string run_dir, plot_dir;
    pd->add_option("run_dir", run_dir, "directory holding series.csv")->required();
    pd->add_option("--out", plot_dir, "output directory (default: <run_dir>/plot)");

    auto* vf = app.add_subcommand("verify", "run the invariant suites");
    bool quick = false;
    vf->add_flag("--quick", quick, "skip the dynamical suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*gs) return cmd_groundstate(gs_R, gs_N, gs_tol, gs_levels, cache);
        if (*run) return cmd_run(run_flags, cache);
        if (*sw) return cmd_sweep(sweep_flags, lambdas, alphas, threads, cache);
        if (*pd) {
            kgz::emit_plot_data(run_dir, plot_dir.empty() ? std::filesystem::path(run_dir) / "plot"
                                                          : std::filesystem::path(plot_dir));
            return kOk;
        }
        if (*vf) return kgz::tools::verify(quick, cache_dir(cache)) ? kOk : kInconsistent;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
    return kUsage;
}
