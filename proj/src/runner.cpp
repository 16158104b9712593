#include "kgz/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "kgz/checkpoint.hpp"
#include "kgz/functionals.hpp"

namespace kgz {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << text;
    if (!out) throw std::runtime_error("failed writing " + file.string());
}

RadialField gaussian(const RadialGrid& g, double amplitude, double width) {
    return RadialField::from_physical(
        g, [=](double r) { return amplitude * std::exp(-r * r / (width * width)); });
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

nlohmann::ordered_json to_json(const RunSummary& s) {
    auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::ordered_json j;
    j["config_hash"] = s.config_hash;
    j["JQ"] = s.JQ;
    j["E0"] = s.E0;
    j["E0_over_JQ"] = s.E0 / s.JQ;
    j["K0_initial"] = s.K0_initial;
    j["K2_initial"] = s.K2_initial;
    j["predicted"] = to_string(s.verdict.predicted);
    j["observed"] = to_string(s.verdict.observed);
    j["consistent"] = s.verdict.consistent;
    j["termination"] = to_string(s.termination);
    j["t_end"] = s.t_end;
    j["peak_h1"] = s.peak_h1;
    j["h1_reference"] = s.h1_reference;
    j["final_scattering_residual"] = num(s.verdict.final_residual);
    j["residual_tail_decreasing"] = s.verdict.residual_tail_decreasing;
    j["blowup_confirmed"] = s.verdict.blowup_confirmed;
    j["kappa_hat"] = num(s.verdict.kappa_hat);
    j["i2_concavity_max"] = num(s.verdict.i2_concavity_max);
    j["lowfreq_K"] = s.lowfreq_K;
    j["lowfreq_eps0"] = s.lowfreq_eps0;
    j["records"] = s.records;
    j["warnings"] = s.warnings;
    return j;
}

SpectralState initial_state(const RunConfig& cfg, const GroundState& gs,
                            std::optional<double>* h1_reference) {
    const RadialGrid grid = RadialGrid::make(cfg.R, cfg.N);
    switch (cfg.initial) {
        case InitialKind::GroundState: {
            if (!gs.certified()) throw std::runtime_error("ground state is not certified");
            require_same_grid(grid, gs.profile.grid);
            const double a = cfg.sign * cfg.lambda;
            return SpectralState(SystemState(a * gs.profile, RadialField(grid),
                                             (cfg.lambda * cfg.lambda) *
                                                 pointwise_product(gs.profile, gs.profile),
                                             RadialField(grid), cfg.alpha));
        }
        case InitialKind::Gaussian: {
            const GaussianParams& p = cfg.gaussian;
            RadialField u0 = gaussian(grid, p.amplitude, p.width);
            RadialField n0 = p.n0_amplitude ? gaussian(grid, *p.n0_amplitude, p.n0_width)
                                            : pointwise_product(u0, u0);
            return SpectralState(SystemState(u0, gaussian(grid, p.u1_amplitude, p.u1_width), n0,
                                             gaussian(grid, p.n1_amplitude, p.n1_width),
                                             cfg.alpha));
        }
        case InitialKind::Checkpoint: {
            Checkpoint ck = load_checkpoint(cfg.checkpoint_path);
            if (!(ck.state.grid() == grid)) {
                throw std::runtime_error("checkpoint grid does not match config R/N");
            }
            if (ck.state.alpha != cfg.alpha) {
                throw std::runtime_error("checkpoint alpha does not match config alpha");
            }
            if (h1_reference) *h1_reference = ck.h1_reference;
            return ck.state;
        }
    }
    throw std::logic_error("unhandled initial data kind");
}

RunOutcome run(const RunConfig& cfg_in, const RunContext& ctx) {
    const auto start_clock = std::chrono::steady_clock::now();
    RunConfig cfg = cfg_in;
    validate(cfg);
    const RadialGrid grid = RadialGrid::make(cfg.R, cfg.N);

    std::optional<GroundState> owned;
    const GroundState* gs = ctx.ground_state;
    if (!gs) {
        owned = load_or_compute_ground_state(grid, cfg.ground_state_tol, ctx.cache_dir);
        gs = &*owned;
    }
    require_same_grid(grid, gs->profile.grid);

    std::optional<double> h1_ref;
    const SpectralState s0 = initial_state(cfg, *gs, &h1_ref);
    if (!(s0.t < cfg.t_max + 0.5 * cfg.dt)) {
        throw std::invalid_argument("initial time is past t_max");
    }
    EvolveConfig ecfg = cfg.evolve_config();
    ecfg.h1_reference = h1_ref.value_or(s0.h1_norm_u());

    const fs::path dir = cfg.output_dir;
    if (ctx.write_artifacts) {
        fs::create_directories(dir);
        write_text(dir / "config.json", cfg.to_json().dump(2) + "\n");
    }

    MonitorOptions mo = cfg.monitor_options();
    if (ctx.write_artifacts && cfg.checkpoint_interval > 0.0) {
        const auto every =
            static_cast<std::size_t>(std::llround(cfg.checkpoint_interval / cfg.dt));
        const double ref = *ecfg.h1_reference;
        mo.after_record = [every, ref, dir](const Snapshot& snap) {
            if (snap.step == 0 || snap.step % every != 0) return;
            char name[64];
            std::snprintf(name, sizeof name, "checkpoint_%08zu.bin", snap.step);
            save_checkpoint(dir / name, snap.spectral, ref);
        };
    }

    RunOutcome out;
    out.record = monitored_evolve(s0, ecfg, mo);
    const RunRecord& rec = out.record;

    RunSummary& s = out.summary;
    s.config_hash = cfg.hash();
    s.JQ = gs->JQ;
    s.E0 = rec.E0;
    s.K0_initial = rec.K0_initial;
    s.K2_initial = rec.K2_initial;
    s.verdict = classify_run(rec, gs->JQ);
    s.termination = rec.termination;
    s.t_end = rec.t_end;
    s.peak_h1 = rec.peak_h1;
    s.h1_reference = rec.h1_reference;
    s.lowfreq_K = rec.lowfreq_K;
    s.lowfreq_eps0 = rec.lowfreq_eps0;
    s.records = rec.records.size();
    s.warnings = cfg.warnings;

    if (ctx.write_artifacts) {
        std::string csv = csv_header(rec.local_radii) + "\n";
        for (const auto& r : rec.records) csv += csv_row(r) + "\n";
        write_text(dir / "series.csv", csv);
        write_text(dir / "summary.json", to_json(s).dump(2) + "\n");
        if (cfg.write_final_checkpoint && rec.final_state) {
            save_checkpoint(dir / "final.bin", *rec.final_state, rec.h1_reference);
        }
    }
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_clock).count();
    if (ctx.write_artifacts) {
        nlohmann::ordered_json t;
        t["wall_seconds"] = s.wall_seconds;
        write_text(dir / "timing.json", t.dump(2) + "\n");
    }
    return out;
}

// ---------------------------------------------------------------------------
// sweeps

bool SweepReport::all_consistent() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const SweepEntry& e) { return e.ok && e.summary.verdict.consistent; });
}

bool SweepReport::any_failed() const {
    return std::any_of(entries.begin(), entries.end(), [](const SweepEntry& e) { return !e.ok; });
}

SweepReport sweep(const RunConfig& base, SweepAxis axis, const std::vector<double>& values,
                  unsigned threads, const RunContext& ctx) {
    SweepReport report;
    report.axis = axis;
    report.entries.resize(values.size());
    if (values.empty()) return report;

    const RadialGrid grid = RadialGrid::make(base.R, base.N);
    std::optional<GroundState> owned;
    const GroundState* gs = ctx.ground_state;
    if (!gs) {
        owned = load_or_compute_ground_state(grid, base.ground_state_tol, ctx.cache_dir);
        gs = &*owned;
    }
    const char* prefix = axis == SweepAxis::Lambda ? "lambda_" : "alpha_";

    auto one = [&](std::size_t i) {
        SweepEntry& e = report.entries[i];
        e.value = values[i];
        try {
            RunConfig c = base;
            if (axis == SweepAxis::Lambda) {
                c.lambda = values[i];
            } else {
                c.alpha = values[i];
                if (!c.t_max_explicit) c.t_max = 0.8 * c.R / std::max(1.0, c.alpha);
            }
            c.output_dir = (fs::path(base.output_dir) / (prefix + format_value(values[i]))).string();
            RunContext rc = ctx;
            rc.ground_state = gs;
            e.summary = run(c, rc).summary;
            e.ok = true;
        } catch (const std::exception& ex) {
            e.ok = false;
            e.error = ex.what();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < values.size(); i = next++) one(i);
        });
    }
    for (auto& t : pool) t.join();

    if (ctx.write_artifacts) {
        fs::create_directories(base.output_dir);
        write_text(fs::path(base.output_dir) / "sweep.csv", sweep_table(report));
    }
    return report;
}

std::string sweep_table(const SweepReport& report) {
    std::ostringstream os;
    os << (report.axis == SweepAxis::Lambda ? "lambda" : "alpha")
       << ",E_over_JQ,sign_K0,predicted,observed,consistent,termination,t_end,status\n";
    char buf[64];
    for (const auto& e : report.entries) {
        os << format_value(e.value) << ',';
        if (!e.ok) {
            std::string msg = e.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            os << ",,,,,,,error: " << msg << '\n';
            continue;
        }
        const RunSummary& s = e.summary;
        std::snprintf(buf, sizeof buf, "%.10f", s.E0 / s.JQ);
        const int sign = s.K0_initial > 0 ? 1 : (s.K0_initial < 0 ? -1 : 0);
        os << buf << ',' << sign << ',' << to_string(s.verdict.predicted) << ','
           << to_string(s.verdict.observed) << ',' << (s.verdict.consistent ? "true" : "false")
           << ',' << to_string(s.termination);
        std::snprintf(buf, sizeof buf, "%.6f", s.t_end);
        os << ',' << buf << ",ok\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// plot data

namespace {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::size_t index(const std::string& name) const {
        auto it = std::find(columns.begin(), columns.end(), name);
        if (it == columns.end()) throw std::runtime_error("series.csv lacks column " + name);
        return static_cast<std::size_t>(it - columns.begin());
    }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

Table read_series(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("missing run artifact: " + file.string());
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty series file: " + file.string());
    t.columns = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != t.columns.size()) {
            throw std::runtime_error("malformed row in " + file.string());
        }
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_columns(const fs::path& file, const std::vector<std::string>& names,
                   const std::vector<std::vector<double>>& rows) {
    std::string text = "#";
    for (const auto& n : names) text += " " + n;
    text += "\n";
    char buf[32];
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.12g", r[k]);
            if (k) text += ' ';
            text += buf;
        }
        text += '\n';
    }
    write_text(file, text);
}

}  // namespace

void emit_plot_data(const fs::path& run_dir, const fs::path& out_dir) {
    const Table t = read_series(run_dir / "series.csv");
    fs::create_directories(out_dir);

    std::vector<std::pair<std::string, std::vector<std::string>>> panels = {
        {"energy", {"E"}},
        {"functionals", {"J_of_u", "K0", "K2"}},
        {"virial", {"I_virial", "I_rate_analytic"}},
        {"I1", {"I1", "I1_rhs"}},
        {"I2", {"I2", "I2_deriv"}},
        {"norms", {"H1_of_u", "L4_of_u", "energy_norm2"}},
        {"scattering_residual", {"scattering_residual"}},
    };
    std::vector<std::string> local;
    for (const auto& c : t.columns) {
        if (c.rfind("I_R=", 0) == 0) local.push_back(c);
    }
    if (!local.empty()) panels.emplace_back("local_virial", local);

    const std::size_t it = t.index("t");
    std::string index;
    for (const auto& [name, cols] : panels) {
        std::vector<std::size_t> idx;
        for (const auto& c : cols) idx.push_back(t.index(c));
        std::vector<std::vector<double>> rows;
        for (const auto& r : t.rows) {
            std::vector<double> row{r[it]};
            for (auto k : idx) row.push_back(r[k]);
            // residual samples only exist on some records
            if (name == "scattering_residual" && std::isnan(row[1])) continue;
            rows.push_back(std::move(row));
        }
        std::vector<std::string> names{"t"};
        names.insert(names.end(), cols.begin(), cols.end());
        if (name == "I2") {
            names.push_back("I2^(-1/4)");
            for (auto& row : rows) row.push_back(std::pow(row[1], -0.25));
        }
        write_columns(out_dir / (name + ".dat"), names, rows);
        index += name + " " + name + ".dat";
        for (const auto& n : names) index += " " + n;
        index += "\n";
    }

    // I1 second differences next to the closed-form I1''
    const std::size_t i1 = t.index("I1"), rhs = t.index("I1_rhs");
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 1; j + 1 < t.rows.size(); ++j) {
        const double h = t.rows[j + 1][it] - t.rows[j][it];
        const double d2 =
            (t.rows[j + 1][i1] - 2.0 * t.rows[j][i1] + t.rows[j - 1][i1]) / (h * h);
        rows.push_back({t.rows[j][it], d2, t.rows[j][rhs]});
    }
    write_columns(out_dir / "I1_second_differences.dat", {"t", "d2_I1", "I1_rhs"}, rows);
    index += "I1_second_differences I1_second_differences.dat t d2_I1 I1_rhs\n";
    write_text(out_dir / "index.txt", index);
}

}  // namespace kgz
