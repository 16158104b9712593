#include "kgz/config.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

namespace kgz {

using nlohmann::json;

const char* to_string(InitialKind k) {
    switch (k) {
        case InitialKind::GroundState: return "ground_state";
        case InitialKind::Gaussian: return "gaussian";
        case InitialKind::Checkpoint: return "checkpoint";
    }
    return "?";
}

namespace {

const std::set<std::string> kCommonKeys = {
    "R", "N", "alpha", "dt", "t_max", "record_interval", "blowup_threshold", "sponge_width",
    "dealias", "confirm_blowup", "initial_data", "local_virial_radii", "scattering_interval",
    "eps_target", "output_dir", "checkpoint_interval", "write_final_checkpoint",
    "ground_state_tol", "seed",
};
const std::set<std::string> kGroundStateKeys = {"lambda", "sign"};
const std::set<std::string> kGaussianKeys = {
    "amplitude", "width", "u1_amplitude", "u1_width", "n0_amplitude",
    "n0_width", "n1_amplitude", "n1_width",
};
const std::set<std::string> kCheckpointKeys = {"checkpoint_path"};

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

template <class T>
void read(const json& j, const char* key, T& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        bad(std::string("wrong type for key '") + key + "'");
    }
}

void read_number(const json& j, const char* key, double& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number()) bad(std::string("key '") + key + "' must be a number");
    out = it->get<double>();
}

void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) bad(std::string(what) + " must be positive");
}

bool is_multiple(double x, double step) {
    const double k = std::round(x / step);
    return k >= 1.0 && std::abs(k * step - x) <= 1e-9 * x;
}

}  // namespace

RunConfig parse_config(const json& j) {
    if (!j.is_object()) bad("expected a JSON object");
    RunConfig c;

    std::string kind = "ground_state";
    read(j, "initial_data", kind);
    const std::set<std::string>* extra = nullptr;
    if (kind == "ground_state") {
        c.initial = InitialKind::GroundState;
        extra = &kGroundStateKeys;
    } else if (kind == "gaussian") {
        c.initial = InitialKind::Gaussian;
        extra = &kGaussianKeys;
    } else if (kind == "checkpoint") {
        c.initial = InitialKind::Checkpoint;
        extra = &kCheckpointKeys;
    } else {
        bad("initial_data must be ground_state, gaussian or checkpoint, got '" + kind + "'");
    }
    for (const auto& [key, value] : j.items()) {
        if (kCommonKeys.count(key) || extra->count(key)) continue;
        const bool known = kGroundStateKeys.count(key) || kGaussianKeys.count(key) ||
                           kCheckpointKeys.count(key);
        if (known) bad("key '" + key + "' does not apply to initial_data " + kind);
        bad("unknown key '" + key + "'");
    }

    read_number(j, "R", c.R);
    if (auto it = j.find("N"); it != j.end()) {
        if (!it->is_number_integer() || it->get<long long>() <= 0) {
            bad("N must be a positive integer");
        }
        c.N = it->get<std::size_t>();
    }
    read_number(j, "alpha", c.alpha);
    read_number(j, "dt", c.dt);
    const bool has_tmax = j.contains("t_max");
    read_number(j, "t_max", c.t_max);
    read_number(j, "record_interval", c.record_interval);
    read_number(j, "blowup_threshold", c.blowup_threshold);
    read_number(j, "sponge_width", c.sponge_width);
    read(j, "dealias", c.dealias);
    read(j, "confirm_blowup", c.confirm_blowup);

    read_number(j, "lambda", c.lambda);
    read(j, "sign", c.sign);
    read_number(j, "amplitude", c.gaussian.amplitude);
    read_number(j, "width", c.gaussian.width);
    read_number(j, "u1_amplitude", c.gaussian.u1_amplitude);
    read_number(j, "u1_width", c.gaussian.u1_width);
    if (auto it = j.find("n0_amplitude"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) bad("key 'n0_amplitude' must be a number or null");
        c.gaussian.n0_amplitude = it->get<double>();
    }
    read_number(j, "n0_width", c.gaussian.n0_width);
    read_number(j, "n1_amplitude", c.gaussian.n1_amplitude);
    read_number(j, "n1_width", c.gaussian.n1_width);
    read(j, "checkpoint_path", c.checkpoint_path);

    read(j, "local_virial_radii", c.local_virial_radii);
    read_number(j, "scattering_interval", c.scattering_interval);
    if (auto it = j.find("eps_target"); it != j.end() && !it->is_null()) {
        if (!it->is_number()) bad("key 'eps_target' must be a number or null");
        c.eps_target = it->get<double>();
    }
    read(j, "output_dir", c.output_dir);
    read_number(j, "checkpoint_interval", c.checkpoint_interval);
    read(j, "write_final_checkpoint", c.write_final_checkpoint);
    read_number(j, "ground_state_tol", c.ground_state_tol);
    read(j, "seed", c.seed);

    c.t_max_explicit = has_tmax;
    if (!has_tmax) c.t_max = 0.8 * c.R / std::max(1.0, c.alpha);
    validate(c);
    return c;
}

RunConfig parse_config_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

void validate(RunConfig& c) {
    if (c.alpha == 1.0) bad("model assumption violated: alpha must differ from 1");
    require_positive(c.alpha, "alpha");
    require_positive(c.R, "R");
    if (c.N < 8 || (c.N & (c.N - 1)) != 0) bad("N must be a power of two >= 8");
    if (!(c.dt > 0.0)) bad("dt must be positive");
    if (!(c.t_max >= 0.0)) bad("t_max must be non-negative");
    require_positive(c.record_interval, "record_interval");
    if (!is_multiple(c.record_interval, c.dt)) bad("record_interval must be a multiple of dt");
    if (!(c.scattering_interval >= 0.0)) bad("scattering_interval must be non-negative");
    if (c.scattering_interval > 0.0 && !is_multiple(c.scattering_interval, c.record_interval)) {
        bad("scattering_interval must be a multiple of record_interval");
    }
    if (!(c.checkpoint_interval >= 0.0)) bad("checkpoint_interval must be non-negative");
    if (c.checkpoint_interval > 0.0 && !is_multiple(c.checkpoint_interval, c.record_interval)) {
        bad("checkpoint_interval must be a multiple of record_interval");
    }
    if (c.sign != 1 && c.sign != -1) bad("sign must be +1 or -1");
    if (!(c.lambda >= 0.0)) bad("lambda must be non-negative");
    require_positive(c.gaussian.width, "width");
    require_positive(c.gaussian.u1_width, "u1_width");
    require_positive(c.gaussian.n0_width, "n0_width");
    require_positive(c.gaussian.n1_width, "n1_width");
    if (c.initial == InitialKind::Checkpoint && c.checkpoint_path.empty()) {
        bad("initial_data checkpoint needs checkpoint_path");
    }
    if (!(c.ground_state_tol >= 1e-12)) bad("ground_state_tol must be >= 1e-12");
    if (c.eps_target && !(*c.eps_target > 0.0)) bad("eps_target must be positive");
    for (double r : c.local_virial_radii) {
        if (!(r > 0.0) || r > 0.5 * c.R) bad("local_virial_radii entries must lie in (0, R/2]");
    }
    if (c.output_dir.empty()) bad("output_dir must not be empty");

    const RadialGrid grid = RadialGrid::make(c.R, c.N);
    try {
        c.evolve_config().validate(grid, c.alpha);
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
    c.warnings = config_warnings(grid, c.alpha, c.dt);
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["R"] = R;
    j["N"] = N;
    j["alpha"] = alpha;
    j["dt"] = dt;
    j["t_max"] = t_max;
    j["record_interval"] = record_interval;
    j["blowup_threshold"] = blowup_threshold;
    j["sponge_width"] = sponge_width;
    j["dealias"] = dealias;
    j["confirm_blowup"] = confirm_blowup;
    j["initial_data"] = to_string(initial);
    switch (initial) {
        case InitialKind::GroundState:
            j["lambda"] = lambda;
            j["sign"] = sign;
            break;
        case InitialKind::Gaussian:
            j["amplitude"] = gaussian.amplitude;
            j["width"] = gaussian.width;
            j["u1_amplitude"] = gaussian.u1_amplitude;
            j["u1_width"] = gaussian.u1_width;
            j["n0_amplitude"] = gaussian.n0_amplitude ? json(*gaussian.n0_amplitude) : json(nullptr);
            j["n0_width"] = gaussian.n0_width;
            j["n1_amplitude"] = gaussian.n1_amplitude;
            j["n1_width"] = gaussian.n1_width;
            break;
        case InitialKind::Checkpoint:
            j["checkpoint_path"] = checkpoint_path;
            break;
    }
    j["local_virial_radii"] = local_virial_radii;
    j["scattering_interval"] = scattering_interval;
    j["eps_target"] = eps_target ? json(*eps_target) : json(nullptr);
    j["output_dir"] = output_dir;
    j["checkpoint_interval"] = checkpoint_interval;
    j["write_final_checkpoint"] = write_final_checkpoint;
    j["ground_state_tol"] = ground_state_tol;
    j["seed"] = seed;
    return j;
}

std::string RunConfig::hash() const {
    auto j = to_json();
    j.erase("output_dir");
    const std::string text = j.dump();
    const auto c = ::crc32(::crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(text.data()),
                           static_cast<uInt>(text.size()));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(c));
    return buf;
}

std::size_t RunConfig::observe_every() const {
    return static_cast<std::size_t>(std::llround(record_interval / dt));
}

std::size_t RunConfig::scattering_every() const {
    if (scattering_interval == 0.0) return 0;
    return static_cast<std::size_t>(std::llround(scattering_interval / record_interval));
}

EvolveConfig RunConfig::evolve_config() const {
    EvolveConfig e;
    e.dt = dt;
    e.t_max = t_max;
    e.observe_every = std::max<std::size_t>(1, observe_every());
    e.blowup_threshold = blowup_threshold;
    e.sponge_width = sponge_width;
    e.dealias = dealias;
    return e;
}

MonitorOptions RunConfig::monitor_options() const {
    MonitorOptions m;
    m.local_radii = local_virial_radii;
    m.scattering_every = scattering_every();
    if (eps_target) m.eps_target = *eps_target;
    m.confirm_blowup = confirm_blowup;
    return m;
}

}  // namespace kgz
