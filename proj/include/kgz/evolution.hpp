#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgz/spectral.hpp"
#include "kgz/state.hpp"

namespace kgz {

/// Sine coefficients of (u, u_t, n, n_t): the integrator's working form.
struct SpectralState {
    double t = 0.0;
    double alpha = 0.5;
    SpectralField u, udot, n, ndot;

    explicit SpectralState(const SystemState& s);
    SpectralState(double t_, double alpha_, SpectralField u_, SpectralField udot_,
                  SpectralField n_, SpectralField ndot_);

    const RadialGrid& grid() const { return u.grid; }
    SystemState to_physical() const;
    bool all_finite() const;
    /// ||u||_{H1}, straight from the coefficients.
    double h1_norm_u() const;
};

struct StepOptions {
    bool nonlinear = true;  ///< false leaves only the exact linear flow
    bool dealias = true;    ///< 2/3-rule filter on the products n u and u^2
    double sponge_width = 0.0;     ///< absorbing layer [R - width, R]; 0 disables it
    double sponge_strength = 5.0;  ///< peak damping rate in the layer
};

/// Thrown when a field turns non-finite; carries the last finite state.
class BlowupSignal : public std::runtime_error {
public:
    explicit BlowupSignal(SpectralState last)
        : std::runtime_error("non-finite field during step"), last_finite(std::move(last)) {}
    SpectralState last_finite;
};

/// Strang splitting: half step of the exact linear flow, a full kick
/// u_t += dt n u, n_t += dt alpha^2 (-Lap)(u^2), then another linear half step.
class Integrator {
public:
    Integrator(SpectralState s, StepOptions opts);

    void step(double dt);
    const SpectralState& state() const { return s_; }

private:
    void linear(double tau);
    void kick(double dt);
    void sponge(double dt);
    void prepare(double tau);

    SpectralState s_;
    StepOptions opts_;
    SineTransform& tr_;
    std::vector<double> wu_, wn_, prod_, coef_;
    // cos / sin for the current half step
    double cached_tau_ = 0.0;
    std::vector<double> kg_c_, kg_s_, wv_c_, wv_s_;
    std::size_t dealias_cut_ = 0;
};

/// One Strang step on a physical state.
SystemState step(const SystemState& s, double dt, const StepOptions& opts = {});

/// Exact linear evolution by t (either sign).
SpectralState free_flow(SpectralState s, double t);
SystemState free_flow(const SystemState& s, double t);

struct EvolveConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    std::size_t observe_every = 10;
    /// Stop once ||u||_{H1} exceeds this multiple of the reference norm.
    double blowup_threshold = 10.0;
    /// Reference H1 norm; defaults to that of the initial state.
    std::optional<double> h1_reference;
    double sponge_width = 0.0;
    bool dealias = true;
    bool nonlinear = true;

    /// dt > 0, observe_every > 0, and t_max <= 0.8 R / max(1, alpha) unless the sponge is on.
    void validate(const RadialGrid& grid, double alpha) const;
    StepOptions step_options() const;
};

enum class Termination { Horizon, Threshold, NonFinite };

const char* to_string(Termination t);

struct EvolveResult {
    explicit EvolveResult(SpectralState s) : final_state(std::move(s)) {}

    Termination termination = Termination::Horizon;
    double t_end = 0.0;
    std::size_t steps = 0;
    double h1_reference = 0.0;
    double peak_h1 = 0.0;
    SpectralState final_state;
    bool blowup() const { return termination != Termination::Horizon; }
};

struct Snapshot {
    std::size_t step;
    const SpectralState& spectral;
    const SystemState& state;
};

/// Called at step 0 and every observe_every steps. Must not retain references.
using Observer = std::function<void(const Snapshot&)>;

/// Runs until t_max, a non-finite field, or the H1 threshold. Non-finite fields
/// end the run with Termination::NonFinite and the last finite state.
EvolveResult evolve(const SpectralState& s0, const EvolveConfig& cfg, const Observer& observer = {});
EvolveResult evolve(const SystemState& s0, const EvolveConfig& cfg, const Observer& observer = {});

/// Re-runs with dt/2; true if that run also blows up within 5% of t_blowup.
bool confirm_blowup(const SpectralState& s0, EvolveConfig cfg, double t_blowup);

/// Warnings for configurations outside the well-posedness setting (alpha > 1)
/// or with a large dt * max frequency.
std::vector<std::string> config_warnings(const RadialGrid& grid, double alpha, double dt);

}  // namespace kgz
