#include "kgz/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kgz {

namespace {

bool finite_coeffs(const SpectralField& f) {
    return std::all_of(f.a.begin(), f.a.end(), [](double x) { return std::isfinite(x); });
}

// (x, v) -> (c x + s/w v, -w s x + c v) per mode
void rotate(std::vector<double>& x, std::vector<double>& v, const std::vector<double>& c,
            const std::vector<double>& s, const RadialGrid& g, bool klein_gordon, double alpha) {
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double xi = g.frequency(k);
        const double w = klein_gordon ? std::sqrt(1.0 + xi * xi) : alpha * xi;
        const double x0 = x[k], v0 = v[k];
        x[k] = c[k] * x0 + s[k] / w * v0;
        v[k] = -w * s[k] * x0 + c[k] * v0;
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// SpectralState

SpectralState::SpectralState(const SystemState& s)
    : t(s.t), alpha(s.alpha), u(sine_transform(s.u)), udot(sine_transform(s.udot)),
      n(sine_transform(s.n)), ndot(sine_transform(s.ndot)) {}

SpectralState::SpectralState(double t_, double alpha_, SpectralField u_, SpectralField udot_,
                             SpectralField n_, SpectralField ndot_)
    : t(t_), alpha(alpha_), u(std::move(u_)), udot(std::move(udot_)), n(std::move(n_)),
      ndot(std::move(ndot_)) {
    validate_alpha(alpha);
    require_same_grid(u.grid, udot.grid);
    require_same_grid(u.grid, n.grid);
    require_same_grid(u.grid, ndot.grid);
}

SystemState SpectralState::to_physical() const {
    auto& tr = transform_for(grid());
    return SystemState(tr.inverse(u), tr.inverse(udot), tr.inverse(n), tr.inverse(ndot), alpha, t);
}

bool SpectralState::all_finite() const {
    return std::isfinite(t) && finite_coeffs(u) && finite_coeffs(udot) && finite_coeffs(n) &&
           finite_coeffs(ndot);
}

double SpectralState::h1_norm_u() const {
    double acc = 0.0;
    for (std::size_t k = 0; k < u.a.size(); ++k) {
        const double xi = u.grid.frequency(k);
        acc += (1.0 + xi * xi) * u.a[k] * u.a[k];
    }
    return std::sqrt(4.0 * std::numbers::pi * 0.5 * u.grid.radius() * acc);
}

// ---------------------------------------------------------------------------
// Integrator

Integrator::Integrator(SpectralState s, StepOptions opts)
    : s_(std::move(s)), opts_(opts), tr_(transform_for(s_.grid())) {
    const std::size_t m = s_.grid().size();
    wu_.resize(m);
    wn_.resize(m);
    prod_.resize(m);
    coef_.resize(m);
    kg_c_.resize(m);
    kg_s_.resize(m);
    wv_c_.resize(m);
    wv_s_.resize(m);
    dealias_cut_ = opts_.dealias ? (2 * s_.grid().intervals()) / 3 : m;
    cached_tau_ = std::numeric_limits<double>::quiet_NaN();
}

void Integrator::prepare(double tau) {
    if (tau == cached_tau_) return;
    const RadialGrid& g = s_.grid();
    for (std::size_t k = 0; k < kg_c_.size(); ++k) {
        const double xi = g.frequency(k);
        const double kg = std::sqrt(1.0 + xi * xi) * tau;
        const double wv = s_.alpha * xi * tau;
        kg_c_[k] = std::cos(kg);
        kg_s_[k] = std::sin(kg);
        wv_c_[k] = std::cos(wv);
        wv_s_[k] = std::sin(wv);
    }
    cached_tau_ = tau;
}

void Integrator::linear(double tau) {
    prepare(tau);
    rotate(s_.u.a, s_.udot.a, kg_c_, kg_s_, s_.grid(), true, s_.alpha);
    rotate(s_.n.a, s_.ndot.a, wv_c_, wv_s_, s_.grid(), false, s_.alpha);
}

void Integrator::kick(double dt) {
    const RadialGrid& g = s_.grid();
    tr_.inverse(s_.u.a, wu_);
    tr_.inverse(s_.n.a, wn_);

    // n u, reduced: w_n w_u / r
    for (std::size_t i = 0; i < prod_.size(); ++i) prod_[i] = wn_[i] * wu_[i] / g.node(i);
    tr_.forward(prod_, coef_);
    for (std::size_t k = 0; k < dealias_cut_ && k < coef_.size(); ++k) {
        s_.udot.a[k] += dt * coef_[k];
    }

    // u^2, reduced: w_u^2 / r; forcing alpha^2 xi^2 (u^2)^
    for (std::size_t i = 0; i < prod_.size(); ++i) prod_[i] = wu_[i] * wu_[i] / g.node(i);
    tr_.forward(prod_, coef_);
    const double a2 = s_.alpha * s_.alpha;
    for (std::size_t k = 0; k < dealias_cut_ && k < coef_.size(); ++k) {
        const double xi = g.frequency(k);
        s_.ndot.a[k] += dt * a2 * xi * xi * coef_[k];
    }
}

void Integrator::sponge(double dt) {
    const RadialGrid& g = s_.grid();
    const double start = g.radius() - opts_.sponge_width;
    for (SpectralField* f : {&s_.u, &s_.udot, &s_.n, &s_.ndot}) {
        tr_.inverse(f->a, prod_);
        for (std::size_t i = 0; i < prod_.size(); ++i) {
            const double r = g.node(i);
            if (r <= start) continue;
            const double x = (r - start) / opts_.sponge_width;
            prod_[i] *= std::exp(-opts_.sponge_strength * x * x * dt);
        }
        tr_.forward(prod_, f->a);
    }
}

void Integrator::step(double dt) {
    SpectralState before = s_;
    linear(0.5 * dt);
    if (opts_.nonlinear) kick(dt);
    linear(0.5 * dt);
    if (opts_.sponge_width > 0.0) sponge(dt);
    s_.t += dt;
    if (!s_.all_finite()) {
        s_ = before;
        throw BlowupSignal(std::move(before));
    }
}

SystemState step(const SystemState& s, double dt, const StepOptions& opts) {
    Integrator it(SpectralState(s), opts);
    it.step(dt);
    return it.state().to_physical();
}

SpectralState free_flow(SpectralState s, double t) {
    StepOptions opts;
    opts.nonlinear = false;
    opts.dealias = false;
    Integrator it(std::move(s), opts);
    it.step(t);
    return it.state();
}

SystemState free_flow(const SystemState& s, double t) {
    return free_flow(SpectralState(s), t).to_physical();
}

// ---------------------------------------------------------------------------
// evolve

void EvolveConfig::validate(const RadialGrid& grid, double alpha) const {
    validate_alpha(alpha);
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_max >= 0.0)) throw std::invalid_argument("t_max must be non-negative");
    if (observe_every == 0) throw std::invalid_argument("observe_every must be positive");
    if (!(blowup_threshold > 1.0)) throw std::invalid_argument("blowup_threshold must exceed 1");
    if (sponge_width < 0.0 || sponge_width >= grid.radius()) {
        throw std::invalid_argument("sponge width must lie in [0, R)");
    }
    const double guard = 0.8 * grid.radius() / std::max(1.0, alpha);
    if (sponge_width == 0.0 && t_max > guard * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "t_max " << t_max << " exceeds the domain-of-dependence guard 0.8 R / max(1, alpha) = "
           << guard << " (enable the sponge for longer runs)";
        throw std::invalid_argument(os.str());
    }
}

StepOptions EvolveConfig::step_options() const {
    StepOptions o;
    o.nonlinear = nonlinear;
    o.dealias = dealias;
    o.sponge_width = sponge_width;
    return o;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::Horizon: return "horizon";
        case Termination::Threshold: return "h1_threshold";
        case Termination::NonFinite: return "non_finite";
    }
    return "?";
}

EvolveResult evolve(const SpectralState& s0, const EvolveConfig& cfg, const Observer& observer) {
    cfg.validate(s0.grid(), s0.alpha);
    Integrator it(s0, cfg.step_options());

    EvolveResult res(s0);
    res.h1_reference = cfg.h1_reference.value_or(s0.h1_norm_u());
    res.peak_h1 = s0.h1_norm_u();
    const double limit = cfg.blowup_threshold * res.h1_reference;
    const auto total = static_cast<std::size_t>(std::llround((cfg.t_max - s0.t) / cfg.dt));

    auto observe = [&](std::size_t k) {
        if (!observer || k % cfg.observe_every != 0) return;
        const SystemState phys = it.state().to_physical();
        observer(Snapshot{k, it.state(), phys});
    };

    observe(0);
    std::size_t k = 0;
    while (k < total) {
        try {
            it.step(cfg.dt);
        } catch (const BlowupSignal&) {
            res.termination = Termination::NonFinite;
            break;
        }
        ++k;
        const double h1 = it.state().h1_norm_u();
        res.peak_h1 = std::max(res.peak_h1, h1);
        observe(k);
        if (!(h1 <= limit)) {
            res.termination = Termination::Threshold;
            break;
        }
    }
    res.steps = k;
    res.t_end = it.state().t;
    res.final_state = it.state();
    return res;
}

EvolveResult evolve(const SystemState& s0, const EvolveConfig& cfg, const Observer& observer) {
    return evolve(SpectralState(s0), cfg, observer);
}

bool confirm_blowup(const SpectralState& s0, EvolveConfig cfg, double t_blowup) {
    cfg.dt *= 0.5;
    if (!cfg.h1_reference) cfg.h1_reference = s0.h1_norm_u();
    const EvolveResult fine = evolve(s0, cfg);
    if (!fine.blowup()) return false;
    const double elapsed = t_blowup - s0.t;
    return std::abs(fine.t_end - t_blowup) <= 0.05 * elapsed;
}

std::vector<std::string> config_warnings(const RadialGrid& grid, double alpha, double dt) {
    std::vector<std::string> out;
    if (alpha > 1.0) {
        out.emplace_back("alpha > 1: local well-posedness is only established for alpha < 1");
    }
    const double phase = dt * std::sqrt(1.0 + grid.max_frequency() * grid.max_frequency());
    if (phase > std::numbers::pi) {
        std::ostringstream os;
        os << "dt * max frequency = " << phase << " > pi: the nonlinear kick is under-resolved";
        out.push_back(os.str());
    }
    return out;
}

}  // namespace kgz
