#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>

#include "kgz/evolution.hpp"
#include "kgz/functionals.hpp"
#include "kgz/ground_state.hpp"
#include "oracles.hpp"

using namespace kgz;

namespace {

SystemState gaussian_state(const RadialGrid& g, double A, double s, double alpha) {
    auto u0 = RadialField::from_physical(g, [=](double r) { return A * std::exp(-r * r / (s * s)); });
    auto n0 = pointwise_product(u0, u0);
    return SystemState(u0, RadialField(g), n0, RadialField(g), alpha);
}

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
    return m;
}

double state_distance(const SpectralState& a, const SpectralState& b) {
    return std::max({max_abs_diff(a.u, b.u), max_abs_diff(a.udot, b.udot),
                     max_abs_diff(a.n, b.n), max_abs_diff(a.ndot, b.ndot)});
}

SpectralState run_fixed(SpectralState s, double dt, int steps) {
    Integrator it(std::move(s), StepOptions{});
    for (int i = 0; i < steps; ++i) it.step(dt);
    return it.state();
}

}  // namespace

TEST_SUITE("evolution") {

TEST_CASE("zero state stays zero") {
    const RadialGrid g = RadialGrid::make(30.0, 256);
    EvolveConfig cfg;
    cfg.dt = 0.01;
    cfg.t_max = 2.0;
    const EvolveResult r = evolve(SystemState::zero(g, 0.5), cfg);
    CHECK(r.termination == Termination::Horizon);
    CHECK(r.t_end == doctest::Approx(2.0));
    for (double x : r.final_state.u.a) CHECK(x == 0.0);
    for (double x : r.final_state.ndot.a) CHECK(x == 0.0);
}

TEST_CASE("linear flow matches the propagator symbols") {
    const RadialGrid g = RadialGrid::make(30.0, 512);
    std::mt19937_64 rng(11);
    const double alpha = 0.7, t = 1.3;
    const SystemState s(oracle::random_field(g, rng), oracle::random_field(g, rng),
                        oracle::random_field(g, rng), oracle::random_field(g, rng), alpha);
    const SpectralState out = free_flow(SpectralState(s), t);

    const auto u0 = sine_transform(s.u), u1 = sine_transform(s.udot);
    const auto n0 = sine_transform(s.n), n1 = sine_transform(s.ndot);
    SpectralField u = apply_symbol(u0, Symbol::KleinGordonCos, t);
    u += apply_symbol(u1, Symbol::KleinGordonSin, t);
    SpectralField n = apply_symbol(n0, Symbol::WaveCos, t, alpha);
    n += apply_symbol(n1, Symbol::WaveSin, t, alpha);
    // derivative of the propagator: d/dt cos(t<xi>) = -<xi>^2 sin(t<xi>)/<xi>
    SpectralField ut = apply_symbol(apply_symbol(u0, Symbol::KleinGordonSin, t), Symbol::Bracket);
    ut = apply_symbol(ut, Symbol::Bracket);
    ut *= -1.0;
    ut += apply_symbol(u1, Symbol::KleinGordonCos, t);

    const double scale = 1.0 + *std::max_element(u0.a.begin(), u0.a.end());
    CHECK(max_abs_diff(out.u, u) < 1e-12 * scale);
    CHECK(max_abs_diff(out.udot, ut) < 1e-12 * scale);
    CHECK(max_abs_diff(out.n, n) < 1e-12 * scale);
}

TEST_CASE("free flow is invertible and conserves the linear energy") {
    const RadialGrid g = RadialGrid::make(30.0, 512);
    std::mt19937_64 rng(5);
    const SystemState s(oracle::random_field(g, rng), oracle::random_field(g, rng),
                        oracle::random_field(g, rng), oracle::random_field(g, rng), 0.5);
    const SpectralState s0(s);
    const SpectralState back = free_flow(free_flow(s0, 4.7), -4.7);
    CHECK(state_distance(back, s0) < 1e-12);
    const double e0 = linear_energy(s);
    const double e1 = linear_energy(free_flow(s, 4.7));
    CHECK(std::abs(e1 - e0) < 1e-11 * e0);
    // group law
    const SpectralState a = free_flow(free_flow(s0, 1.1), 2.2);
    const SpectralState b = free_flow(s0, 3.3);
    CHECK(state_distance(a, b) < 1e-12);
}

TEST_CASE("Strang step is time-reversible") {
    const RadialGrid g = RadialGrid::make(30.0, 256);
    const SpectralState s0(gaussian_state(g, 1.0, 2.0, 0.5));
    const SpectralState fwd = run_fixed(s0, 0.01, 50);
    const SpectralState back = run_fixed(fwd, -0.01, 50);
    CHECK(state_distance(back, s0) < 1e-11);
    CHECK(back.t == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("second-order convergence") {
    const RadialGrid g = RadialGrid::make(30.0, 256);
    const SpectralState s0(gaussian_state(g, 1.0, 2.0, 0.5));
    const double T = 1.0, dt = 0.02;
    const SpectralState ref = run_fixed(s0, dt / 16, 16 * 50);
    const double e1 = state_distance(run_fixed(s0, dt, 50), ref);
    const double e2 = state_distance(run_fixed(s0, dt / 2, 100), ref);
    const double slope = std::log2(e1 / e2);
    CHECK(ref.t == doctest::Approx(T));
    CHECK(slope > 1.8);
    CHECK(slope < 2.2);
}

TEST_CASE("standing wave is stationary") {
    const RadialGrid g = RadialGrid::make(30.0, 1024);
    const GroundState gs = find_ground_state(g);
    EvolveConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 1.0;
    cfg.observe_every = 100;
    const SystemState s = standing_wave_state(1, gs, 0.5);
    const double h0 = SpectralState(s).h1_norm_u();
    double worst = 0;
    const EvolveResult r = evolve(s, cfg, [&](const Snapshot& snap) {
        worst = std::max(worst, std::abs(snap.spectral.h1_norm_u() - h0) / h0);
    });
    CHECK(r.termination == Termination::Horizon);
    CHECK(worst < 1e-3);
}

TEST_CASE("energy of a small Gaussian is conserved") {
    const RadialGrid g = RadialGrid::make(30.0, 512);
    const SystemState s = gaussian_state(g, 0.5, 2.0, 0.5);
    EvolveConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_max = 4.0;
    cfg.observe_every = 500;
    const double e0 = energy_E(s);
    double worst = 0;
    evolve(s, cfg, [&](const Snapshot& snap) {
        worst = std::max(worst, std::abs(energy_E(snap.state) - e0) / std::abs(e0));
    });
    CHECK(worst < 1e-6);
}

TEST_CASE("evolve config validation") {
    const RadialGrid g = RadialGrid::make(30.0, 256);
    EvolveConfig cfg;
    cfg.t_max = 1.0;
    CHECK_NOTHROW(cfg.validate(g, 0.5));
    CHECK_THROWS_AS(cfg.validate(g, 1.0), std::invalid_argument);
    EvolveConfig bad = cfg;
    bad.dt = 0;
    CHECK_THROWS_AS(bad.validate(g, 0.5), std::invalid_argument);
    bad = cfg;
    bad.observe_every = 0;
    CHECK_THROWS_AS(bad.validate(g, 0.5), std::invalid_argument);
    bad = cfg;
    bad.t_max = 25.0;  // beyond 0.8 R
    CHECK_THROWS_AS(bad.validate(g, 0.5), std::invalid_argument);
    bad.sponge_width = 5.0;
    CHECK_NOTHROW(bad.validate(g, 0.5));
    bad = cfg;
    bad.t_max = 20.0;  // guard shrinks for alpha > 1
    CHECK_THROWS_AS(bad.validate(g, 2.0), std::invalid_argument);
    CHECK_FALSE(config_warnings(g, 2.0, 1e-3).empty());
    CHECK(config_warnings(g, 0.5, 1e-3).empty());
}

TEST_CASE("large data trips the threshold") {
    const RadialGrid g = RadialGrid::make(30.0, 512);
    const GroundState gs = find_ground_state(g);
    const SystemState base = standing_wave_state(1, gs, 0.5);
    const double lam = 2.0;
    const SystemState s(lam * base.u, RadialField(g), lam * lam * base.n, RadialField(g), 0.5);
    EvolveConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_max = 5.0;
    const EvolveResult r = evolve(s, cfg);
    CHECK(r.blowup());
    CHECK(r.t_end < 5.0);
    CHECK(r.final_state.all_finite());
    CHECK(r.peak_h1 > r.h1_reference);
}

}  // TEST_SUITE
