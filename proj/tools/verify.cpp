#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>

#include "kgz/diagnostics.hpp"
#include "kgz/evolution.hpp"
#include "kgz/functionals.hpp"
#include "kgz/ground_state.hpp"

namespace kgz::tools {

namespace {

struct Tally {
    int failed = 0;
    void report(const char* name, bool ok, const std::string& detail) {
        std::printf("%s  %-34s %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
        if (!ok) ++failed;
    }
};

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Smooth random radial field: Gaussian-damped random sine coefficients.
RadialField random_field(const RadialGrid& g, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> scale(1.0, 6.0);
    const double s = scale(rng);
    SpectralField c(g);
    for (std::size_t k = 0; k < c.a.size(); ++k) {
        const double xi = g.frequency(k);
        c.a[k] = normal(rng) * std::exp(-0.5 * (xi / s) * (xi / s));
    }
    return inverse_sine_transform(c);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

bool verify(bool quick, const std::optional<std::filesystem::path>& cache_dir) {
    Tally t;
    std::mt19937_64 rng(20240611);
    const RadialGrid g = RadialGrid::make(30.0, 512);

    double parseval = 0, roundtrip = 0, commute = 0, lp = 0, energy = 0, group = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const RadialField f = random_field(g, rng);
        const SpectralField c = sine_transform(f);
        double sw = 0, sa = 0;
        for (double x : f.w) sw += x * x * g.dr();
        for (double x : c.a) sa += x * x * 0.5 * g.radius();
        parseval = std::max(parseval, rel(sw, sa));
        const RadialField back = inverse_sine_transform(c);
        roundtrip = std::max(roundtrip, norm(back - f, Norm::L2) / norm(f, Norm::L2));

        const SpectralField ab = apply_symbol(apply_symbol(c, Symbol::Bracket), Symbol::WaveSin, 0.7, 0.5);
        const SpectralField ba = apply_symbol(apply_symbol(c, Symbol::WaveSin, 0.7, 0.5), Symbol::Bracket);
        double num = 0, den = 0;
        for (std::size_t k = 0; k < ab.a.size(); ++k) {
            num += (ab.a[k] - ba.a[k]) * (ab.a[k] - ba.a[k]);
            den += ab.a[k] * ab.a[k];
        }
        commute = std::max(commute, std::sqrt(num / den));

        SpectralField sum = lp_project(c, LpMode::AtMost, -3);
        for (int k = -2; k <= 12; ++k) sum += lp_project(c, LpMode::Single, k);
        num = den = 0;
        for (std::size_t k = 0; k < c.a.size(); ++k) {
            num += (sum.a[k] - c.a[k]) * (sum.a[k] - c.a[k]);
            den += c.a[k] * c.a[k];
        }
        lp = std::max(lp, std::sqrt(num / den));

        const SystemState s(random_field(g, rng), random_field(g, rng), random_field(g, rng),
                            random_field(g, rng), 0.5);
        const EnergyBreakdown e = energy_breakdown(s);
        energy = std::max(energy, std::abs(e.formula - e.decomposition) / e.scale);
        const SpectralState sp(s);
        const SpectralState there_back = free_flow(free_flow(sp, 3.1), -3.1);
        double d = 0, n0 = 0;
        for (std::size_t k = 0; k < sp.u.a.size(); ++k) {
            d += std::pow(there_back.u.a[k] - sp.u.a[k], 2) + std::pow(there_back.n.a[k] - sp.n.a[k], 2);
            n0 += sp.u.a[k] * sp.u.a[k] + sp.n.a[k] * sp.n.a[k];
        }
        group = std::max(group, std::sqrt(d / n0));
    }
    t.report("Parseval", parseval < 1e-10, fmt("max rel %.2e", parseval));
    t.report("transform roundtrip", roundtrip < 1e-10, fmt("max rel %.2e", roundtrip));
    t.report("multiplier commutation", commute < 1e-10, fmt("max rel %.2e", commute));
    t.report("Littlewood-Paley reconstruction", lp < 1e-10, fmt("max rel %.2e", lp));
    t.report("energy two-route agreement", energy < 1e-10, fmt("max rel %.2e", energy));
    t.report("free flow group law", group < 1e-12, fmt("max rel %.2e", group));

    const RadialGrid gg = RadialGrid::make(30.0, 2048);
    const GroundState gs = load_or_compute_ground_state(gg, 1e-12, cache_dir);
    t.report("ground state certified", gs.certified(),
             fmt("residual %.2e, Pohozaev %.2e", gs.residual_pde,
                 std::max(gs.pohozaev_K0, gs.pohozaev_K2)));
    const SystemState sw = standing_wave_state(1, gs, 0.5);
    const double esw = rel(energy_E(sw), gs.JQ);
    t.report("standing wave E = J(Q)", esw < 1e-6, fmt("rel %.2e", esw));

    int applicable = 0;
    double worst = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> lam(0.0, 1.6), unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const RadialField phi = lam(rng) * l2_invariant_rescale(gs.profile, 0.6 + 0.8 * unit(rng));
        const double J = static_energy_J(phi);
        const double room = gs.JQ - J;
        if (room < 0) continue;
        const double nu = 2.0 * std::sqrt(room) * unit(rng);
        const VariationalReport r = variational_inequality_check(phi, nu, gs.JQ);
        if (!r.applicable) continue;
        ++applicable;
        const double scale = 1.0 + std::abs(r.K0) + std::abs(r.K2) + r.nu * r.l4_squared;
        worst = std::min(worst, r.worst_margin() / scale);
    }
    t.report("variational inequalities", applicable > 0 && worst >= -1e-8,
             fmt("%g samples, worst scaled margin %.2e", applicable, worst));

    if (!quick) {
        const SystemState s0(1.2 * gs.profile, RadialField(gg),
                             1.44 * pointwise_product(gs.profile, gs.profile), RadialField(gg), 0.5);
        EvolveConfig cfg;
        cfg.dt = 1e-3;
        cfg.t_max = 5.0;
        cfg.observe_every = 10;
        MonitorOptions mo;
        const Verdict v = classify_run(monitored_evolve(s0, cfg, mo), gs.JQ);
        t.report("lambda = 1.2 blows up", v.observed == Observation::Blowup && v.consistent,
                 std::string("observed ") + to_string(v.observed));

        const SystemState s1(0.8 * gs.profile, RadialField(gg),
                             0.64 * pointwise_product(gs.profile, gs.profile), RadialField(gg), 0.5);
        cfg.t_max = 24.0;
        cfg.observe_every = 100;
        mo.scattering_every = 30;
        const Verdict w = classify_run(monitored_evolve(s1, cfg, mo), gs.JQ);
        t.report("lambda = 0.8 scatters", w.observed == Observation::Scattering && w.consistent,
                 std::string("observed ") + to_string(w.observed));
    }
    std::printf("%d failure(s)\n", t.failed);
    return t.failed == 0;
}

}  // namespace kgz::tools
