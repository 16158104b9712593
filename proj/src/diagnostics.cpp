#include "kgz/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kgz/functionals.hpp"

namespace kgz {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// n - u^2
RadialField coupling_defect(const SystemState& s) {
    return s.n - pointwise_product(s.u, s.u);
}

RadialField weighted(const RadialField& f, double cutoff_radius) {
    RadialField out = f;
    for (std::size_t i = 0; i < out.w.size(); ++i) {
        out.w[i] *= lp_cutoff(out.grid.node(i) / cutoff_radius);
    }
    return out;
}

// (x.grad + c) f
RadialField dilation_plus(const RadialField& f, double c) {
    RadialField out = radial_dilation(f);
    out += c * f;
    return out;
}

double coeff_sum(const SpectralField& f, double (*weight)(double)) {
    double acc = 0.0;
    for (std::size_t k = 0; k < f.a.size(); ++k) {
        acc += weight(f.grid.frequency(k)) * f.a[k] * f.a[k];
    }
    return 4.0 * std::numbers::pi * 0.5 * f.grid.radius() * acc;
}

}  // namespace

// ---------------------------------------------------------------------------

VirialValue virial(const SystemState& s) {
    const double a2 = s.alpha * s.alpha;
    VirialValue v;
    v.I = -2.0 * inner_l2(s.udot, dilation_plus(s.u, 1.5)) -
          inner_hdot_minus1(s.ndot, dilation_plus(s.n, 2.0)) / a2;

    const RadialField defect = coupling_defect(s);
    const RadialField u2 = pointwise_product(s.u, s.u);
    const double nd = norm(s.ndot, Norm::HdotMinus1);
    const double dd = norm(defect, Norm::L2);
    v.rate = 2.0 * functional_K(2, s.u) + nd * nd / (2.0 * a2) + 0.5 * dd * dd -
             inner_l2(defect, u2);
    return v;
}

AuxI1 auxiliary_I1(const SystemState& s) {
    const double l2 = norm(s.u, Norm::L2);
    const double ud = norm(s.udot, Norm::L2);
    AuxI1 out;
    out.I1 = l2 * l2;
    out.rhs = 2.0 * ud * ud - 2.0 * functional_K(0, s.u) +
              2.0 * inner_l2(coupling_defect(s), pointwise_product(s.u, s.u));
    return out;
}

double default_eps_target(const RadialField& n0) {
    return 1e-3 * (1.0 + norm(n0, Norm::L2));
}

LowFreqRef prepare_lowfreq_reference(const RadialField& n0, double eps_target, int max_K) {
    const double cap = 1e-2 * (1.0 + norm(n0, Norm::L2));
    if (!(eps_target > 0.0) || eps_target > cap) {
        std::ostringstream os;
        os << "eps_target must lie in (0, " << cap << "], got " << eps_target;
        throw std::invalid_argument(os.str());
    }
    if (max_K < 0) throw std::invalid_argument("max_K must be non-negative");
    const SpectralField coeffs = sine_transform(n0);
    for (int K = 0; K <= max_K; ++K) {
        RadialField low = inverse_sine_transform(lp_project(coeffs, LpMode::AtMost, -K));
        const double e = norm(low, Norm::L2);
        if (e <= eps_target) return LowFreqRef{K, std::move(low), e};
    }
    std::ostringstream os;
    os << "low-frequency reference: no K <= " << max_K << " reaches eps_target " << eps_target;
    throw std::runtime_error(os.str());
}

AuxI2 auxiliary_I2(const SystemState& s, const LowFreqRef& ref) {
    require_same_grid(s.grid(), ref.n0K.grid);
    const double a2 = s.alpha * s.alpha;
    const RadialField dn = s.n - ref.n0K;
    const double l2 = norm(s.u, Norm::L2);
    const double h = norm(dn, Norm::HdotMinus1);
    AuxI2 out;
    out.I2 = l2 * l2 + h * h / (2.0 * a2);
    out.deriv = 2.0 * inner_l2(s.u, s.udot) + inner_hdot_minus1(dn, s.ndot) / a2;
    return out;
}

double local_virial(const SystemState& s, double cutoff_radius) {
    if (!(cutoff_radius > 0.0) || cutoff_radius > 0.5 * s.grid().radius()) {
        throw std::invalid_argument("local virial radius must lie in (0, R/2]");
    }
    const double a2 = s.alpha * s.alpha;
    const RadialField dinv_ndot = apply_symbol(s.ndot, Symbol::DInverse);
    const RadialField dinv_dn = apply_symbol(dilation_plus(s.n, 2.0), Symbol::DInverse);
    return -2.0 * inner_l2(weighted(s.udot, cutoff_radius), dilation_plus(s.u, 1.5)) -
           inner_l2(weighted(dinv_ndot, cutoff_radius), dinv_dn) / a2;
}

// ---------------------------------------------------------------------------

double VariationalReport::worst_margin() const {
    double m = std::numeric_limits<double>::infinity();
    bool any = false;
    for (double x : {margin_nonneg_i0, margin_nonneg_i2, margin_nonpos_i0, margin_nonpos_i2}) {
        if (std::isnan(x)) continue;
        m = std::min(m, x);
        any = true;
    }
    return any ? m : 0.0;
}

VariationalReport variational_inequality_check(const RadialField& phi, double nu, double JQ) {
    if (!(nu >= 0.0)) throw std::invalid_argument("nu must be non-negative");
    const FunctionalReport f = evaluate_functionals(phi);
    VariationalReport r;
    r.J = f.J;
    r.K0 = f.K0;
    r.K2 = f.K2;
    r.l4_squared = f.L4 * f.L4;
    r.nu = nu;
    r.applicable = f.J + 0.25 * nu * nu <= JQ;
    if (!r.applicable) return r;

    const double pos = 4.0 * f.K2 + nu * nu - std::sqrt(6.0) * nu * r.l4_squared;
    const double neg = -nu * r.l4_squared - f.K0;
    if (f.K0 >= 0.0) r.margin_nonneg_i0 = pos;
    if (f.K2 >= 0.0) r.margin_nonneg_i2 = pos;
    if (f.K0 <= 0.0) r.margin_nonpos_i0 = neg;
    if (f.K2 <= 0.0) r.margin_nonpos_i2 = neg;
    return r;
}

// ---------------------------------------------------------------------------

double energy_norm_squared(const SpectralState& s) {
    return coeff_sum(s.u, [](double xi) { return 1.0 + xi * xi; }) +
           coeff_sum(s.udot, [](double) { return 1.0; }) +
           coeff_sum(s.n, [](double) { return 1.0; }) +
           coeff_sum(s.ndot, [](double xi) { return 1.0 / (xi * xi); });
}

namespace {

SpectralState difference(const SpectralState& a, const SpectralState& b) {
    SpectralState d = a;
    for (auto [x, y] : {std::pair{&d.u, &b.u}, {&d.udot, &b.udot}, {&d.n, &b.n},
                        {&d.ndot, &b.ndot}}) {
        for (std::size_t k = 0; k < x->a.size(); ++k) x->a[k] -= y->a[k];
    }
    return d;
}

}  // namespace

double ScatteringTracker::sample(const SpectralState& s) {
    SpectralState pulled = free_flow(s, -s.t);
    double r = kNaN;
    if (!last_.empty()) r = std::sqrt(energy_norm_squared(difference(pulled, last_.front())));
    last_.clear();
    last_.push_back(std::move(pulled));
    return r;
}

std::vector<double> scattering_residual(std::span<const SystemState> trajectory) {
    std::vector<double> out;
    ScatteringTracker tracker;
    for (const SystemState& s : trajectory) {
        const double r = tracker.sample(SpectralState(s));
        if (!std::isnan(r)) out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------

FirstOrderForm to_first_order(const SystemState& s) {
    return FirstOrderForm{
        s.u,
        -1.0 * apply_symbol(s.udot, Symbol::BracketInverse),
        s.n,
        (-1.0 / s.alpha) * apply_symbol(s.ndot, Symbol::DInverse),
    };
}

SystemState from_first_order(const FirstOrderForm& f, double alpha, double t) {
    validate_alpha(alpha);
    return SystemState(f.U_re, -1.0 * apply_symbol(f.U_im, Symbol::Bracket), f.N_re,
                       -alpha * apply_symbol(f.N_im, Symbol::D), alpha, t);
}

// ---------------------------------------------------------------------------

DiagnosticsRecord compute_record(const SystemState& s, const RecordContext& ctx) {
    DiagnosticsRecord r;
    r.t = s.t;
    r.E = energy_E(s);
    const FunctionalReport f = evaluate_functionals(s.u);
    r.J_of_u = f.J;
    r.K0 = f.K0;
    r.K2 = f.K2;
    r.L4_of_u = f.L4;
    r.H1_of_u = std::sqrt(f.L2 * f.L2 + f.H1grad * f.H1grad);
    const VirialValue v = virial(s);
    r.I_virial = v.I;
    r.I_rate_analytic = v.rate;
    const AuxI1 a1 = auxiliary_I1(s);
    r.I1 = a1.I1;
    r.I1_rhs = a1.rhs;
    if (ctx.lowfreq) {
        const AuxI2 a2 = auxiliary_I2(s, *ctx.lowfreq);
        r.I2 = a2.I2;
        r.I2_deriv = a2.deriv;
    } else {
        r.I2 = kNaN;
        r.I2_deriv = kNaN;
    }
    r.energy_norm2 = energy_norm_squared(s);
    for (double R : ctx.local_radii) r.local_virial.push_back(local_virial(s, R));
    return r;
}

std::string csv_header(const std::vector<double>& local_radii) {
    std::string h =
        "t,E,J_of_u,K0,K2,I_virial,I_rate_analytic,I1,I1_rhs,I2,I2_deriv,L4_of_u,H1_of_u,"
        "energy_norm2,scattering_residual";
    char buf[64];
    for (double R : local_radii) {
        std::snprintf(buf, sizeof buf, ",I_R=%g", R);
        h += buf;
    }
    return h;
}

std::string csv_row(const DiagnosticsRecord& r) {
    std::string out;
    char buf[40];
    auto put = [&](double x) {
        if (!out.empty()) out += ',';
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
    };
    for (double x : {r.t, r.E, r.J_of_u, r.K0, r.K2, r.I_virial, r.I_rate_analytic, r.I1, r.I1_rhs,
                     r.I2, r.I2_deriv, r.L4_of_u, r.H1_of_u, r.energy_norm2,
                     r.scattering_residual}) {
        put(x);
    }
    for (double x : r.local_virial) put(x);
    return out;
}

// ---------------------------------------------------------------------------

RunRecord monitored_evolve(const SpectralState& start, const EvolveConfig& cfg,
                           const MonitorOptions& opts) {
    cfg.validate(start.grid(), start.alpha);
    for (double R : opts.local_radii) {
        if (!(R > 0.0) || R > 0.5 * start.grid().radius()) {
            throw std::invalid_argument("local virial radius must lie in (0, R/2]");
        }
    }
    const SystemState s0 = start.to_physical();
    const double eps = std::isnan(opts.eps_target) ? default_eps_target(s0.n) : opts.eps_target;
    const LowFreqRef ref = prepare_lowfreq_reference(s0.n, eps);

    RunRecord rec;
    rec.local_radii = opts.local_radii;
    rec.lowfreq_K = ref.K;
    rec.lowfreq_eps0 = ref.eps0;
    rec.initial_energy_norm = std::sqrt(energy_norm_squared(start));
    rec.E0 = energy_E(s0);
    rec.K0_initial = functional_K(0, s0.u);
    rec.K2_initial = functional_K(2, s0.u);

    const RecordContext ctx{&ref, opts.local_radii};
    ScatteringTracker tracker;
    std::size_t count = 0;
    auto observer = [&](const Snapshot& snap) {
        DiagnosticsRecord r = compute_record(snap.state, ctx);
        if (opts.scattering_every > 0 && count % opts.scattering_every == 0) {
            r.scattering_residual = tracker.sample(snap.spectral);
        }
        ++count;
        rec.records.push_back(std::move(r));
        if (opts.after_record) opts.after_record(snap);
    };

    const EvolveResult res = evolve(start, cfg, observer);
    rec.termination = res.termination;
    rec.t_end = res.t_end;
    rec.peak_h1 = res.peak_h1;
    rec.h1_reference = res.h1_reference;
    rec.final_state = res.final_state;
    if (res.blowup() && opts.confirm_blowup) {
        EvolveConfig c = cfg;
        c.h1_reference = res.h1_reference;
        rec.blowup_confirmed = confirm_blowup(start, c, res.t_end);
    }
    return rec;
}

RunRecord monitored_evolve(const SystemState& s0, const EvolveConfig& cfg,
                           const MonitorOptions& opts) {
    return monitored_evolve(SpectralState(s0), cfg, opts);
}

// ---------------------------------------------------------------------------

const char* to_string(Prediction p) {
    switch (p) {
        case Prediction::Scattering: return "scattering";
        case Prediction::Blowup: return "blowup";
        case Prediction::OutOfScope: return "out_of_scope";
    }
    return "?";
}

const char* to_string(Observation o) {
    switch (o) {
        case Observation::Scattering: return "scattering";
        case Observation::Blowup: return "blowup";
        case Observation::Undetermined: return "undetermined";
    }
    return "?";
}

bool scattering_proxy(const RunRecord& rec, double* final_residual, bool* tail_decreasing) {
    std::vector<double> samples;
    for (const auto& r : rec.records) {
        if (!std::isnan(r.scattering_residual)) samples.push_back(r.scattering_residual);
    }
    bool decreasing = samples.size() >= 5;
    for (std::size_t j = samples.size() >= 5 ? samples.size() - 4 : samples.size();
         j < samples.size(); ++j) {
        decreasing = decreasing && samples[j] < samples[j - 1];
    }
    const double last = samples.empty() ? kNaN : samples.back();
    if (final_residual) *final_residual = last;
    if (tail_decreasing) *tail_decreasing = decreasing;
    return decreasing && last < 1e-2 * rec.initial_energy_norm;
}

std::vector<double> second_differences(std::span<const double> f, double h) {
    std::vector<double> out;
    for (std::size_t j = 1; j + 1 < f.size(); ++j) {
        out.push_back((f[j + 1] - 2.0 * f[j] + f[j - 1]) / (h * h));
    }
    return out;
}

std::vector<double> centered_differences(std::span<const double> f, double h) {
    std::vector<double> out;
    for (std::size_t j = 1; j + 1 < f.size(); ++j) out.push_back((f[j + 1] - f[j - 1]) / (2.0 * h));
    return out;
}

namespace {

double record_spacing(const RunRecord& rec) {
    if (rec.records.size() < 2) return kNaN;
    return rec.records[1].t - rec.records[0].t;
}

}  // namespace

std::size_t resolved_prefix(const RunRecord& rec, double drift_tol) {
    if (rec.records.empty()) return 0;
    const double E0 = rec.records.front().E;
    std::size_t m = 0;
    while (m < rec.records.size() &&
           std::abs(rec.records[m].E - E0) <= drift_tol * std::abs(E0)) {
        ++m;
    }
    return m;
}

double measured_kappa(const RunRecord& rec) {
    const std::size_t m = resolved_prefix(rec);
    if (m < 3) return kNaN;
    std::vector<double> I1;
    for (std::size_t j = 0; j < m; ++j) I1.push_back(rec.records[j].I1);
    const auto d2 = second_differences(I1, record_spacing(rec));
    return *std::min_element(d2.begin(), d2.end());
}

double i2_concavity_tail(const RunRecord& rec) {
    const std::size_t m = rec.records.size();
    if (m < 3) return kNaN;
    const std::size_t first = std::min(3 * m / 4, m - 3);
    std::vector<double> g;
    for (std::size_t j = first; j < m; ++j) g.push_back(std::pow(rec.records[j].I2, -0.25));
    const auto d2 = second_differences(g, record_spacing(rec));
    return *std::max_element(d2.begin(), d2.end());
}

Verdict classify_run(const RunRecord& rec, double JQ) {
    Verdict v;
    v.energy_ratio = rec.E0 / JQ;
    if (rec.E0 >= JQ) {
        v.predicted = Prediction::OutOfScope;
    } else {
        v.predicted = rec.K0_initial >= 0.0 ? Prediction::Scattering : Prediction::Blowup;
    }

    const bool scatters = scattering_proxy(rec, &v.final_residual, &v.residual_tail_decreasing);
    v.blowup_confirmed = rec.blowup_confirmed;
    if (rec.termination != Termination::Horizon && rec.blowup_confirmed) {
        v.observed = Observation::Blowup;
    } else if (rec.termination == Termination::Horizon && scatters) {
        v.observed = Observation::Scattering;
    } else {
        v.observed = Observation::Undetermined;
    }
    v.kappa_hat = measured_kappa(rec);
    v.i2_concavity_max = i2_concavity_tail(rec);

    if (v.predicted == Prediction::OutOfScope || v.observed == Observation::Undetermined) {
        v.consistent = true;
    } else {
        v.consistent = (v.predicted == Prediction::Scattering) ==
                       (v.observed == Observation::Scattering);
    }
    return v;
}

SignReport sign_persistence(const RunRecord& rec, double tol) {
    SignReport out;
    int s0 = 0, s2 = 0;
    auto sgn = [tol](double x) { return x > tol ? 1 : (x < -tol ? -1 : 0); };
    for (const auto& r : rec.records) {
        const int a = sgn(r.K0), b = sgn(r.K2);
        if (a != 0) {
            if (s0 != 0 && a != s0) ++out.flips_K0;
            s0 = a;
        }
        if (b != 0) {
            if (s2 != 0 && b != s2) ++out.flips_K2;
            s2 = b;
        }
        if (a != 0 && b != 0 && a != b) ++out.mismatches;
    }
    return out;
}

}  // namespace kgz
