#include "kgz/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kgz {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void require_size(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) +
                                    " values, got " + std::to_string(got));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// RadialField / SpectralField

RadialField::RadialField(const RadialGrid& g, std::vector<double> reduced)
    : grid(g), w(std::move(reduced)) {
    require_size(w.size(), grid.size(), "RadialField");
}

RadialField RadialField::from_physical(const RadialGrid& g,
                                       const std::function<double(double)>& f) {
    RadialField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.node(i);
        out.w[i] = r * f(r);
    }
    return out;
}

std::vector<double> RadialField::physical() const {
    std::vector<double> f(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) f[i] = value(i);
    return f;
}

bool RadialField::all_finite() const {
    return std::all_of(w.begin(), w.end(), [](double x) { return std::isfinite(x); });
}

RadialField& RadialField::operator+=(const RadialField& o) {
    require_same_grid(grid, o.grid);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += o.w[i];
    return *this;
}

RadialField& RadialField::operator-=(const RadialField& o) {
    require_same_grid(grid, o.grid);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= o.w[i];
    return *this;
}

RadialField& RadialField::operator*=(double s) {
    for (double& x : w) x *= s;
    return *this;
}

RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }
RadialField operator*(double s, RadialField a) { return a *= s; }

RadialField pointwise_product(const RadialField& a, const RadialField& b) {
    require_same_grid(a.grid, b.grid);
    RadialField out(a.grid);
    for (std::size_t i = 0; i < out.w.size(); ++i) {
        out.w[i] = a.w[i] * b.w[i] / a.grid.node(i);
    }
    return out;
}

SpectralField::SpectralField(const RadialGrid& g, std::vector<double> coeffs)
    : grid(g), a(std::move(coeffs)) {
    require_size(a.size(), grid.size(), "SpectralField");
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_grid(grid, o.grid);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (double& x : a) x *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// SineTransform
//
// FFTW RODFT00 of length N-1 computes Y_k = 2 sum_j X_j sin(pi (j+1)(k+1) / N),
// so a = Y / N and w = Y(a) / 2. REDFT00 of length N+1 gives the cosine series
// used for w'.

SineTransform::SineTransform(std::size_t intervals) : n_(intervals) {
    if (n_ < 8) throw std::invalid_argument("SineTransform needs N >= 8");
    sine_buf_ = fftw_alloc_real(n_ - 1);
    cos_buf_ = fftw_alloc_real(n_ + 1);
    std::lock_guard lock(planner_mutex());
    sine_plan_ = fftw_plan_r2r_1d(static_cast<int>(n_ - 1), sine_buf_, sine_buf_, FFTW_RODFT00,
                                  FFTW_ESTIMATE);
    cos_plan_ = fftw_plan_r2r_1d(static_cast<int>(n_ + 1), cos_buf_, cos_buf_, FFTW_REDFT00,
                                 FFTW_ESTIMATE);
    if (!sine_plan_ || !cos_plan_) throw std::runtime_error("FFTW planning failed");
}

SineTransform::~SineTransform() {
    std::lock_guard lock(planner_mutex());
    if (sine_plan_) fftw_destroy_plan(static_cast<fftw_plan>(sine_plan_));
    if (cos_plan_) fftw_destroy_plan(static_cast<fftw_plan>(cos_plan_));
    fftw_free(sine_buf_);
    fftw_free(cos_buf_);
}

void SineTransform::forward(std::span<const double> w, std::span<double> a) {
    require_size(w.size(), n_ - 1, "forward");
    require_size(a.size(), n_ - 1, "forward");
    std::copy(w.begin(), w.end(), sine_buf_);
    fftw_execute(static_cast<fftw_plan>(sine_plan_));
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_ - 1; ++i) a[i] = sine_buf_[i] * scale;
}

void SineTransform::inverse(std::span<const double> a, std::span<double> w) {
    require_size(a.size(), n_ - 1, "inverse");
    require_size(w.size(), n_ - 1, "inverse");
    std::copy(a.begin(), a.end(), sine_buf_);
    fftw_execute(static_cast<fftw_plan>(sine_plan_));
    for (std::size_t i = 0; i < n_ - 1; ++i) w[i] = 0.5 * sine_buf_[i];
}

void SineTransform::derivative(std::span<const double> a, double radius, std::span<double> dw) {
    require_size(a.size(), n_ - 1, "derivative");
    require_size(dw.size(), n_ + 1, "derivative");
    const double k0 = std::numbers::pi / radius;
    cos_buf_[0] = 0.0;
    cos_buf_[n_] = 0.0;
    for (std::size_t i = 0; i < n_ - 1; ++i) {
        cos_buf_[i + 1] = a[i] * k0 * static_cast<double>(i + 1);
    }
    fftw_execute(static_cast<fftw_plan>(cos_plan_));
    for (std::size_t j = 0; j <= n_; ++j) dw[j] = 0.5 * cos_buf_[j];
}

SpectralField SineTransform::forward(const RadialField& f) {
    SpectralField s(f.grid);
    forward(f.w, s.a);
    return s;
}

RadialField SineTransform::inverse(const SpectralField& s) {
    RadialField f(s.grid);
    inverse(s.a, f.w);
    return f;
}

SineTransform& transform_for(const RadialGrid& grid) {
    thread_local std::map<std::size_t, std::unique_ptr<SineTransform>> cache;
    auto& slot = cache[grid.intervals()];
    if (!slot) slot = std::make_unique<SineTransform>(grid.intervals());
    return *slot;
}

SpectralField sine_transform(const RadialField& f) { return transform_for(f.grid).forward(f); }

RadialField inverse_sine_transform(const SpectralField& s) {
    return transform_for(s.grid).inverse(s);
}

// ---------------------------------------------------------------------------
// Multipliers

Symbol parse_symbol(std::string_view name) {
    static const std::map<std::string_view, Symbol> table = {
        {"D", Symbol::D},
        {"Dinv", Symbol::DInverse},
        {"bracket", Symbol::Bracket},
        {"bracket_inv", Symbol::BracketInverse},
        {"neg_laplacian", Symbol::NegLaplacian},
        {"wave_cos", Symbol::WaveCos},
        {"wave_sin", Symbol::WaveSin},
        {"kg_cos", Symbol::KleinGordonCos},
        {"kg_sin", Symbol::KleinGordonSin},
    };
    auto it = table.find(name);
    if (it == table.end()) throw std::invalid_argument("unknown symbol '" + std::string(name) + "'");
    return it->second;
}

double symbol_value(Symbol s, double xi, double t, double alpha) {
    const double br = std::sqrt(1.0 + xi * xi);
    switch (s) {
        case Symbol::D: return xi;
        case Symbol::DInverse: return 1.0 / xi;
        case Symbol::Bracket: return br;
        case Symbol::BracketInverse: return 1.0 / br;
        case Symbol::NegLaplacian: return xi * xi;
        case Symbol::WaveCos: return std::cos(t * alpha * xi);
        case Symbol::WaveSin: return std::sin(t * alpha * xi) / (alpha * xi);
        case Symbol::KleinGordonCos: return std::cos(t * br);
        case Symbol::KleinGordonSin: return std::sin(t * br) / br;
    }
    throw std::invalid_argument("unknown symbol id " + std::to_string(static_cast<int>(s)));
}

void apply_symbol_inplace(std::span<double> a, const RadialGrid& grid, Symbol s, double t,
                          double alpha) {
    require_size(a.size(), grid.size(), "apply_symbol");
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] *= symbol_value(s, grid.frequency(i), t, alpha);
    }
}

SpectralField apply_symbol(SpectralField f, Symbol s, double t, double alpha) {
    apply_symbol_inplace(f.a, f.grid, s, t, alpha);
    return f;
}

RadialField apply_symbol(const RadialField& f, Symbol s, double t, double alpha) {
    auto& tr = transform_for(f.grid);
    return tr.inverse(apply_symbol(tr.forward(f), s, t, alpha));
}

RadialField radial_dilation(const RadialField& f) {
    auto& tr = transform_for(f.grid);
    const SpectralField s = tr.forward(f);
    std::vector<double> dw(f.grid.intervals() + 1);
    tr.derivative(s.a, f.grid.radius(), dw);
    RadialField out(f.grid);
    // reduced form of r f' is r w' - w
    for (std::size_t i = 0; i < out.w.size(); ++i) {
        out.w[i] = f.grid.node(i) * dw[i + 1] - f.w[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Littlewood-Paley

double lp_cutoff(double xi) {
    xi = std::abs(xi);
    if (xi <= 1.0) return 1.0;
    if (xi >= 2.0) return 0.0;
    const double s = xi - 1.0;
    return 1.0 - s * s * (3.0 - 2.0 * s);
}

double lp_multiplier(LpMode mode, int k, double xi) {
    const double at_most = lp_cutoff(std::ldexp(xi, -k));
    if (mode == LpMode::AtMost) return at_most;
    return at_most - lp_cutoff(std::ldexp(xi, -(k - 1)));
}

SpectralField lp_project(SpectralField f, LpMode mode, int k) {
    for (std::size_t i = 0; i < f.a.size(); ++i) {
        f.a[i] *= lp_multiplier(mode, k, f.grid.frequency(i));
    }
    return f;
}

RadialField lp_project(const RadialField& f, LpMode mode, int k) {
    auto& tr = transform_for(f.grid);
    return tr.inverse(lp_project(tr.forward(f), mode, k));
}

}  // namespace kgz
