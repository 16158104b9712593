#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "kgz/grid.hpp"

namespace kgz {

/// A radial function f on [0, R] stored in reduced form w_j = r_j * f(r_j).
///
/// In 3D radial symmetry the Laplacian acts as (1/r)(r f)'', so on the
/// reduced array it is the 1D Dirichlet second derivative, which the sine
/// transform diagonalizes.
struct RadialField {
    RadialGrid grid;
    std::vector<double> w;

    explicit RadialField(const RadialGrid& g) : grid(g), w(g.size(), 0.0) {}
    RadialField(const RadialGrid& g, std::vector<double> reduced);

    /// Samples a physical profile f(r) on the interior nodes.
    static RadialField from_physical(const RadialGrid& g, const std::function<double(double)>& f);

    /// f(r_i) = w_i / r_i.
    double value(std::size_t i) const { return w[i] / grid.node(i); }
    std::vector<double> physical() const;
    bool all_finite() const;

    RadialField& operator+=(const RadialField& o);
    RadialField& operator-=(const RadialField& o);
    RadialField& operator*=(double s);
};

RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);
RadialField operator*(double s, RadialField a);

/// Pointwise product of the physical values, returned in reduced form.
RadialField pointwise_product(const RadialField& a, const RadialField& b);

/// Sine-series coefficients: w(r) = sum_k a_k sin(xi_k r).
///
/// Normalization: sum_j w_j^2 dr = (R/2) sum_k a_k^2.
struct SpectralField {
    RadialGrid grid;
    std::vector<double> a;

    explicit SpectralField(const RadialGrid& g) : grid(g), a(g.size(), 0.0) {}
    SpectralField(const RadialGrid& g, std::vector<double> coeffs);

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator*=(double s);
};

/// DST-I / DCT-I plans for one grid size, with their own aligned scratch.
///
/// Not thread-safe: each worker owns its own instance (see transform_for).
class SineTransform {
public:
    explicit SineTransform(std::size_t intervals);
    ~SineTransform();
    SineTransform(const SineTransform&) = delete;
    SineTransform& operator=(const SineTransform&) = delete;

    std::size_t intervals() const { return n_; }

    void forward(std::span<const double> w, std::span<double> a);
    void inverse(std::span<const double> a, std::span<double> w);

    /// w'(r_j) for j = 0..N from sine coefficients (length N+1). w'(0) is f(0).
    void derivative(std::span<const double> a, double radius, std::span<double> dw);

    SpectralField forward(const RadialField& f);
    RadialField inverse(const SpectralField& s);

private:
    std::size_t n_;
    double* sine_buf_ = nullptr;
    double* cos_buf_ = nullptr;
    void* sine_plan_ = nullptr;
    void* cos_plan_ = nullptr;
};

/// Per-thread cached transform for a grid size.
SineTransform& transform_for(const RadialGrid& grid);

SpectralField sine_transform(const RadialField& f);
RadialField inverse_sine_transform(const SpectralField& s);

/// Radial Fourier multipliers, with <xi> = sqrt(1 + xi^2).
enum class Symbol {
    D,              // xi
    DInverse,       // 1/xi
    Bracket,        // <xi>
    BracketInverse, // 1/<xi>
    NegLaplacian,   // xi^2
    WaveCos,        // cos(t alpha xi)
    WaveSin,        // sin(t alpha xi) / (alpha xi)
    KleinGordonCos, // cos(t <xi>)
    KleinGordonSin, // sin(t <xi>) / <xi>
};

Symbol parse_symbol(std::string_view name);
double symbol_value(Symbol s, double xi, double t = 0.0, double alpha = 1.0);

SpectralField apply_symbol(SpectralField f, Symbol s, double t = 0.0, double alpha = 1.0);
void apply_symbol_inplace(std::span<double> a, const RadialGrid& grid, Symbol s,
                          double t = 0.0, double alpha = 1.0);

/// Physical-space convenience: transform, multiply, transform back.
RadialField apply_symbol(const RadialField& f, Symbol s, double t = 0.0, double alpha = 1.0);

/// x . grad f = r f'(r), via term-wise differentiated sine series.
RadialField radial_dilation(const RadialField& f);

/// Smooth cutoff: 1 on [0,1], 0 on [2,inf), 1 - s^2(3 - 2s) with s = xi - 1 between.
double lp_cutoff(double xi);

enum class LpMode { Single, AtMost };

/// Littlewood-Paley projection. AtMost: multiplier psi(xi / 2^k).
/// Single: psi(xi / 2^k) - psi(xi / 2^(k-1)).
double lp_multiplier(LpMode mode, int k, double xi);
SpectralField lp_project(SpectralField f, LpMode mode, int k);
RadialField lp_project(const RadialField& f, LpMode mode, int k);

}  // namespace kgz
