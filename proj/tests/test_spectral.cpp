#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>

#include "kgz/spectral.hpp"
#include "oracles.hpp"

using namespace kgz;

namespace {

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("grid construction and indexing") {
    CHECK_THROWS_AS(RadialGrid::make(0.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid::make(30.0, 100), std::invalid_argument);
    CHECK_THROWS_AS(RadialGrid::make(30.0, 4), std::invalid_argument);
    const RadialGrid g = RadialGrid::make(30.0, 64);
    CHECK(g.size() == 63);
    CHECK(g.node(0) == doctest::Approx(30.0 / 64));
    CHECK(g.frequency(1) == doctest::Approx(2 * std::numbers::pi / 30.0));
    CHECK_THROWS(require_same_grid(g, RadialGrid::make(30.0, 128)));
}

TEST_CASE("roundtrip and Parseval on random fields") {
    std::mt19937_64 rng(7);
    const RadialGrid g = RadialGrid::make(30.0, 1024);
    for (int trial = 0; trial < 10; ++trial) {
        const RadialField f = oracle::random_field(g, rng);
        const SpectralField c = sine_transform(f);
        CHECK(rel_diff(inverse_sine_transform(c).w, f.w) < 1e-13);
        double sw = 0, sa = 0;
        for (double x : f.w) sw += x * x * g.dr();
        for (double x : c.a) sa += x * x * 0.5 * g.radius();
        CHECK(std::abs(sw - sa) / sa < 1e-12);
    }
}

TEST_CASE("single mode is an eigenfunction of every symbol") {
    const RadialGrid g = RadialGrid::make(30.0, 128);
    SpectralField c(g);
    c.a[1] = 1.0;
    const double xi = g.frequency(1);
    CHECK(apply_symbol(c, Symbol::NegLaplacian).a[1] == doctest::Approx(xi * xi));
    CHECK(apply_symbol(c, Symbol::Bracket).a[1] == doctest::Approx(std::sqrt(1 + xi * xi)));
    CHECK(apply_symbol(c, Symbol::WaveCos, 2.0, 0.5).a[1] == doctest::Approx(std::cos(xi)));
    CHECK(apply_symbol(c, Symbol::KleinGordonSin, 2.0).a[1] ==
          doctest::Approx(std::sin(2 * std::sqrt(1 + xi * xi)) / std::sqrt(1 + xi * xi)));
    CHECK(apply_symbol(c, Symbol::NegLaplacian).a[0] == 0.0);
}

TEST_CASE("inverse pairs and commutation") {
    std::mt19937_64 rng(11);
    const RadialGrid g = RadialGrid::make(30.0, 512);
    const RadialField f = oracle::random_field(g, rng);
    CHECK(rel_diff(apply_symbol(apply_symbol(f, Symbol::D), Symbol::DInverse).w, f.w) < 1e-13);
    CHECK(rel_diff(apply_symbol(apply_symbol(f, Symbol::Bracket), Symbol::BracketInverse).w, f.w) <
          1e-13);
    const SpectralField c = sine_transform(f);
    const auto ab = apply_symbol(apply_symbol(c, Symbol::NegLaplacian), Symbol::KleinGordonCos, 1.3);
    const auto ba = apply_symbol(apply_symbol(c, Symbol::KleinGordonCos, 1.3), Symbol::NegLaplacian);
    CHECK(rel_diff(ab.a, ba.a) < 1e-12);
}

TEST_CASE("symbol names") {
    CHECK(parse_symbol("Dinv") == Symbol::DInverse);
    CHECK(parse_symbol("kg_sin") == Symbol::KleinGordonSin);
    CHECK_THROWS_AS(parse_symbol("laplace"), std::invalid_argument);
}

TEST_CASE("radial dilation of a Gaussian") {
    // x.grad e^{-r^2} = -2 r^2 e^{-r^2}
    const RadialGrid g = RadialGrid::make(30.0, 2048);
    const RadialField f = RadialField::from_physical(g, [](double r) { return std::exp(-r * r); });
    const RadialField d = radial_dilation(f);
    double err = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.node(i);
        err = std::max(err, std::abs(d.value(i) + 2 * r * r * std::exp(-r * r)));
    }
    CHECK(err < 1e-10);
}

TEST_CASE("derivative at the origin recovers f(0)") {
    const RadialGrid g = RadialGrid::make(30.0, 1024);
    const RadialField f =
        RadialField::from_physical(g, [](double r) { return 2.5 * std::exp(-r * r / 3); });
    const SpectralField c = sine_transform(f);
    std::vector<double> dw(g.intervals() + 1);
    transform_for(g).derivative(c.a, g.radius(), dw);
    CHECK(dw[0] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("cutoff profile") {
    CHECK(lp_cutoff(0.0) == 1.0);
    CHECK(lp_cutoff(1.0) == 1.0);
    CHECK(lp_cutoff(1.5) == doctest::Approx(0.5));
    CHECK(lp_cutoff(2.0) == 0.0);
    CHECK(lp_cutoff(7.0) == 0.0);
    for (double x = 0; x < 2.5; x += 0.01) CHECK(lp_cutoff(x + 0.01) <= lp_cutoff(x));
}

TEST_CASE("Littlewood-Paley pieces reassemble the field") {
    std::mt19937_64 rng(3);
    const RadialGrid g = RadialGrid::make(30.0, 512);
    const SpectralField c = sine_transform(oracle::random_field(g, rng));
    SpectralField sum = lp_project(c, LpMode::AtMost, -4);
    for (int k = -3; k <= 10; ++k) sum += lp_project(c, LpMode::Single, k);
    CHECK(rel_diff(sum.a, c.a) < 1e-14);
    // idempotence fails for smooth cutoffs, but the support is exact
    const SpectralField low = lp_project(c, LpMode::AtMost, 0);
    for (std::size_t k = 0; k < c.a.size(); ++k) {
        if (g.frequency(k) >= 2.0) CHECK(low.a[k] == 0.0);
        if (g.frequency(k) <= 1.0) CHECK(low.a[k] == c.a[k]);
    }
}

TEST_CASE("low-frequency projection norm is nonincreasing in K") {
    std::mt19937_64 rng(5);
    const RadialGrid g = RadialGrid::make(30.0, 512);
    const RadialField f = oracle::random_field(g, rng, 0.2, 1.0);
    double prev = INFINITY;
    for (int K = 0; K < 8; ++K) {
        const SpectralField p = lp_project(sine_transform(f), LpMode::AtMost, -K);
        double s = 0;
        for (double x : p.a) s += x * x;
        CHECK(s <= prev);
        prev = s;
    }
}

}  // TEST_SUITE
