#include "oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// Thomas algorithm; a sub-, b main, c super-diagonal. Overwrites d with the solution.
void tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                 std::vector<double>& d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double m = a[i] / b[i - 1];
        b[i] -= m * c[i - 1];
        d[i] -= m * d[i - 1];
    }
    d[n - 1] /= b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) d[i] = (d[i] - c[i] * d[i + 1]) / b[i];
}

struct Level {
    double Q0;
    bool positive;
    int iterations;
};

// Scale-fixed form: -Lap w + w = mu w^3 with w(h) = 1 pins the amplitude and
// keeps Newton away from w = 0; then Q = sqrt(mu) w. In v = r w the interior
// rows are (v_{i-1} - 2 v_i + v_{i+1}) / h^2 - v_i + mu v_i^3 / r_i^2 = 0 and the
// last row closes v' = -v with a ghost point. Unknowns v_1..v_M (v_0 = 0) and mu.
Level solve(double L, double h, std::vector<double>& v, double& mu) {
    const auto M = static_cast<std::size_t>(std::llround(L / h));
    int it = 0;
    for (; it < 100; ++it) {
        std::vector<double> a(M, 0.0), b(M, 0.0), c(M, 0.0), F(M, 0.0), dmu(M, 0.0);
        for (std::size_t i = 1; i <= M; ++i) {
            const std::size_t k = i - 1;
            const double r = static_cast<double>(i) * h;
            const double cube = v[i] * v[i] * v[i] / (r * r);
            if (i < M) {
                F[k] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) / (h * h) - v[i] + mu * cube;
                a[k] = 1.0 / (h * h);
                b[k] = -2.0 / (h * h) - 1.0 + 3.0 * mu * v[i] * v[i] / (r * r);
                c[k] = 1.0 / (h * h);
            } else {
                F[k] = 2.0 * (v[i - 1] - v[i] - h * v[i]) / (h * h) - v[i] + mu * cube;
                a[k] = 2.0 / (h * h);
                b[k] = -2.0 * (1.0 + h) / (h * h) - 1.0 + 3.0 * mu * v[i] * v[i] / (r * r);
            }
            dmu[k] = cube;
        }
        const double G = v[1] / h - 1.0;
        for (double& f : F) f = -f;
        tridiagonal(a, b, c, F);     // x = T^{-1}(-F)
        tridiagonal(a, b, c, dmu);   // y = T^{-1} dF/dmu
        const double delta_mu = (F[0] + h * G) / dmu[0];
        double step = std::abs(delta_mu);
        for (std::size_t i = 1; i <= M; ++i) {
            const double d = F[i - 1] - delta_mu * dmu[i - 1];
            v[i] += d;
            step = std::max(step, std::abs(d));
        }
        mu += delta_mu;
        if (step < 1e-13 * std::max(1.0, mu)) break;
    }
    if (it == 100) throw std::runtime_error("oracle Newton did not converge");

    bool positive = mu > 0.0;
    for (std::size_t i = 1; i <= M; ++i) positive = positive && v[i] > 0.0;
    // Q = sqrt(mu) v / r at r = h, 2h, 3h; Q even: fit Q0 + c r^2 + d r^4
    const double s = std::sqrt(mu);
    const double q1 = s * v[1] / h, q2 = s * v[2] / (2 * h), q3 = s * v[3] / (3 * h);
    // Lagrange in r^2 at 1, 4, 9 (units h^2), evaluated at 0
    const double Q0 = q1 * (4.0 * 9.0) / ((1 - 4.0) * (1 - 9.0)) +
                      q2 * (1.0 * 9.0) / ((4.0 - 1) * (4.0 - 9.0)) +
                      q3 * (1.0 * 4.0) / ((9.0 - 1) * (9.0 - 4.0));
    return Level{Q0, positive, it};
}

// Linear interpolation of a level-h solution onto h/2.
std::vector<double> refine(const std::vector<double>& v) {
    std::vector<double> out(2 * (v.size() - 1) + 1);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        out[2 * i] = v[i];
        out[2 * i + 1] = 0.5 * (v[i] + v[i + 1]);
    }
    out.back() = v.back();
    return out;
}

}  // namespace

BvpResult ground_state_central_value(double L, double h) {
    // continuation from a coarse grid, starting at a generic bump
    double hc = h;
    int doublings = 0;
    while (hc < 0.05) {
        hc *= 2;
        ++doublings;
    }
    // refine() doubles the node count, so the start grid must divide L exactly
    if (std::abs(std::llround(L / hc) * hc - L) > 1e-9 * L) {
        throw std::invalid_argument("oracle: L must be a multiple of the coarse spacing");
    }
    const auto Mc = static_cast<std::size_t>(std::llround(L / hc));
    std::vector<double> v(Mc + 1, 0.0);
    for (std::size_t i = 1; i <= Mc; ++i) {
        const double r = static_cast<double>(i) * hc;
        v[i] = r * std::exp(-r * r / 4.0);
    }
    double mu = 10.0;
    solve(L, hc, v, mu);
    for (int d = 0; d < doublings; ++d) {
        hc /= 2;
        v = refine(v);
        solve(L, hc, v, mu);
    }
    const Level a = solve(L, h, v, mu);
    v = refine(v);
    const Level b = solve(L, h / 2, v, mu);
    v = refine(v);
    const Level c = solve(L, h / 4, v, mu);
    // two Richardson passes: O(h^2) then O(h^4)
    const double ab = (4.0 * b.Q0 - a.Q0) / 3.0;
    const double bc = (4.0 * c.Q0 - b.Q0) / 3.0;
    BvpResult out;
    out.Q0 = (16.0 * bc - ab) / 15.0;
    out.Q0_coarse = c.Q0;
    out.positive = a.positive && b.positive && c.positive;
    out.newton_iterations = c.iterations;
    return out;
}

double gaussian_l2_squared() { return std::pow(kPi / 2.0, 1.5); }
double gaussian_grad_squared() { return 3.0 * std::pow(kPi, 1.5) / (2.0 * std::sqrt(2.0)); }
double gaussian_l4_fourth() { return std::pow(kPi, 1.5) / 8.0; }

kgz::RadialField random_field(const kgz::RadialGrid& g, std::mt19937_64& rng, double scale_lo,
                              double scale_hi) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> scale(scale_lo, scale_hi);
    const double s = scale(rng);
    kgz::SpectralField c(g);
    for (std::size_t k = 0; k < c.a.size(); ++k) {
        const double xi = g.frequency(k);
        c.a[k] = normal(rng) * std::exp(-0.5 * (xi / s) * (xi / s));
    }
    return kgz::inverse_sine_transform(c);
}

kgz::RadialField zero_mean_bump(const kgz::RadialGrid& g, double B, double s) {
    return kgz::RadialField::from_physical(g, [=](double r) {
        const double x = r * r / (s * s);
        return B * (3.0 - 2.0 * x) * std::exp(-x);
    });
}

}  // namespace oracle
