#include "kgz/functionals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kgz {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

double sum_squares(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// 4 pi int w^2 dr
double l2_squared(const RadialField& f) { return kFourPi * f.grid.dr() * sum_squares(f.w); }

// 4 pi int w'^2 dr = 4 pi (R/2) sum xi^2 a^2
double grad_squared(const SpectralField& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        const double xi = s.grid.frequency(i);
        acc += xi * xi * s.a[i] * s.a[i];
    }
    return kFourPi * 0.5 * s.grid.radius() * acc;
}

double hdot_minus1_squared(const SpectralField& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.a.size(); ++i) {
        const double xi = s.grid.frequency(i);
        acc += s.a[i] * s.a[i] / (xi * xi);
    }
    return kFourPi * 0.5 * s.grid.radius() * acc;
}

void require_scaling_index(int i) {
    if (i != 0 && i != 2) {
        throw std::invalid_argument("scaling index must be 0 or 2, got " + std::to_string(i));
    }
}

}  // namespace

double l4_power4(const RadialField& f) {
    // w^4 / r^2 = O(r^2) at the origin, so the r = 0 node contributes nothing.
    double acc = 0.0;
    for (std::size_t i = 0; i < f.w.size(); ++i) {
        const double r = f.grid.node(i);
        const double w2 = f.w[i] * f.w[i];
        acc += w2 * w2 / (r * r);
    }
    return kFourPi * f.grid.dr() * acc;
}

double norm(const RadialField& f, Norm which) {
    switch (which) {
        case Norm::L2: return std::sqrt(l2_squared(f));
        case Norm::GradL2: return std::sqrt(grad_squared(sine_transform(f)));
        case Norm::H1: return std::sqrt(l2_squared(f) + grad_squared(sine_transform(f)));
        case Norm::L4: return std::pow(l4_power4(f), 0.25);
        case Norm::HdotMinus1: return std::sqrt(hdot_minus1_squared(sine_transform(f)));
    }
    throw std::invalid_argument("unknown norm");
}

double inner_l2(const RadialField& f, const RadialField& g) {
    require_same_grid(f.grid, g.grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.w.size(); ++i) acc += f.w[i] * g.w[i];
    return kFourPi * f.grid.dr() * acc;
}

double inner_hdot_minus1(const RadialField& f, const RadialField& g) {
    require_same_grid(f.grid, g.grid);
    const SpectralField a = sine_transform(f);
    const SpectralField b = sine_transform(g);
    double acc = 0.0;
    for (std::size_t i = 0; i < a.a.size(); ++i) {
        const double xi = a.grid.frequency(i);
        acc += a.a[i] * b.a[i] / (xi * xi);
    }
    return kFourPi * 0.5 * f.grid.radius() * acc;
}

FunctionalReport evaluate_functionals(const RadialField& phi) {
    const SpectralField s = sine_transform(phi);
    const double l2sq = l2_squared(phi);
    const double gradsq = grad_squared(s);
    const double l4p4 = l4_power4(phi);

    FunctionalReport r;
    r.L2 = std::sqrt(l2sq);
    r.H1grad = std::sqrt(gradsq);
    r.L4 = std::pow(l4p4, 0.25);
    r.HdotMinus1 = std::sqrt(hdot_minus1_squared(s));
    r.J = 0.5 * (l2sq + gradsq) - 0.25 * l4p4;
    r.K0 = l2sq + gradsq - l4p4;
    r.K2 = gradsq - 0.75 * l4p4;
    r.G0 = r.J - r.K0 / 4.0;
    r.G2 = r.J - r.K2 / 3.0;
    return r;
}

double static_energy_J(const RadialField& phi) { return evaluate_functionals(phi).J; }

double functional_K(int i, const RadialField& phi) {
    require_scaling_index(i);
    const auto r = evaluate_functionals(phi);
    return i == 0 ? r.K0 : r.K2;
}

double functional_G(int i, const RadialField& phi) {
    require_scaling_index(i);
    const SpectralField s = sine_transform(phi);
    const double l2sq = l2_squared(phi);
    const double gradsq = grad_squared(s);
    return i == 0 ? 0.25 * (l2sq + gradsq) : gradsq / 6.0 + 0.5 * l2sq;
}

EnergyBreakdown energy_breakdown(const SystemState& s) {
    validate_alpha(s.alpha);
    const double a2 = s.alpha * s.alpha;

    const double u_l2 = l2_squared(s.u);
    const double u_grad = grad_squared(sine_transform(s.u));
    const double u_l4 = l4_power4(s.u);
    const double udot_l2 = l2_squared(s.udot);
    const double ndot_hm1 = hdot_minus1_squared(sine_transform(s.ndot));
    const double n_l2 = l2_squared(s.n);
    const RadialField u_sq = pointwise_product(s.u, s.u);
    const double n_usq = inner_l2(s.n, u_sq);
    const double defect = l2_squared(s.n - u_sq);

    EnergyBreakdown e;
    e.formula = 0.5 * (u_l2 + u_grad + udot_l2) + 0.25 * (ndot_hm1 / a2 + n_l2) - 0.5 * n_usq;
    e.J_u = 0.5 * (u_l2 + u_grad) - 0.25 * u_l4;
    e.kinetic_u = 0.5 * udot_l2;
    e.kinetic_n = ndot_hm1 / (4.0 * a2);
    e.coupling_defect = 0.25 * defect;
    e.decomposition = e.J_u + e.kinetic_u + e.kinetic_n + e.coupling_defect;
    e.scale = 0.5 * (u_l2 + u_grad + udot_l2) + 0.25 * (ndot_hm1 / a2 + n_l2) +
              0.5 * std::abs(n_usq) + 0.25 * u_l4;
    return e;
}

double energy_E(const SystemState& s) {
    const EnergyBreakdown e = energy_breakdown(s);
    if (std::abs(e.formula - e.decomposition) > 1e-10 * e.scale) {
        throw std::logic_error("energy routes disagree: " + std::to_string(e.formula) + " vs " +
                               std::to_string(e.decomposition));
    }
    return e.formula;
}

double linear_energy(const SystemState& s) {
    validate_alpha(s.alpha);
    const double a2 = s.alpha * s.alpha;
    return 0.5 * (l2_squared(s.u) + grad_squared(sine_transform(s.u)) + l2_squared(s.udot)) +
           0.25 * (hdot_minus1_squared(sine_transform(s.ndot)) / a2 + l2_squared(s.n));
}

double energy_norm_squared(const SystemState& s) {
    return l2_squared(s.u) + grad_squared(sine_transform(s.u)) + l2_squared(s.udot) +
           l2_squared(s.n) + hdot_minus1_squared(sine_transform(s.ndot));
}

RadialField l2_invariant_rescale(const RadialField& phi, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale factor must be positive");
    const RadialGrid& g = phi.grid;
    const long n = static_cast<long>(g.intervals());
    // w at node index j in [0, N]; odd about r = 0, zero beyond R.
    auto sample = [&](long j) -> double {
        if (j < 0) return -phi.w[static_cast<std::size_t>(-j - 1)];
        if (j == 0 || j >= n) return 0.0;
        return phi.w[static_cast<std::size_t>(j - 1)];
    };
    RadialField out(g);
    const double amp = std::pow(lambda, 1.5);
    for (std::size_t i = 0; i < out.w.size(); ++i) {
        const double x = lambda * g.node(i) / g.dr();
        const long m = static_cast<long>(std::floor(x));
        const double t = x - static_cast<double>(m);
        const double p0 = sample(m - 1), p1 = sample(m), p2 = sample(m + 1), p3 = sample(m + 2);
        // 4-point Lagrange on nodes m-1, m, m+1, m+2
        const double w_at = -t * (t - 1) * (t - 2) / 6.0 * p0 + (t + 1) * (t - 1) * (t - 2) / 2.0 * p1 -
                            (t + 1) * t * (t - 2) / 2.0 * p2 + (t + 1) * t * (t - 1) / 6.0 * p3;
        // phi(lambda r) in reduced form is w(lambda r) / lambda
        out.w[i] = amp * w_at / lambda;
    }
    return out;
}

double scaling_derivative_residual(const RadialField& phi, int i, double h) {
    require_scaling_index(i);
    if (!(h > 0.0 && h <= 1e-2)) throw std::invalid_argument("step h must lie in (0, 1e-2]");
    double derivative = 0.0;
    if (i == 0) {
        derivative = (static_energy_J((1.0 + h) * phi) - static_energy_J((1.0 - h) * phi)) / (2 * h);
    } else {
        derivative = (static_energy_J(l2_invariant_rescale(phi, 1.0 + h)) -
                      static_energy_J(l2_invariant_rescale(phi, 1.0 - h))) /
                     (2 * h);
    }
    return std::abs(derivative - functional_K(i, phi));
}

// ---------------------------------------------------------------------------
// SystemState

void validate_alpha(double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("sound speed alpha must be positive");
    if (alpha == 1.0) {
        throw std::invalid_argument("model assumption violated: alpha must differ from 1");
    }
}

SystemState::SystemState(RadialField u_, RadialField udot_, RadialField n_, RadialField ndot_,
                         double alpha_, double t_)
    : t(t_), u(std::move(u_)), udot(std::move(udot_)), n(std::move(n_)), ndot(std::move(ndot_)),
      alpha(alpha_) {
    validate_alpha(alpha);
    require_same_grid(u.grid, udot.grid);
    require_same_grid(u.grid, n.grid);
    require_same_grid(u.grid, ndot.grid);
}

SystemState SystemState::zero(const RadialGrid& grid, double alpha) {
    return SystemState(RadialField(grid), RadialField(grid), RadialField(grid), RadialField(grid),
                       alpha);
}

bool SystemState::all_finite() const {
    return std::isfinite(t) && u.all_finite() && udot.all_finite() && n.all_finite() &&
           ndot.all_finite();
}

}  // namespace kgz
