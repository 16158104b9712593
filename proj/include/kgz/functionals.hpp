#pragma once

#include "kgz/spectral.hpp"
#include "kgz/state.hpp"

namespace kgz {

// All integrals are over R^3 with radial measure 4 pi r^2 dr, evaluated by the
// trapezoid rule on the reduced arrays (both ends carry w = 0).

enum class Norm { L2, GradL2, H1, L4, HdotMinus1 };

double norm(const RadialField& f, Norm which);
double inner_l2(const RadialField& f, const RadialField& g);
/// <f, g> in Hdot^{-1}, i.e. <D^{-1} f, D^{-1} g>.
double inner_hdot_minus1(const RadialField& f, const RadialField& g);

/// int f^4 (avoids the square root of norm(f, L4)).
double l4_power4(const RadialField& f);

/// J(phi) = ||phi||_{H1}^2 / 2 - ||phi||_{L4}^4 / 4.
double static_energy_J(const RadialField& phi);

/// Scaling derivatives of J: i = 0 is amplitude scaling lambda*phi,
/// i = 2 is lambda^{3/2} phi(lambda x).
///   K0 = ||phi||_{H1}^2 - ||phi||_4^4,  K2 = ||grad phi||^2 - (3/4)||phi||_4^4.
double functional_K(int i, const RadialField& phi);
/// G0 = J - K0/4 = ||phi||_{H1}^2 / 4,  G2 = J - K2/3 = ||grad phi||^2/6 + ||phi||^2/2.
double functional_G(int i, const RadialField& phi);

struct FunctionalReport {
    double J = 0, K0 = 0, K2 = 0, G0 = 0, G2 = 0;
    double L2 = 0, H1grad = 0, L4 = 0, HdotMinus1 = 0;
};

/// Everything above from a single transform of phi.
FunctionalReport evaluate_functionals(const RadialField& phi);

/// Energy by its defining formula and by the split
///   E = J(u) + ||u_t||^2/2 + ||D^{-1} n_t||^2 / (4 alpha^2) + ||n - u^2||^2 / 4.
struct EnergyBreakdown {
    double formula = 0;
    double decomposition = 0;
    double J_u = 0;
    double kinetic_u = 0;
    double kinetic_n = 0;
    double coupling_defect = 0;
    /// Sum of absolute values of all terms; the natural scale for relative checks.
    double scale = 0;
};

EnergyBreakdown energy_breakdown(const SystemState& s);

/// Conserved energy. Throws std::logic_error if the two routes of
/// energy_breakdown disagree beyond 1e-10 of their scale.
double energy_E(const SystemState& s);

/// The linear part of E (coupling term -n u^2 / 2 dropped).
double linear_energy(const SystemState& s);

/// ||u||_{H1}^2 + ||u_t||^2 + ||n||^2 + ||n_t||_{Hdot^-1}^2.
double energy_norm_squared(const SystemState& s);

/// |central difference of J along the i-th scaling at lambda = 1 - K_i(phi)|.
/// For i = 2 the dilation phi(lambda x) is realized by cubic interpolation of w.
double scaling_derivative_residual(const RadialField& phi, int i, double h);

/// lambda^{3/2} phi(lambda x) on the same grid (cubic interpolation, w = 0 beyond R).
RadialField l2_invariant_rescale(const RadialField& phi, double lambda);

}  // namespace kgz
