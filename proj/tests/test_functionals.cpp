#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

#include "kgz/functionals.hpp"
#include "kgz/ground_state.hpp"
#include "oracles.hpp"

using namespace kgz;

TEST_SUITE("functionals") {

TEST_CASE("Gaussian norms against closed forms") {
    const RadialGrid g = RadialGrid::make(30.0, 4096);
    const RadialField f = RadialField::from_physical(g, [](double r) { return std::exp(-r * r); });
    const double l2 = norm(f, Norm::L2), gr = norm(f, Norm::GradL2);
    CHECK(std::abs(l2 * l2 - oracle::gaussian_l2_squared()) < 1e-8);
    CHECK(std::abs(gr * gr - oracle::gaussian_grad_squared()) < 1e-8);
    CHECK(std::abs(l4_power4(f) - oracle::gaussian_l4_fourth()) < 1e-8);
    const double h1 = norm(f, Norm::H1);
    CHECK(h1 * h1 == doctest::Approx(l2 * l2 + gr * gr).epsilon(1e-14));
}

TEST_CASE("Hdot^-1 norm of a Laplacian is the gradient norm") {
    // Lap e^{-r^2} = (4 r^2 - 6) e^{-r^2}, so ||Lap g||_{Hdot^-1} = ||grad g||
    const RadialGrid g = RadialGrid::make(30.0, 4096);
    const RadialField lap =
        RadialField::from_physical(g, [](double r) { return (4 * r * r - 6) * std::exp(-r * r); });
    const double h = norm(lap, Norm::HdotMinus1);
    CHECK(std::abs(h * h - oracle::gaussian_grad_squared()) < 1e-8);
}

TEST_CASE("Cauchy-Schwarz on random pairs") {
    std::mt19937_64 rng(17);
    const RadialGrid g = RadialGrid::make(30.0, 256);
    for (int i = 0; i < 50; ++i) {
        const RadialField a = oracle::random_field(g, rng), b = oracle::random_field(g, rng);
        CHECK(std::abs(inner_l2(a, b)) <= norm(a, Norm::L2) * norm(b, Norm::L2) * (1 + 1e-14));
        CHECK(std::abs(inner_hdot_minus1(a, b)) <=
              norm(a, Norm::HdotMinus1) * norm(b, Norm::HdotMinus1) * (1 + 1e-14));
    }
}

TEST_CASE("K0 - K2 identity and G definitions") {
    std::mt19937_64 rng(19);
    const RadialGrid g = RadialGrid::make(30.0, 256);
    for (int i = 0; i < 50; ++i) {
        const RadialField f = oracle::random_field(g, rng);
        const double l2 = norm(f, Norm::L2);
        const double lhs = functional_K(0, f) - functional_K(2, f);
        const double rhs = l2 * l2 - 0.25 * l4_power4(f);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1 + std::abs(rhs) + l4_power4(f)));
        CHECK(functional_G(0, f) ==
              doctest::Approx(static_energy_J(f) - functional_K(0, f) / 4).epsilon(1e-12));
        CHECK(functional_G(2, f) ==
              doctest::Approx(static_energy_J(f) - functional_K(2, f) / 3).epsilon(1e-12));
    }
    CHECK_THROWS_AS(functional_K(1, RadialField(g)), std::invalid_argument);
    CHECK_THROWS_AS(functional_G(3, RadialField(g)), std::invalid_argument);
}

TEST_CASE("energy by both routes on random states") {
    std::mt19937_64 rng(23);
    const RadialGrid g = RadialGrid::make(30.0, 256);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const SystemState s(oracle::random_field(g, rng), oracle::random_field(g, rng),
                            oracle::random_field(g, rng), oracle::random_field(g, rng), 0.7);
        const EnergyBreakdown e = energy_breakdown(s);
        worst = std::max(worst, std::abs(e.formula - e.decomposition) / e.scale);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("zero state") {
    const RadialGrid g = RadialGrid::make(30.0, 64);
    const SystemState z = SystemState::zero(g, 0.5);
    CHECK(energy_E(z) == 0.0);
    CHECK(static_energy_J(z.u) == 0.0);
    CHECK(energy_norm_squared(z) == 0.0);
}

TEST_CASE("alpha = 1 and nonpositive alpha are rejected") {
    const RadialGrid g = RadialGrid::make(30.0, 64);
    CHECK_THROWS_WITH_AS(SystemState::zero(g, 1.0), doctest::Contains("model assumption"),
                         std::invalid_argument);
    CHECK_THROWS_AS(SystemState::zero(g, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SystemState::zero(g, -2.0), std::invalid_argument);
}

TEST_CASE("scaling derivatives match K by finite differences") {
    const RadialGrid g = RadialGrid::make(30.0, 2048);
    const RadialField f =
        RadialField::from_physical(g, [](double r) { return 1.7 * std::exp(-r * r / 2); });
    CHECK(scaling_derivative_residual(f, 0, 1e-3) < 1e-6 * (1 + std::abs(functional_K(0, f))));
    CHECK(scaling_derivative_residual(f, 2, 1e-3) < 1e-4 * (1 + std::abs(functional_K(2, f))));
    CHECK_THROWS_AS(scaling_derivative_residual(f, 0, 0.1), std::invalid_argument);
}

TEST_CASE("L2-invariant rescaling preserves the L2 norm") {
    const RadialGrid g = RadialGrid::make(30.0, 2048);
    const RadialField f = RadialField::from_physical(g, [](double r) { return std::exp(-r * r); });
    for (double lam : {0.7, 1.0, 1.4}) {
        CHECK(norm(l2_invariant_rescale(f, lam), Norm::L2) ==
              doctest::Approx(norm(f, Norm::L2)).epsilon(1e-6));
    }
    // grad scales like lambda
    const double gr = norm(l2_invariant_rescale(f, 1.4), Norm::GradL2);
    CHECK(gr == doctest::Approx(1.4 * norm(f, Norm::GradL2)).epsilon(1e-5));
}

TEST_CASE("threshold identities at the ground state") {
    const GroundState gs = find_ground_state(RadialGrid::make(30.0, 2048));
    const double scale = l4_power4(gs.profile);
    CHECK(std::abs(functional_K(0, gs.profile)) < 1e-6 * scale);
    CHECK(std::abs(functional_K(2, gs.profile)) < 1e-6 * scale);
    CHECK(gs.JQ == doctest::Approx(functional_G(0, gs.profile)).epsilon(1e-8));
    CHECK(gs.JQ == doctest::Approx(functional_G(2, gs.profile)).epsilon(1e-8));
    // amplitude scaling moves J down on both sides of Q
    CHECK(static_energy_J(0.9 * gs.profile) < gs.JQ);
    CHECK(static_energy_J(1.1 * gs.profile) < gs.JQ);
}

}  // TEST_SUITE
