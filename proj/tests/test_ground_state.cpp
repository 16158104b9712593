#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <filesystem>

#include "kgz/functionals.hpp"
#include "kgz/ground_state.hpp"
#include "oracles.hpp"

using namespace kgz;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const char* name) {
    const fs::path p = fs::temp_directory_path() / (std::string("kgz_unit_") + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_SUITE("ground_state") {

TEST_CASE("central value agrees with the finite-difference BVP oracle") {
    const oracle::BvpResult ref = oracle::ground_state_central_value();
    REQUIRE(ref.positive);
    const GroundState gs = find_ground_state(RadialGrid::make(30.0, 2048));
    CHECK(std::abs(gs.Q0 - ref.Q0) < 1e-6);
    // the unextrapolated oracle is only second order
    CHECK(std::abs(ref.Q0_coarse - ref.Q0) > std::abs(gs.Q0 - ref.Q0));
}

TEST_CASE("certification data") {
    const GroundState gs = find_ground_state(RadialGrid::make(30.0, 1024));
    CHECK(gs.certified());
    CHECK(gs.positive);
    CHECK(gs.decreasing);
    CHECK(gs.residual_pde < kResidualCertTol);
    CHECK(gs.pohozaev_K0 < kPohozaevCertTol);
    CHECK(gs.pohozaev_K2 < kPohozaevCertTol);
    CHECK(gs.JQ == doctest::Approx(static_energy_J(gs.profile)).epsilon(1e-14));
}

TEST_CASE("shooting outcomes bracket the central value") {
    const RadialGrid g = RadialGrid::make(30.0, 1024);
    CHECK(shoot_static_ode(0.5, g).outcome == ShootOutcome::Diverged);
    CHECK(shoot_static_ode(50.0, g).outcome == ShootOutcome::Crossed);
    const GroundState gs = find_ground_state(g);
    const ShootResult lo = shoot_static_ode(gs.shooting_a - 1e-6, g);
    const ShootResult hi = shoot_static_ode(gs.shooting_a + 1e-6, g);
    CHECK(lo.outcome == ShootOutcome::Diverged);
    CHECK(hi.outcome == ShootOutcome::Crossed);
    // both follow Q well into the tail before separating
    CHECK(g.node(lo.stop_node - 1) > 8.0);
    CHECK(g.node(hi.stop_node - 1) > 8.0);
    CHECK(std::isnan(hi.q.back()));
}

TEST_CASE("bisection tolerance floor") {
    CHECK_THROWS_AS(find_ground_state(RadialGrid::make(30.0, 256), 1e-14), std::invalid_argument);
}

TEST_CASE("standing waves") {
    const GroundState gs = find_ground_state(RadialGrid::make(30.0, 1024));
    for (int sign : {1, -1}) {
        const SystemState s = standing_wave_state(sign, gs, 0.5);
        CHECK(energy_E(s) == doctest::Approx(gs.JQ).epsilon(1e-10));
        CHECK(s.u.w[0] == doctest::Approx(sign * gs.profile.w[0]));
    }
    CHECK_THROWS_AS(standing_wave_state(0, gs, 0.5), std::invalid_argument);
    GroundState broken = gs;
    broken.profile *= 1.01;
    certify(broken);
    CHECK_FALSE(broken.certified());
    CHECK_THROWS_AS(standing_wave_state(1, broken, 0.5), std::invalid_argument);
}

TEST_CASE("refinement study converges") {
    const ThresholdStudy st = threshold_refinement(30.0, 1024, 1e-12, 4);
    REQUIRE(st.sizes.size() == 4);
    CHECK(st.sizes.front() == 128);
    CHECK(st.observed_order >= 2.0);
    CHECK(std::abs(st.values.back() - st.extrapolated) < 1e-8);
}

TEST_CASE("cache round trip") {
    const fs::path dir = scratch_dir("gscache");
    const RadialGrid g = RadialGrid::make(30.0, 512);
    const GroundState a = load_or_compute_ground_state(g, 1e-12, dir);
    const fs::path file = dir / ("groundstate_" + ground_state_cache_key(g, 1e-12) + ".txt");
    REQUIRE(fs::exists(file));
    const auto b = load_ground_state(file, g, 1e-12);
    REQUIRE(b.has_value());
    CHECK(b->profile.w == a.profile.w);
    CHECK(b->JQ == a.JQ);
    CHECK(b->Q0 == a.Q0);
    CHECK_FALSE(load_ground_state(file, RadialGrid::make(30.0, 1024), 1e-12).has_value());
    CHECK_FALSE(load_ground_state(file, g, 1e-10).has_value());
    CHECK_FALSE(load_ground_state(dir / "missing.txt", g, 1e-12).has_value());
    fs::remove_all(dir);
}

}  // TEST_SUITE
