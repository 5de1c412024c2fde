#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "nlbath/error.hpp"
#include "nlbath/langevin.hpp"
#include "support.hpp"

using namespace nlbath;

namespace {

double energy(const TrajectoryState& s) { return 0.5 * s.v * s.v + potential(s.x); }

/// Max |E(t) - E(0)| over [0, t_end] for the undamped, noiseless oscillator.
double max_energy_error(double dt, double t_end) {
    ClassicalBathParams p{.gamma1 = 0.0, .temperature = 0.0};
    TrajectoryState s{.x = 0.5, .v = 0.0};
    const double e0 = energy(s);
    double worst = 0.0;
    const auto n = static_cast<long>(std::llround(t_end / dt));
    for (long k = 0; k < n; ++k) {
        s = step(s, p, dt, 0.0);
        worst = std::max(worst, std::abs(energy(s) - e0));
    }
    return worst;
}

TrajectoryState integrate_deterministic(double dt, double t_end) {
    ClassicalBathParams p{.gamma1 = 0.4, .temperature = 0.0};
    TrajectoryState s{.x = 0.5, .v = 0.3};
    const auto n = static_cast<long>(std::llround(t_end / dt));
    for (long k = 0; k < n; ++k) s = step(s, p, dt, 0.0);
    return s;
}

} // namespace

TEST_CASE("rescale maps physical parameters to the dimensionless model") {
    auto r = rescale({.mass = 1, .a = 1, .b = 1, .gamma_bar = 0.4, .temperature = 1});
    CHECK(r.gamma1 == doctest::Approx(0.4));
    CHECK(r.temperature == doctest::Approx(1.0));
    CHECK(r.epsilon == 0.0);
    CHECK(r.omega == 0.0);

    r = rescale({.mass = 4, .a = 1, .b = 1, .gamma_bar = 0.2, .temperature = 1});
    CHECK(r.gamma1 == doctest::Approx(0.4));
    CHECK(r.temperature == doctest::Approx(1.0));

    r = rescale({.mass = 1, .a = 2, .b = 1, .gamma_bar = 0.4, .temperature = 1});
    CHECK(r.gamma1 == doctest::Approx(0.28284).epsilon(1e-4));
    CHECK(r.temperature == doctest::Approx(0.25));
}

TEST_CASE("rescale rejects non-physical parameters") {
    CHECK_THROWS_AS(rescale({.mass = 0}), InvalidParameter);
    CHECK_THROWS_AS(rescale({.mass = 1, .a = -1}), InvalidParameter);
    CHECK_THROWS_AS(rescale({.mass = 1, .a = 1, .b = 0}), InvalidParameter);
    CHECK_THROWS_AS(rescale({.gamma_bar = -0.1}), InvalidParameter);
    CHECK_THROWS_AS(rescale({.temperature = -1}), InvalidParameter);
}

TEST_CASE("diffusion follows fluctuation-dissipation") {
    PhysicalParams p{.mass = 2, .gamma_bar = 0.5, .temperature = 3, .k_b = 0.1};
    CHECK(p.diffusion() == doctest::Approx(0.3));
}

TEST_CASE("bath parameter validation") {
    CHECK_THROWS_AS((ClassicalBathParams{.gamma1 = 0.0, .temperature = 1}.validate()), InvalidParameter);
    CHECK_THROWS_AS((ClassicalBathParams{.gamma1 = 0.4, .temperature = -1}.validate()), InvalidParameter);
    CHECK_THROWS_AS((ClassicalBathParams{.gamma1 = 0.4, .epsilon = -0.1}.validate()), InvalidParameter);
    CHECK_NOTHROW((ClassicalBathParams{.gamma1 = 0.4, .temperature = 0.0}.validate()));
}

TEST_CASE("well bottoms and the barrier top are fixed points") {
    ClassicalBathParams p{.gamma1 = 0.0, .temperature = 0.0};
    for (double x0 : {1.0, -1.0, 0.0}) {
        TrajectoryState s{.x = x0, .v = 0.0};
        for (int k = 0; k < 10000; ++k) s = step(s, p, 0.01, 0.0);
        CHECK(s.x == doctest::Approx(x0).epsilon(1e-15));
        CHECK(std::abs(s.v) < 1e-15);
        CHECK(s.t == doctest::Approx(100.0));
    }
}

TEST_CASE("phase advances by the trapezoid of x") {
    ClassicalBathParams p{.gamma1 = 0.4, .temperature = 0.0, .epsilon = 0.05};
    TrajectoryState s{.x = 0.7, .v = 0.2};
    const TrajectoryState n = step(s, p, 0.01, 0.0);
    CHECK(n.phase == doctest::Approx(2 * 0.05 * 0.5 * (s.x + n.x) * 0.01).epsilon(1e-14));
}

TEST_CASE("noise enters the velocity with amplitude sqrt(2 gamma1 T dt)") {
    ClassicalBathParams hot{.gamma1 = 0.4, .temperature = 0.5};
    ClassicalBathParams cold{.gamma1 = 0.4, .temperature = 0.0};
    TrajectoryState s{.x = 0.3, .v = -0.1};
    const double dt = 0.01;
    const TrajectoryState a = step(s, hot, dt, 1.0);
    const TrajectoryState b = step(s, cold, dt, 0.0);
    // The x update sees the kick through the predictor velocity, once.
    const double kick = std::sqrt(2 * 0.4 * 0.5 * dt);
    CHECK(a.x - b.x == doctest::Approx(0.5 * dt * kick).epsilon(1e-6));
}

TEST_CASE("energy error of the deterministic scheme is second order in dt") {
    // Over a long window the accumulated drift dominates the bounded oscillation.
    const double e1 = max_energy_error(0.04, 100.0);
    const double e2 = max_energy_error(0.02, 100.0);
    const double e3 = max_energy_error(0.01, 100.0);
    MESSAGE("energy drift ratios " << e1 / e2 << ", " << e2 / e3);
    CHECK(e1 / e2 >= 4.0);
    CHECK(e2 / e3 >= 4.0);
}

TEST_CASE("global error at T = 0 scales as dt^2") {
    const TrajectoryState ref = integrate_deterministic(1e-4, 20.0);
    auto err = [&](double dt) {
        const TrajectoryState s = integrate_deterministic(dt, 20.0);
        return std::hypot(s.x - ref.x, s.v - ref.v);
    };
    const double e1 = err(0.02), e2 = err(0.01), e3 = err(0.005);
    MESSAGE("global error ratios " << e1 / e2 << ", " << e2 / e3);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("weak error of <x^2> is at least first order for T > 0") {
    // Coupled Brownian paths: the noise of a coarse step is the normalized sum
    // of the fine-step draws, so differences between step sizes have small variance.
    const ClassicalBathParams p{.gamma1 = 0.4, .temperature = 0.5};
    const double t_end = 2.0;
    const int levels = 4; // dt = 0.2, 0.1, 0.05 and the 0.0125 reference
    const double dt_ref = 0.0125;
    const int fine_steps = static_cast<int>(std::llround(t_end / dt_ref));
    const std::vector<int> factors{16, 8, 4, 1};
    std::vector<double> sum_diff(levels - 1, 0.0);
    std::vector<double> sum_diff2(levels - 1, 0.0);
    const int n_paths = 20000;
    std::vector<double> noise(fine_steps);
    for (int path = 0; path < n_paths; ++path) {
        RandomStream rng(derive_seed(7, path));
        for (double& z : noise) z = rng.normal();
        std::vector<double> x2(levels);
        for (int l = 0; l < levels; ++l) {
            const int f = factors[l];
            TrajectoryState s{.x = 0.5, .v = 0.0};
            for (int k = 0; k < fine_steps; k += f) {
                double z = 0.0;
                for (int j = 0; j < f; ++j) z += noise[k + j];
                s = step(s, p, dt_ref * f, z / std::sqrt(static_cast<double>(f)));
            }
            x2[l] = s.x * s.x;
        }
        for (int l = 0; l + 1 < levels; ++l) {
            const double d = x2[l] - x2[levels - 1];
            sum_diff[l] += d;
            sum_diff2[l] += d * d;
        }
    }
    std::vector<double> bias(levels - 1), err(levels - 1);
    for (int l = 0; l + 1 < levels; ++l) {
        bias[l] = sum_diff[l] / n_paths;
        err[l] = std::sqrt((sum_diff2[l] / n_paths - bias[l] * bias[l]) / n_paths);
        MESSAGE("dt=" << dt_ref * factors[l] << " weak bias " << bias[l] << " +- " << err[l]);
    }
    // Bias is resolved well above its statistical error at the coarse steps.
    CHECK(std::abs(bias[0]) > 5 * err[0]);
    CHECK(std::abs(bias[1]) > 5 * err[1]);
    // Halving dt removes at least half of the error (order >= 1).
    const double order_01 = std::log2(std::abs(bias[0]) / std::abs(bias[1]));
    CHECK(order_01 >= 1.0);
}

TEST_CASE("equilibrium sampling at T = 0 picks a well bottom") {
    ClassicalBathParams p{.gamma1 = 0.4, .temperature = 0.0};
    int plus = 0;
    for (std::uint64_t seed = 0; seed < 2000; ++seed) {
        const TrajectoryState s = sample_equilibrium(p, seed);
        CHECK(std::abs(std::abs(s.x) - 1.0) == 0.0);
        CHECK(s.v == 0.0);
        plus += s.x > 0;
    }
    CHECK(std::abs(plus - 1000) < 4 * std::sqrt(500.0));
}

TEST_CASE("equilibrium sampling reproduces the Boltzmann moments") {
    for (double T : {0.1, 0.25, 0.5, 1.0, 2.0, 10.0}) {
        CAPTURE(T);
        ClassicalBathParams p{.gamma1 = 0.4, .temperature = T};
        RandomStream rng(derive_seed(123, static_cast<std::uint64_t>(T * 1000)));
        std::vector<double> x, x2, v2;
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const TrajectoryState s = sample_equilibrium(p, rng);
            CHECK(s.phase == 0.0);
            CHECK(s.t == 0.0);
            x.push_back(s.x);
            x2.push_back(s.x * s.x);
            v2.push_back(s.v * s.v);
        }
        const auto mx = oracle::mean_error(x);
        const auto mx2 = oracle::mean_error(x2);
        const auto mv2 = oracle::mean_error(v2);
        const double x2_oracle = oracle::boltzmann_moment(T, 2);
        CHECK(std::abs(mx.mean) < 4 * mx.error);
        CHECK(std::abs(mx2.mean - x2_oracle) < 3 * mx2.error);
        CHECK(std::abs(mv2.mean - T) < 3 * mv2.error);
    }
}

// The cubic asymmetry of each well pulls <x^2> below 1: the quadrature gives
// 0.87 at T = 0.1, 0.83 at T = 0.25 and 0.89 at T = 0.5. The "<x^2> within 10% of 1 for
// T <= 0.5" approximation therefore does not hold on this grid; the check is
// kept as stated and expected to fail.
TEST_CASE("low-temperature <x^2> stays within 10% of 1" * doctest::should_fail()) {
    for (double T : {0.1, 0.25, 0.5}) {
        CAPTURE(T);
        const double x2 = oracle::boltzmann_moment(T, 2);
        MESSAGE("T=" << T << " <x^2>=" << x2);
        CHECK(std::abs(x2 - 1.0) < 0.1);
    }
}

TEST_CASE("proposal window covers the Boltzmann tails") {
    CHECK(proposal_half_width(0.25) == 3.0);
    CHECK(proposal_half_width(5.0) == 3.0);
    for (double T : {6.0, 50.0, 1000.0}) {
        const double w = proposal_half_width(T);
        CHECK(w >= 3.0);
        // Weight beyond the window is below exp(-36).
        CHECK(potential(w) / T > 36.0);
    }
}

TEST_CASE("Kramers rate closed form") {
    CHECK(kramers_rate({.gamma1 = 0.4, .temperature = 0.25}) == doctest::Approx(0.04619).epsilon(1e-4));
    CHECK(kramers_rate({.gamma1 = 0.4, .temperature = 1.0}) == doctest::Approx(0.30120).epsilon(1e-4));
    CHECK(kramers_rate({.gamma1 = 0.4, .temperature = 1e12}) == doctest::Approx(0.56270).epsilon(1e-4));
    CHECK(kramers_rate({.gamma1 = 0.4, .temperature = std::numeric_limits<double>::infinity()}) ==
          doctest::Approx(1.0 / (std::numbers::sqrt2 * std::numbers::pi * 0.4)));
    CHECK(kramers_rate({.gamma1 = 0.4, .temperature = 0.0}) == 0.0);
}
