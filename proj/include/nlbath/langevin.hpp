#pragma once

#include <cstdint>

#include "nlbath/rng.hpp"

namespace nlbath {

/// Double-well particle in physical units, V(x) = -a x^2/2 + b x^4/4.
struct PhysicalParams {
    double mass{1.0};
    double a{1.0};
    double b{1.0};
    double gamma_bar{0.0};   // dissipation, 1/time
    double temperature{0.0}; // kelvin
    double k_b{1.0};         // energy/kelvin

    /// Fluctuation-dissipation diffusion coefficient D = gamma_bar m k_b T.
    double diffusion() const noexcept { return gamma_bar * mass * k_b * temperature; }
    void validate() const;
};

/// Dimensionless bath plus probe parameters:
///   x'' = x - x^3 - gamma1 x' + sqrt(2 gamma1 T) eta(t),  phase' = 2 epsilon x.
struct ClassicalBathParams {
    double gamma1{0.4};
    double temperature{0.0};
    double epsilon{0.0};
    double omega{0.0}; // probe bare frequency; the dephasing pipeline requires 0

    void validate() const;
};

struct TrajectoryState {
    double x{0.0};
    double v{0.0};
    double phase{0.0};
    double t{0.0};
};

/// Rescaled potential -x^2/2 + x^4/4 (minima -1/4 at x = +-1).
constexpr double potential(double x) noexcept { return -0.5 * x * x + 0.25 * x * x * x * x; }

/// Rescale to x -> (a/b)^{1/2} x, t -> (m/a)^{1/2} t, T -> a^2/(b k_b) T.
ClassicalBathParams rescale(const PhysicalParams& params);

/// One stochastic Heun step. The additive noise increment
/// sqrt(2 gamma1 T dt) * noise enters the velocity in both predictor and
/// corrector; the phase advances by the trapezoid 2 eps (x_n + x_{n+1})/2 dt.
TrajectoryState step(const TrajectoryState& state, const ClassicalBathParams& params,
                     double dt, double noise) noexcept;

/// Draws (x, v) from the Boltzmann density exp(-(V(x) + v^2/2)/T).
/// At T = 0 the particle sits at the bottom of a randomly chosen well.
TrajectoryState sample_equilibrium(const ClassicalBathParams& params, RandomStream& rng);
TrajectoryState sample_equilibrium(const ClassicalBathParams& params, std::uint64_t seed);

/// Half-width of the uniform proposal used by sample_equilibrium.
double proposal_half_width(double temperature) noexcept;

/// R = (sqrt(2) pi gamma1)^{-1} exp(-1/(4 gamma1 T)); 0 at T = 0.
double kramers_rate(const ClassicalBathParams& params);

} // namespace nlbath
