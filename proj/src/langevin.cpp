#include "nlbath/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlbath/error.hpp"

namespace nlbath {

void PhysicalParams::validate() const {
    if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
    if (!(a > 0.0)) throw InvalidParameter("potential coefficient a must be positive");
    if (!(b > 0.0)) throw InvalidParameter("potential coefficient b must be positive");
    if (!(gamma_bar >= 0.0)) throw InvalidParameter("dissipation must be non-negative");
    if (!(temperature >= 0.0)) throw InvalidParameter("temperature must be non-negative");
    if (!(k_b > 0.0)) throw InvalidParameter("Boltzmann constant must be positive");
}

void ClassicalBathParams::validate() const {
    if (!(gamma1 > 0.0)) throw InvalidParameter("gamma1 must be positive");
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw InvalidParameter("temperature must be finite and non-negative");
    if (!(epsilon >= 0.0)) throw InvalidParameter("epsilon must be non-negative");
    if (!std::isfinite(omega)) throw InvalidParameter("omega must be finite");
}

ClassicalBathParams rescale(const PhysicalParams& params) {
    params.validate();
    ClassicalBathParams out;
    out.gamma1 = params.gamma_bar * std::sqrt(params.mass / params.a);
    out.temperature = params.b * params.k_b * params.temperature / (params.a * params.a);
    return out;
}

namespace {

inline double acceleration(double x, double v, double gamma1) noexcept {
    return x - x * x * x - gamma1 * v;
}

} // namespace

TrajectoryState step(const TrajectoryState& s, const ClassicalBathParams& p, double dt,
                     double noise) noexcept {
    const double kick = std::sqrt(2.0 * p.gamma1 * p.temperature * dt) * noise;
    const double a0 = acceleration(s.x, s.v, p.gamma1);
    const double xp = s.x + dt * s.v;
    const double vp = s.v + dt * a0 + kick;
    const double a1 = acceleration(xp, vp, p.gamma1);

    TrajectoryState next;
    next.x = s.x + 0.5 * dt * (s.v + vp);
    next.v = s.v + 0.5 * dt * (a0 + a1) + kick;
    next.phase = s.phase + p.epsilon * (s.x + next.x) * dt;
    next.t = s.t + dt;
    return next;
}

double proposal_half_width(double temperature) noexcept {
    // exp(-(V + 1/4)/T) < 1e-16 outside; never narrower than 3.
    const double reach = std::pow(4.0 * 37.0 * temperature, 0.25) + 1.0;
    return temperature <= 5.0 ? 3.0 : std::max(3.0, reach);
}

TrajectoryState sample_equilibrium(const ClassicalBathParams& params, RandomStream& rng) {
    TrajectoryState s;
    const double T = params.temperature;
    if (T == 0.0) {
        s.x = rng.coin() ? 1.0 : -1.0;
        return s;
    }
    const double half = proposal_half_width(T);
    constexpr double v_min = -0.25;
    for (;;) {
        const double x = rng.uniform(-half, half);
        if (rng.canonical() < std::exp(-(potential(x) - v_min) / T)) {
            s.x = x;
            break;
        }
    }
    s.v = std::sqrt(T) * rng.normal();
    return s;
}

TrajectoryState sample_equilibrium(const ClassicalBathParams& params, std::uint64_t seed) {
    RandomStream rng(seed);
    return sample_equilibrium(params, rng);
}

double kramers_rate(const ClassicalBathParams& params) {
    if (!(params.gamma1 > 0.0)) throw InvalidParameter("gamma1 must be positive");
    if (params.temperature == 0.0) return 0.0;
    const double prefactor = 1.0 / (std::numbers::sqrt2 * std::numbers::pi * params.gamma1);
    if (std::isinf(params.temperature)) return prefactor;
    return prefactor * std::exp(-1.0 / (4.0 * params.gamma1 * params.temperature));
}

} // namespace nlbath
