#include "nlbath/spin_boson.hpp"

#include <algorithm>
#include <cmath>

#include "nlbath/error.hpp"

namespace nlbath {

namespace {
constexpr Complex I{0.0, 1.0};

double half_inverse(double t_tilde) { return 0.5 / t_tilde; } // inf at 0
} // namespace

void SpinBosonParams::validate() const {
    if (!(delta > 0.0)) throw InvalidParameter("delta must be positive");
    // gamma_b = 0 (undamped bath) is allowed here; quantities that divide by
    // gamma_b check it themselves.
    if (!(gamma_b >= 0.0) || !std::isfinite(gamma_b))
        throw InvalidParameter("gamma_b must be finite and non-negative");
    if (!(epsilon >= 0.0)) throw InvalidParameter("epsilon must be non-negative");
    if (!(t_tilde >= 0.0) || !std::isfinite(t_tilde))
        throw InvalidParameter("t_tilde must be finite and non-negative");
}

double SpinBosonParams::polarization() const { return std::tanh(half_inverse(t_tilde)); }

double SpinBosonParams::n_bar() const { return 1.0 / std::expm1(1.0 / t_tilde); }

double SpinBosonParams::tau_c() const { return polarization() / gamma_b; }

double SpinBosonParams::n_up() const { return 1.0 / (1.0 + std::exp(1.0 / t_tilde)); }

ValidityFlags validity(const SpinBosonParams& p) {
    ValidityFlags f;
    f.delta_tau_c = p.delta * p.tau_c();
    f.epsilon_tau_c = p.epsilon * p.tau_c();
    f.bath_rwa = f.delta_tau_c >= 10.0;
    f.coupling_rwa = f.epsilon_tau_c <= 0.1;
    return f;
}

double gamma_d(const SpinBosonParams& p) {
    if (!(p.gamma_b > 0.0)) throw InvalidParameter("gamma_b must be positive");
    return p.epsilon * p.epsilon * p.polarization() / p.gamma_b;
}

double default_quantum_dt(const SpinBosonParams& p) {
    return 1e-3 / std::max({p.gamma_b, p.epsilon, 1.0});
}

DensityMatrix thermal_state(double t_tilde) {
    const double pol = std::tanh(half_inverse(t_tilde));
    return DensityMatrix(0.5 * (identity(2) - pol * pauli(1)));
}

DensityMatrix steady_state(const SpinBosonParams& p) { return thermal_state(p.t_tilde); }

DensityMatrix default_probe_state() {
    ComplexVector psi(2);
    psi << 1.0, 1.0;
    return DensityMatrix::pure(psi);
}

ComplexMatrix dissipator(const ComplexMatrix& rho, const SpinBosonParams& p,
                         const ComplexMatrix& sp, const ComplexMatrix& sm) {
    const double n = p.n_bar();
    const ComplexMatrix mp = sm * sp;
    const ComplexMatrix pm = sp * sm;
    const ComplexMatrix absorb = mp * rho + rho * mp - 2.0 * sp * rho * sm;
    const ComplexMatrix emit = pm * rho + rho * pm - 2.0 * sm * rho * sp;
    return -p.gamma_b * n * absorb - p.gamma_b * (n + 1.0) * emit;
}

ComplexMatrix dissipator(const ComplexMatrix& rho_b, const SpinBosonParams& p) {
    if (rho_b.rows() != 2 || rho_b.cols() != 2)
        throw InvalidParameter("bath dissipator acts on a 2x2 operator");
    return dissipator(rho_b, p, sigma_plus(), sigma_minus());
}

ComplexMatrix master_rhs_B(const ComplexMatrix& rho_b, const SpinBosonParams& p) {
    return -I * (0.5 * p.delta) * commutator(pauli(1), rho_b) + dissipator(rho_b, p);
}

Superoperator bath_generator(const SpinBosonParams& p) {
    p.validate();
    return Superoperator::from_map(2, [&](const ComplexMatrix& r) { return master_rhs_B(r, p); });
}

namespace {

struct CoupledOperators {
    ComplexMatrix flip_flop;
    ComplexMatrix sp_b;
    ComplexMatrix sm_b;
};

CoupledOperators coupled_operators() {
    const ComplexMatrix sp = sigma_plus();
    const ComplexMatrix sm = sigma_minus();
    return {tensor(sp, sm) + tensor(sm, sp), embed(sp, 1, 2), embed(sm, 1, 2)};
}

ComplexMatrix coupled_rhs_impl(const ComplexMatrix& rho, const SpinBosonParams& p,
                               const CoupledOperators& ops) {
    return -I * p.epsilon * commutator(ops.flip_flop, rho) + dissipator(rho, p, ops.sp_b, ops.sm_b);
}

} // namespace

ComplexMatrix coupled_rhs(const ComplexMatrix& rho, const SpinBosonParams& p) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw InvalidParameter("coupled equation acts on a 4x4 operator");
    return coupled_rhs_impl(rho, p, coupled_operators());
}

Superoperator coupled_generator(const SpinBosonParams& p) {
    p.validate();
    const CoupledOperators ops = coupled_operators();
    return Superoperator::from_map(
        4, [&](const ComplexMatrix& r) { return coupled_rhs_impl(r, p, ops); });
}

std::vector<Complex> two_time_correlation(const SpinBosonParams& p, std::span<const double> times,
                                          double dt) {
    const Superoperator gen = bath_generator(p);
    const ComplexMatrix s3 = pauli(3);
    const ComplexMatrix seed = steady_state(p).matrix() * s3;
    const auto ops = propagate(gen, seed, times, dt > 0.0 ? dt : default_quantum_dt(p));
    std::vector<Complex> out;
    out.reserve(ops.size());
    for (const auto& op : ops) out.push_back((s3 * op).trace());
    return out;
}

Complex two_time_correlation_closed_form(const SpinBosonParams& p, double t) {
    const double envelope = std::exp(-std::abs(t) / p.tau_c());
    return envelope * (std::exp(-I * (p.delta * t)) * p.n_up() +
                       std::exp(I * (p.delta * t)) * p.n_down());
}

double spectral_function(const SpinBosonParams& p, double omega) {
    const double tau = p.tau_c();
    const double up = omega - p.delta;
    const double down = omega + p.delta;
    return 2.0 * tau * p.n_up() / (1.0 + tau * tau * up * up) +
           2.0 * tau * p.n_down() / (1.0 + tau * tau * down * down);
}

std::vector<double> spectral_function(const SpinBosonParams& p,
                                      std::span<const double> omega_grid) {
    std::vector<double> out(omega_grid.size());
    std::transform(omega_grid.begin(), omega_grid.end(), out.begin(),
                   [&](double w) { return spectral_function(p, w); });
    return out;
}

AnalyticSolutionCoeffs analytic_coefficients(const SpinBosonParams& p,
                                             const DensityMatrix& rho_a0) {
    if (rho_a0.dim() != 2) throw InvalidParameter("probe state must be a qubit");
    const ComplexMatrix diff = rho_a0.matrix() - steady_state(p).matrix();
    auto coeff = [&](int k) { return 0.5 * (diff * pauli(k)).trace().real(); };
    return {coeff(2), coeff(1), coeff(3), gamma_d(p)};
}

DensityMatrix analytic_solution(const SpinBosonParams& p, const DensityMatrix& rho_a0, double t) {
    const AnalyticSolutionCoeffs c = analytic_coefficients(p, rho_a0);
    const double slow = std::exp(-c.gamma_d * t);
    const double fast = std::exp(-2.0 * c.gamma_d * t);
    ComplexMatrix rho = steady_state(p).matrix() + slow * (c.c1 * pauli(2) + c.c3 * pauli(3)) +
                        fast * c.c2 * pauli(1);
    return DensityMatrix(std::move(rho));
}

std::vector<double> ProbeCoherence::shifted_sigma1() const {
    std::vector<double> out(m_sigma1.size());
    if (m_sigma1.empty()) return out;
    const double base = m_sigma1.front() - equilibrium_m;
    if (base == 0.0) throw InsufficientDecay("initial sigma1 coefficient is already thermal");
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (m_sigma1[k] - equilibrium_m) / base;
    return out;
}

ProbeCoherence simulate_probe_coherence(const SpinBosonParams& p, const DensityMatrix& rho_a0,
                                        const ProbeOptions& options) {
    p.validate();
    if (rho_a0.dim() != 2) throw InvalidParameter("probe state must be a qubit");
    const Superoperator gen = coupled_generator(p);
    const DensityMatrix rho0(tensor(rho_a0.matrix(), steady_state(p).matrix()));

    MasterOptions mo;
    mo.dt = options.dt > 0.0 ? options.dt : default_quantum_dt(p);
    mo.t_max = options.t_max;
    mo.record_stride = options.record_stride;
    const StateTrajectory traj = integrate_master(gen, rho0, mo);

    ProbeCoherence out;
    out.t = traj.t;
    out.coherence.reserve(traj.t.size());
    out.m_sigma1.reserve(traj.t.size());
    const ComplexMatrix s1 = pauli(1);
    for (const auto& rho : traj.states) {
        const ComplexMatrix rho_a = partial_trace_B(rho);
        out.coherence.push_back(purity_coherence(rho_a));
        out.m_sigma1.push_back((rho_a * s1).trace().real());
    }
    out.equilibrium_m = -p.polarization();
    out.equilibrium_coherence = p.polarization();
    out.max_trace_drift = traj.max_trace_drift;
    out.max_hermiticity_drift = traj.max_hermiticity_drift;
    out.max_recorded_trace_error = traj.max_recorded_trace_error;
    out.max_recorded_hermiticity_error = traj.max_recorded_hermiticity_error;
    out.min_eigenvalue = traj.min_eigenvalue;
    return out;
}

RateFit fit_relaxation_rate(const ProbeCoherence& series) {
    const std::vector<double> shifted = series.shifted_sigma1();
    return fit_decoherence_rate(series.t, shifted);
}

} // namespace nlbath
