#pragma once

#include <span>
#include <vector>

#include "nlbath/dephasing.hpp"
#include "nlbath/quantum.hpp"

namespace nlbath {

/// Two-level bath B (tunneling Delta, hbar = 1) damped by a boson reservoir,
/// probed by a resonant qubit A (Omega = Delta). Temperatures are in units
/// of Delta: t_tilde = T / Delta.
struct SpinBosonParams {
    double delta{20.0};
    double gamma_b{1.0};
    double epsilon{0.05};
    double t_tilde{1.0};

    void validate() const;

    /// tanh(1/(2 t_tilde)); 1 at t_tilde = 0.
    double polarization() const;
    /// [exp(1/t_tilde) - 1]^{-1}
    double n_bar() const;
    /// [(2 n_bar + 1) gamma_b]^{-1} = tanh(1/(2 t_tilde)) / gamma_b
    double tau_c() const;
    /// Excited (sigma1 = +1) population e^{-1/(2T)} / (2 cosh(1/(2T))).
    double n_up() const;
    double n_down() const { return 1.0 - n_up(); }
};

struct ValidityFlags {
    double delta_tau_c{0.0};
    double epsilon_tau_c{0.0};
    bool bath_rwa{true};     // delta * tau_c >= 10
    bool coupling_rwa{true}; // epsilon * tau_c <= 0.1
};

ValidityFlags validity(const SpinBosonParams& params);

/// Decoherence rate epsilon^2 tau_c = epsilon^2 tanh(1/(2 t_tilde)) / gamma_b.
double gamma_d(const SpinBosonParams& params);

/// Default RK4 step 1e-3 / max(gamma_b, epsilon, 1).
double default_quantum_dt(const SpinBosonParams& params);

/// Thermal qubit state (1 - tanh(1/(2 t_tilde)) sigma1)/2: populations
/// n_down, n_up on the sigma1 eigenstates, no coherences.
DensityMatrix thermal_state(double t_tilde);
DensityMatrix steady_state(const SpinBosonParams& params);

/// (|-1> + |1>)/sqrt(2), the sigma1 = +1 eigenstate.
DensityMatrix default_probe_state();

/// L rho = -gamma_b n [s- s+ rho + rho s- s+ - 2 s+ rho s-]
///         -gamma_b (n+1) [s+ s- rho + rho s+ s- - 2 s- rho s+]
/// with s+- the given ladder operators (sigma+-_B, possibly embedded).
ComplexMatrix dissipator(const ComplexMatrix& rho, const SpinBosonParams& params,
                         const ComplexMatrix& s_plus, const ComplexMatrix& s_minus);
/// Dissipator of the single bath qubit.
ComplexMatrix dissipator(const ComplexMatrix& rho_b, const SpinBosonParams& params);

/// -i Delta/2 [sigma1, rho] + L rho for the bath qubit alone.
ComplexMatrix master_rhs_B(const ComplexMatrix& rho_b, const SpinBosonParams& params);
Superoperator bath_generator(const SpinBosonParams& params);

/// Rotating-frame A-B equation:
/// -i eps [s+_A s-_B + s-_A s+_B, rho] + (1 (x) L) rho.
ComplexMatrix coupled_rhs(const ComplexMatrix& rho, const SpinBosonParams& params);
Superoperator coupled_generator(const SpinBosonParams& params);

/// <sigma3(0) sigma3(t)> in the steady state, by propagating rho_ss sigma3
/// with the bath master equation (quantum regression).
std::vector<Complex> two_time_correlation(const SpinBosonParams& params,
                                          std::span<const double> times, double dt = 0.0);

/// e^{-|t|/tau_c} [e^{-i Delta t} n_up + e^{i Delta t} n_down].
Complex two_time_correlation_closed_form(const SpinBosonParams& params, double t);

/// 2 tau n_up / (1 + tau^2 (w - Delta)^2) + 2 tau n_down / (1 + tau^2 (w + Delta)^2).
double spectral_function(const SpinBosonParams& params, double omega);
std::vector<double> spectral_function(const SpinBosonParams& params,
                                      std::span<const double> omega_grid);

/// Expansion rho_A = rho_th + e^{-G t}(c1 sigma2 + c3 sigma3) + e^{-2 G t} c2 sigma1,
/// G = gamma_d. Each coefficient is Tr[(rho_A0 - rho_th) sigma^k]/2 for the
/// Pauli matrix it multiplies.
struct AnalyticSolutionCoeffs {
    double c1{0.0}; // sigma2
    double c2{0.0}; // sigma1
    double c3{0.0}; // sigma3
    double gamma_d{0.0};
};

AnalyticSolutionCoeffs analytic_coefficients(const SpinBosonParams& params,
                                             const DensityMatrix& rho_a0);
/// Weak-coupling (epsilon tau_c << 1) approximation of the probe state.
DensityMatrix analytic_solution(const SpinBosonParams& params, const DensityMatrix& rho_a0,
                                double t);

struct ProbeOptions {
    double t_max{100.0};
    double dt{0.0}; // 0 selects default_quantum_dt
    std::size_t record_stride{100};
};

struct ProbeCoherence {
    std::vector<double> t;
    std::vector<double> coherence; // sqrt(2 Tr rho_A^2 - 1)
    std::vector<double> m_sigma1;  // Tr[rho_A sigma1]
    double equilibrium_m{0.0};     // -tanh(1/(2 t_tilde))
    double equilibrium_coherence{0.0};
    double max_trace_drift{0.0};
    double max_hermiticity_drift{0.0};
    double max_recorded_trace_error{0.0};
    double max_recorded_hermiticity_error{0.0};
    double min_eigenvalue{1.0};

    /// (m(t) - m_eq) / (m(0) - m_eq), exponential at rate 2 gamma_d.
    std::vector<double> shifted_sigma1() const;
};

/// Integrates the coupled equation from rho_A0 (x) rho_ss(t_tilde).
ProbeCoherence simulate_probe_coherence(const SpinBosonParams& params,
                                        const DensityMatrix& rho_a0, const ProbeOptions& options);

/// Decay rate of the shifted sigma1 coefficient.
RateFit fit_relaxation_rate(const ProbeCoherence& series);

} // namespace nlbath
