#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace nlbath {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Qubit basis is ordered {|-1>, |1>} with sigma3 |+-1> = +-|+-1>, i.e.
// sigma3 = diag(-1, 1). sigma2 is fixed by sigma1 sigma2 = i sigma3.
// Multi-qubit operators use slot order (A, B): a (x) b acts on A first.

ComplexMatrix identity(std::size_t d);

/// sigma^k, k in {1, 2, 3}.
ComplexMatrix pauli(int k);
/// sigma^k on `slot` of an `n_slots`-qubit register.
ComplexMatrix pauli(int k, std::size_t slot, std::size_t n_slots);

/// (sigma2 + i sigma3)/2 and (sigma2 - i sigma3)/2. These raise/lower the
/// eigenstates of sigma1: sigma+ sigma- = (1 + sigma1)/2.
ComplexMatrix sigma_plus();
ComplexMatrix sigma_minus();

/// Places a single-qubit operator on `slot`, identity elsewhere.
ComplexMatrix embed(const ComplexMatrix& op, std::size_t slot, std::size_t n_slots);

/// Kronecker product a (x) b.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

/// Deviations of a matrix from being a state.
struct StateDiagnostics {
    double trace_error{0.0};       // |Tr rho - 1|
    double hermiticity_error{0.0}; // max |rho - rho^dagger|
    double min_eigenvalue{0.0};    // of the Hermitian part
};

StateDiagnostics diagnose(const ComplexMatrix& rho);

/// A d x d density matrix (d = 2 or 4) satisfying the state invariants.
class DensityMatrix {
public:
    static constexpr double kHermiticityTolerance = 1e-10;
    static constexpr double kTraceTolerance = 1e-10;
    static constexpr double kPositivityTolerance = 1e-9;

    /// Validates; throws InvalidParameter on a violated invariant.
    explicit DensityMatrix(ComplexMatrix rho);

    static DensityMatrix pure(const ComplexVector& psi);
    static DensityMatrix maximally_mixed(std::size_t d);

    const ComplexMatrix& matrix() const noexcept { return rho_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(rho_.rows()); }
    Complex expectation(const ComplexMatrix& op) const { return (rho_ * op).trace(); }

private:
    ComplexMatrix rho_;
};

/// Traces out slot B of a two-qubit matrix (exact for any 4 x 4 input).
ComplexMatrix partial_trace_B(const ComplexMatrix& rho);
DensityMatrix partial_trace_B(const DensityMatrix& rho);

/// sqrt(2 Tr rho^2 - 1); tiny negative radicands from roundoff clamp to 0.
double purity_coherence(const DensityMatrix& rho);
double purity_coherence(const ComplexMatrix& rho);

/// Linear map on d x d matrices, stored as its d^2 x d^2 matrix acting on
/// column-major vec(rho).
class Superoperator {
public:
    Superoperator(std::size_t d, ComplexMatrix generator);

    /// Tabulates a linear map by applying it to the matrix units E_ij.
    template <class Map>
    static Superoperator from_map(std::size_t d, Map&& map) {
        ComplexMatrix gen(d * d, d * d);
        for (std::size_t col = 0; col < d * d; ++col) {
            ComplexMatrix unit = ComplexMatrix::Zero(d, d);
            unit(col % d, col / d) = 1.0;
            const ComplexMatrix image = map(unit);
            gen.col(col) = Eigen::Map<const ComplexVector>(image.data(), d * d);
        }
        return Superoperator(d, std::move(gen));
    }

    std::size_t dim() const noexcept { return d_; }
    const ComplexMatrix& generator() const noexcept { return gen_; }
    ComplexMatrix apply(const ComplexMatrix& rho) const;

    /// The classical RK4 update for d rho/dt = L rho is the fixed polynomial
    /// 1 + hL + (hL)^2/2 + (hL)^3/6 + (hL)^4/24.
    ComplexMatrix rk4_step_matrix(double dt) const;

private:
    std::size_t d_;
    ComplexMatrix gen_;
};

Superoperator operator+(const Superoperator& a, const Superoperator& b);

/// One explicit four-stage RK4 step, evaluating the generator at each stage.
ComplexMatrix rk4_step(const Superoperator& rhs, const ComplexMatrix& rho, double dt);

struct MasterOptions {
    double dt{1e-3};
    double t_max{1.0};
    std::size_t record_stride{1};
    double failure_tolerance{1e-6};
};

struct StateTrajectory {
    std::vector<double> t;
    std::vector<ComplexMatrix> states;
    double max_trace_drift{0.0};        // per step, before renormalization
    double max_hermiticity_drift{0.0};  // per step, before re-Hermitization
    double min_eigenvalue{1.0};         // over recorded states
    double max_recorded_trace_error{0.0};
    double max_recorded_hermiticity_error{0.0};
};

/// Fixed-step RK4 for a linear master equation. Generators that map
/// Hermitian matrices to Hermitian matrices are stepped in real coordinates
/// of a Hermitian basis, so every step is exactly Hermitian; others are
/// re-Hermitized as (rho + rho^dagger)/2 after each step. The trace is
/// renormalized every step and recorded states are checked for positivity. Throws IntegrationFailure when the trace drift
/// or negativity exceeds options.failure_tolerance.
StateTrajectory integrate_master(const Superoperator& rhs, const DensityMatrix& rho0,
                                 const MasterOptions& options);

/// Plain linear propagation of an arbitrary (possibly non-Hermitian)
/// operator, sampled at nondecreasing `times` >= 0. No state hygiene.
std::vector<ComplexMatrix> propagate(const Superoperator& rhs, const ComplexMatrix& op0,
                                     std::span<const double> times, double dt);

} // namespace nlbath
