#include "nlbath/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "nlbath/error.hpp"

namespace nlbath {

namespace {
constexpr Complex I{0.0, 1.0};
}

ComplexMatrix identity(std::size_t d) {
    const auto n = static_cast<Eigen::Index>(d);
    return ComplexMatrix::Identity(n, n);
}

ComplexMatrix pauli(int k) {
    ComplexMatrix s = ComplexMatrix::Zero(2, 2);
    switch (k) {
    case 1:
        s(0, 1) = 1.0;
        s(1, 0) = 1.0;
        break;
    case 2:
        s(0, 1) = I;
        s(1, 0) = -I;
        break;
    case 3:
        s(0, 0) = -1.0;
        s(1, 1) = 1.0;
        break;
    default:
        throw InvalidParameter("Pauli axis must be 1, 2 or 3");
    }
    return s;
}

ComplexMatrix embed(const ComplexMatrix& op, std::size_t slot, std::size_t n_slots) {
    if (slot >= n_slots) throw InvalidParameter("tensor slot out of range");
    ComplexMatrix out = slot == 0 ? op : identity(2);
    for (std::size_t s = 1; s < n_slots; ++s) out = tensor(out, s == slot ? op : identity(2));
    return out;
}

ComplexMatrix pauli(int k, std::size_t slot, std::size_t n_slots) {
    return embed(pauli(k), slot, n_slots);
}

ComplexMatrix sigma_plus() { return 0.5 * (pauli(2) + I * pauli(3)); }
ComplexMatrix sigma_minus() { return 0.5 * (pauli(2) - I * pauli(3)); }

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

StateDiagnostics diagnose(const ComplexMatrix& rho) {
    StateDiagnostics d;
    d.trace_error = std::abs(rho.trace() - 1.0);
    const ComplexMatrix adj = rho.adjoint();
    d.hermiticity_error = (rho - adj).cwiseAbs().maxCoeff();
    const ComplexMatrix herm = 0.5 * (rho + adj);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = solver.eigenvalues().minCoeff();
    return d;
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || (rho_.rows() != 2 && rho_.rows() != 4))
        throw InvalidParameter("density matrix must be 2x2 or 4x4");
    if (!rho_.allFinite()) throw InvalidParameter("density matrix has non-finite entries");
    const StateDiagnostics d = diagnose(rho_);
    if (d.hermiticity_error > kHermiticityTolerance)
        throw InvalidParameter("density matrix is not Hermitian");
    if (d.trace_error > kTraceTolerance) throw InvalidParameter("density matrix trace is not 1");
    if (d.min_eigenvalue < -kPositivityTolerance)
        throw InvalidParameter("density matrix is not positive semidefinite");
}

DensityMatrix DensityMatrix::pure(const ComplexVector& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw InvalidParameter("state vector must be nonzero");
    const ComplexVector u = psi / norm;
    return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t d) {
    return DensityMatrix(identity(d) / static_cast<double>(d));
}

ComplexMatrix partial_trace_B(const ComplexMatrix& rho) {
    if (rho.rows() != 4 || rho.cols() != 4)
        throw InvalidParameter("partial trace expects a two-qubit (4x4) operator");
    ComplexMatrix out(2, 2);
    for (Eigen::Index a = 0; a < 2; ++a)
        for (Eigen::Index c = 0; c < 2; ++c) out(a, c) = rho(2 * a, 2 * c) + rho(2 * a + 1, 2 * c + 1);
    return out;
}

DensityMatrix partial_trace_B(const DensityMatrix& rho) {
    return DensityMatrix(partial_trace_B(rho.matrix()));
}

double purity_coherence(const ComplexMatrix& rho) {
    const double purity = (rho * rho).trace().real();
    return std::sqrt(std::max(0.0, 2.0 * purity - 1.0));
}

double purity_coherence(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw InvalidParameter("purity coherence is defined for a qubit");
    return purity_coherence(rho.matrix());
}

Superoperator::Superoperator(std::size_t d, ComplexMatrix generator)
    : d_(d), gen_(std::move(generator)) {
    const auto n = static_cast<Eigen::Index>(d * d);
    if (gen_.rows() != n || gen_.cols() != n)
        throw InvalidParameter("generator shape does not match dimension");
}

ComplexMatrix Superoperator::apply(const ComplexMatrix& rho) const {
    const auto n = static_cast<Eigen::Index>(d_);
    if (rho.rows() != n || rho.cols() != n) throw InvalidParameter("operator dimension mismatch");
    const ComplexVector out = gen_ * Eigen::Map<const ComplexVector>(rho.data(), n * n);
    return Eigen::Map<const ComplexMatrix>(out.data(), n, n);
}

ComplexMatrix Superoperator::rk4_step_matrix(double dt) const {
    const ComplexMatrix hl = dt * gen_;
    ComplexMatrix term = ComplexMatrix::Identity(gen_.rows(), gen_.cols());
    ComplexMatrix sum = term;
    for (int k = 1; k <= 4; ++k) {
        term = (hl * term) / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

Superoperator operator+(const Superoperator& a, const Superoperator& b) {
    if (a.dim() != b.dim()) throw InvalidParameter("superoperator dimension mismatch");
    return Superoperator(a.dim(), a.generator() + b.generator());
}

ComplexMatrix rk4_step(const Superoperator& rhs, const ComplexMatrix& rho, double dt) {
    const ComplexMatrix k1 = rhs.apply(rho);
    const ComplexMatrix k2 = rhs.apply(rho + 0.5 * dt * k1);
    const ComplexMatrix k3 = rhs.apply(rho + 0.5 * dt * k2);
    const ComplexMatrix k4 = rhs.apply(rho + dt * k3);
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

/// Orthonormal (Hilbert-Schmidt) basis of d x d Hermitian matrices: E_kk,
/// (E_kl + E_lk)/sqrt2 and i(E_kl - E_lk)/sqrt2 for k < l. Coordinates of a
/// Hermitian matrix in it are real.
struct HermitianBasis {
    std::vector<ComplexMatrix> elements;
    std::vector<std::size_t> diagonal; // indices of the E_kk elements
};

HermitianBasis hermitian_basis(std::size_t d) {
    HermitianBasis basis;
    const auto n = static_cast<Eigen::Index>(d);
    const double r = 1.0 / std::sqrt(2.0);
    for (Eigen::Index k = 0; k < n; ++k) {
        ComplexMatrix e = ComplexMatrix::Zero(n, n);
        e(k, k) = 1.0;
        basis.diagonal.push_back(basis.elements.size());
        basis.elements.push_back(std::move(e));
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = k + 1; l < n; ++l) {
            ComplexMatrix sym = ComplexMatrix::Zero(n, n);
            sym(k, l) = r;
            sym(l, k) = r;
            ComplexMatrix anti = ComplexMatrix::Zero(n, n);
            anti(k, l) = Complex(0.0, r);
            anti(l, k) = Complex(0.0, -r);
            basis.elements.push_back(std::move(sym));
            basis.elements.push_back(std::move(anti));
        }
    }
    return basis;
}

double coordinate(const ComplexMatrix& b, const ComplexMatrix& x) {
    return (b * x).trace().real();
}

/// Real matrix of the generator in the Hermitian basis, or nullopt when the
/// generator does not map Hermitian matrices to Hermitian matrices.
std::optional<Eigen::MatrixXd> real_generator(const Superoperator& rhs, const HermitianBasis& basis) {
    const auto n = static_cast<Eigen::Index>(basis.elements.size());
    Eigen::MatrixXd g(n, n);
    double scale = 0.0;
    double leak = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        const ComplexMatrix image = rhs.apply(basis.elements[static_cast<std::size_t>(j)]);
        leak = std::max(leak, (image - image.adjoint()).cwiseAbs().maxCoeff());
        scale = std::max(scale, image.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < n; ++i)
            g(i, j) = coordinate(basis.elements[static_cast<std::size_t>(i)], image);
    }
    if (leak > 1e-12 * std::max(1.0, scale)) return std::nullopt;
    return g;
}

Eigen::MatrixXd rk4_polynomial(const Eigen::MatrixXd& gen, double dt) {
    const Eigen::MatrixXd hl = dt * gen;
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(gen.rows(), gen.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 4; ++k) {
        term = (hl * term) / static_cast<double>(k);
        sum += term;
    }
    return sum;
}

class TrajectoryRecorder {
public:
    TrajectoryRecorder(StateTrajectory& traj, const MasterOptions& options)
        : traj_(traj), options_(options) {}

    void operator()(std::size_t k, const ComplexMatrix& rho) {
        const double t = options_.dt * static_cast<double>(k);
        const StateDiagnostics diag = diagnose(rho);
        traj_.min_eigenvalue = std::min(traj_.min_eigenvalue, diag.min_eigenvalue);
        traj_.max_recorded_trace_error = std::max(traj_.max_recorded_trace_error, diag.trace_error);
        traj_.max_recorded_hermiticity_error =
            std::max(traj_.max_recorded_hermiticity_error, diag.hermiticity_error);
        if (diag.min_eigenvalue < -options_.failure_tolerance)
            throw IntegrationFailure("state lost positivity", t);
        traj_.t.push_back(t);
        traj_.states.push_back(rho);
    }

private:
    StateTrajectory& traj_;
    const MasterOptions& options_;
};

void check_drift(double drift, bool finite, const MasterOptions& options, std::size_t k) {
    if (!(drift <= options.failure_tolerance) || !finite)
        throw IntegrationFailure("trace drift " + std::to_string(drift),
                                 options.dt * static_cast<double>(k));
}

/// Hermiticity-preserving generators: real coordinates, so every step stays
/// exactly Hermitian and only the trace needs renormalizing.
void integrate_hermitian(const Eigen::MatrixXd& gen, const HermitianBasis& basis,
                         const DensityMatrix& rho0, const MasterOptions& options,
                         std::size_t steps, StateTrajectory& traj) {
    const auto n = static_cast<Eigen::Index>(basis.elements.size());
    const Eigen::MatrixXd step = rk4_polynomial(gen, options.dt);
    Eigen::VectorXd r(n), next(n);
    for (Eigen::Index i = 0; i < n; ++i)
        r(i) = coordinate(basis.elements[static_cast<std::size_t>(i)], rho0.matrix());

    auto to_matrix = [&](const Eigen::VectorXd& coords) {
        ComplexMatrix rho = ComplexMatrix::Zero(rho0.matrix().rows(), rho0.matrix().cols());
        for (Eigen::Index i = 0; i < n; ++i) rho += coords(i) * basis.elements[static_cast<std::size_t>(i)];
        return rho;
    };

    TrajectoryRecorder record(traj, options);
    record(0, rho0.matrix());
    for (std::size_t k = 1; k <= steps; ++k) {
        next.noalias() = step * r;
        double tr = 0.0;
        for (std::size_t idx : basis.diagonal) tr += next(static_cast<Eigen::Index>(idx));
        const double drift = std::abs(tr - 1.0);
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
        check_drift(drift, std::isfinite(tr), options, k);
        r = next / tr;
        if (k % options.record_stride == 0 || k == steps) record(k, to_matrix(r));
    }
}

void integrate_general(const Superoperator& rhs, const DensityMatrix& rho0,
                       const MasterOptions& options, std::size_t steps, StateTrajectory& traj) {
    const auto d = static_cast<Eigen::Index>(rho0.dim());
    const ComplexMatrix step = rhs.rk4_step_matrix(options.dt);
    ComplexVector v = Eigen::Map<const ComplexVector>(rho0.matrix().data(), d * d);
    ComplexVector next(d * d);
    ComplexMatrix rho = rho0.matrix();

    TrajectoryRecorder record(traj, options);
    record(0, rho);
    for (std::size_t k = 1; k <= steps; ++k) {
        next.noalias() = step * v;
        Eigen::Map<ComplexMatrix> m(next.data(), d, d);
        const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
        rho = 0.5 * (m + m.adjoint());
        const Complex tr = rho.trace();
        const double drift = std::abs(tr - 1.0);
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
        traj.max_hermiticity_drift = std::max(traj.max_hermiticity_drift, herm);
        check_drift(drift, rho.allFinite(), options, k);
        rho /= tr.real();
        v = Eigen::Map<const ComplexVector>(rho.data(), d * d);
        if (k % options.record_stride == 0 || k == steps) record(k, rho);
    }
}

} // namespace

StateTrajectory integrate_master(const Superoperator& rhs, const DensityMatrix& rho0,
                                 const MasterOptions& options) {
    if (!(options.dt > 0.0)) throw InvalidParameter("dt must be positive");
    if (!(options.t_max >= 0.0)) throw InvalidParameter("t_max must be non-negative");
    if (options.record_stride < 1) throw InvalidParameter("record stride must be >= 1");
    if (rhs.dim() != rho0.dim()) throw InvalidParameter("state and generator dimensions differ");

    const auto steps = static_cast<std::size_t>(std::llround(options.t_max / options.dt));
    StateTrajectory traj;
    const std::size_t n_records = steps / options.record_stride + 2;
    traj.t.reserve(n_records);
    traj.states.reserve(n_records);

    const HermitianBasis basis = hermitian_basis(rho0.dim());
    if (const auto gen = real_generator(rhs, basis))
        integrate_hermitian(*gen, basis, rho0, options, steps, traj);
    else
        integrate_general(rhs, rho0, options, steps, traj);
    return traj;
}

std::vector<ComplexMatrix> propagate(const Superoperator& rhs, const ComplexMatrix& op0,
                                     std::span<const double> times, double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("dt must be positive");
    const auto d = static_cast<Eigen::Index>(rhs.dim());
    if (op0.rows() != d || op0.cols() != d) throw InvalidParameter("operator dimension mismatch");

    const ComplexMatrix step = rhs.rk4_step_matrix(dt);
    ComplexVector v = Eigen::Map<const ComplexVector>(op0.data(), d * d);
    ComplexVector next(d * d);
    std::size_t done = 0; // full steps taken
    std::vector<ComplexMatrix> out;
    out.reserve(times.size());
    double last = 0.0;
    for (double t : times) {
        if (!(t >= last)) throw InvalidParameter("sample times must be nondecreasing and >= 0");
        last = t;
        const auto target = static_cast<std::size_t>(std::floor(t / dt + 1e-9));
        for (; done < target; ++done) {
            next.noalias() = step * v;
            v.swap(next);
        }
        const double rest = t - dt * static_cast<double>(done);
        ComplexVector sample = v;
        if (rest > 1e-12 * dt) sample = rhs.rk4_step_matrix(rest) * v;
        out.emplace_back(Eigen::Map<const ComplexMatrix>(sample.data(), d, d));
    }
    return out;
}

} // namespace nlbath
