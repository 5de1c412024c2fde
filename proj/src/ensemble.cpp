#include "nlbath/ensemble.hpp"

#include <cmath>
#include <string>

#include "nlbath/error.hpp"

namespace nlbath {

std::size_t EnsembleOptions::n_steps() const {
    return static_cast<std::size_t>(std::llround(t_max / dt));
}

std::size_t EnsembleOptions::bytes_required() const {
    const double per_track = static_cast<double>(n_records()) * sizeof(double);
    const double tracks = static_cast<double>(n_realizations) * (record_phase ? 2.0 : 1.0);
    const double total = per_track * tracks;
    return total > 1.8e19 ? SIZE_MAX : static_cast<std::size_t>(total);
}

void EnsembleOptions::validate() const {
    if (n_realizations < 1) throw InvalidParameter("ensemble needs at least one realization");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be positive");
    if (!(t_max >= dt) || !std::isfinite(t_max)) throw InvalidParameter("t_max must be >= dt");
    if (record_stride < 1) throw InvalidParameter("record stride must be >= 1");
    if (bytes_required() > memory_budget_bytes) {
        throw CapacityError("ensemble needs " + std::to_string(bytes_required()) +
                            " bytes, budget is " + std::to_string(memory_budget_bytes));
    }
}

void simulate_realization(const ClassicalBathParams& params, const EnsembleOptions& options,
                          std::size_t index, std::span<double> x_out,
                          std::span<double> phase_out) {
    RandomStream rng(derive_seed(options.master_seed, index));
    TrajectoryState s = options.initial_state ? *options.initial_state
                                              : sample_equilibrium(params, rng);
    s.phase = 0.0;
    s.t = 0.0;

    const std::size_t steps = options.n_steps();
    const std::size_t stride = options.record_stride;
    const bool phases = !phase_out.empty();
    x_out[0] = s.x;
    if (phases) phase_out[0] = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        s = step(s, params, options.dt, rng.normal());
        if (k % stride == 0) {
            x_out[k / stride] = s.x;
            if (phases) phase_out[k / stride] = s.phase;
        }
    }
}

namespace {

TrajectoryEnsemble allocate(const ClassicalBathParams& params, const EnsembleOptions& options) {
    params.validate();
    options.validate();
    TrajectoryEnsemble e;
    e.params = params;
    e.n_realizations = options.n_realizations;
    e.n_records = options.n_records();
    e.dt = options.dt;
    e.record_dt = options.dt * static_cast<double>(options.record_stride);
    e.master_seed = options.master_seed;
    e.x.assign(e.n_realizations * e.n_records, 0.0);
    if (options.record_phase) e.phase.assign(e.x.size(), 0.0);
    return e;
}

std::span<double> slice(std::vector<double>& v, std::size_t i, std::size_t len) {
    if (v.empty()) return {};
    return {v.data() + i * len, len};
}

} // namespace

TrajectoryEnsemble simulate_ensemble(const ClassicalBathParams& params,
                                     const EnsembleOptions& options) {
    TrajectoryEnsemble e = allocate(params, options);
    const auto n = static_cast<long long>(e.n_realizations);
    const std::size_t len = e.n_records;
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        simulate_realization(params, options, idx, slice(e.x, idx, len),
                             slice(e.phase, idx, len));
    }
    return e;
}

TrajectoryEnsemble simulate_ensemble_serial(const ClassicalBathParams& params,
                                            const EnsembleOptions& options) {
    TrajectoryEnsemble e = allocate(params, options);
    for (std::size_t i = 0; i < e.n_realizations; ++i) {
        simulate_realization(params, options, i, slice(e.x, i, e.n_records),
                             slice(e.phase, i, e.n_records));
    }
    return e;
}

TrajectoryEnsemble simulate_ensemble(const ClassicalBathParams& params, std::size_t n,
                                     double dt, double t_max, std::uint64_t master_seed) {
    EnsembleOptions options;
    options.n_realizations = n;
    options.dt = dt;
    options.t_max = t_max;
    options.master_seed = master_seed;
    return simulate_ensemble(params, options);
}

double hopping_rate(const TrajectoryEnsemble& ensemble, double threshold) {
    if (ensemble.n_records < 2) throw InvalidParameter("need at least two recorded points");
    std::size_t hops = 0;
    for (std::size_t i = 0; i < ensemble.n_realizations; ++i) {
        int well = 0;
        for (double x : ensemble.positions(i)) {
            const int side = x > threshold ? 1 : (x < -threshold ? -1 : 0);
            if (side == 0) continue;
            if (well != 0 && side != well) ++hops;
            well = side;
        }
    }
    return static_cast<double>(hops) /
           (static_cast<double>(ensemble.n_realizations) * ensemble.t_max());
}

} // namespace nlbath
