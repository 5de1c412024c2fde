#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nlbath/langevin.hpp"

namespace nlbath {

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{2} << 30; // 2 GiB

struct EnsembleOptions {
    std::size_t n_realizations{1};
    double dt{0.01};
    double t_max{1.0};
    std::uint64_t master_seed{0};
    std::size_t record_stride{1}; // record every k-th integration step
    bool record_phase{true};
    std::size_t memory_budget_bytes{kDefaultMemoryBudget};
    /// Replaces equilibrium sampling when set (all realizations start here).
    std::optional<TrajectoryState> initial_state{};

    std::size_t n_steps() const;
    std::size_t n_records() const { return n_steps() / record_stride + 1; }
    std::size_t bytes_required() const;
    void validate() const;
};

/// Recorded trajectories on the uniform grid t_k = k * record_dt,
/// stored realization-major.
struct TrajectoryEnsemble {
    ClassicalBathParams params{};
    std::size_t n_realizations{0};
    std::size_t n_records{0};
    double dt{0.0};        // integration step
    double record_dt{0.0}; // spacing of the recorded grid
    std::uint64_t master_seed{0};
    std::vector<double> x;
    std::vector<double> phase; // empty when phases were not recorded

    double t_max() const { return record_dt * static_cast<double>(n_records - 1); }
    double time(std::size_t k) const { return record_dt * static_cast<double>(k); }
    bool has_phases() const { return !phase.empty(); }

    std::span<const double> positions(std::size_t i) const {
        return {x.data() + i * n_records, n_records};
    }
    std::span<const double> phases(std::size_t i) const {
        return {phase.data() + i * n_records, n_records};
    }
};

/// Integrates realization `index`; a pure function of (params, options, index).
void simulate_realization(const ClassicalBathParams& params, const EnsembleOptions& options,
                          std::size_t index, std::span<double> x_out,
                          std::span<double> phase_out);

/// OpenMP kernel: realizations are distributed over threads, each writing
/// its own slice of the preallocated grid.
TrajectoryEnsemble simulate_ensemble(const ClassicalBathParams& params,
                                     const EnsembleOptions& options);

/// Serial reference producing bit-identical output.
TrajectoryEnsemble simulate_ensemble_serial(const ClassicalBathParams& params,
                                            const EnsembleOptions& options);

TrajectoryEnsemble simulate_ensemble(const ClassicalBathParams& params, std::size_t n,
                                     double dt, double t_max, std::uint64_t master_seed);

/// Well-to-well transitions per unit time per realization, detected with a
/// hysteresis band: a hop is counted when x reaches the opposite side of
/// +-threshold from the last well visited.
double hopping_rate(const TrajectoryEnsemble& ensemble, double threshold = 0.5);

} // namespace nlbath
