#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nlbath/ensemble.hpp"

namespace nlbath {

struct AutocorrelationOptions {
    /// Average x(s) x(s + t) over all reference times s (Wiener-Khinchin
    /// style) instead of only s = 0. Off by default.
    bool time_average{false};
    /// Largest lag kept; defaults to the full record.
    std::optional<double> max_lag{};
    /// Realizations are split into this many contiguous batches; batch means
    /// give the spectrum's standard errors.
    std::size_t n_batches{20};
};

/// Stationary autocorrelation <x(0) x(t)> on the lag grid t_k = k * lag_dt.
struct AutocorrelationEstimate {
    double lag_dt{0.0};
    std::vector<double> values;
    std::vector<double> std_error;
    std::size_t n_realizations{0};
    double temperature{0.0};
    bool time_averaged{false};
    std::size_t n_batches{0};
    std::vector<double> batch_values; // batch-major, n_batches x size()

    std::size_t size() const { return values.size(); }
    double lag(std::size_t k) const { return lag_dt * static_cast<double>(k); }
    double t_max() const { return lag(size() - 1); }
    std::span<const double> batch(std::size_t b) const {
        return {batch_values.data() + b * size(), size()};
    }
};

struct CorrelationTime {
    double value{0.0};
    bool resolved{false}; // false: no 1/e crossing inside the record, value = t_max
};

struct SpectrumEstimate {
    std::vector<double> omega;
    std::vector<double> intensity;
    std::vector<double> std_error;
    double temperature{0.0};
    double i_zero{0.0};
    double i_zero_stderr{0.0};
    double k_zero{0.0}; // I(0,T)/T, NaN at T = 0
    double k_zero_stderr{0.0};
    CorrelationTime correlation_time{};
    /// Fraction of the integrated |C_x| lying beyond t_max/2.
    double tail_fraction{0.0};
    bool cutoff_warning{false};
};

inline constexpr double kCutoffWarningFraction = 0.05;

/// Ensemble autocorrelation; parallel over batches with a fixed partition,
/// so the result does not depend on the thread count.
AutocorrelationEstimate autocorrelation(const TrajectoryEnsemble& ensemble,
                                        const AutocorrelationOptions& options = {});

/// Direct-summation reference for autocorrelation (O(n m L), test sizes only).
AutocorrelationEstimate autocorrelation_serial(const TrajectoryEnsemble& ensemble,
                                               const AutocorrelationOptions& options = {});

/// 2 Re int_0^{t_max} C(t) e^{i omega t} dt by the trapezoid rule.
double cosine_transform(std::span<const double> values, double lag_dt, double omega);

/// Spectrum on the given grid plus I(0), K(0), t_c and the cutoff diagnostic.
/// OpenMP over frequencies.
SpectrumEstimate spectrum(const AutocorrelationEstimate& ac, std::span<const double> omega_grid);
SpectrumEstimate spectrum_serial(const AutocorrelationEstimate& ac,
                                 std::span<const double> omega_grid);

/// First lag where C(t)/C(0) drops below 1/e, linearly interpolated.
CorrelationTime correlation_time(const AutocorrelationEstimate& ac);

/// Uniform grid lo, lo + step, ..., hi (inclusive up to rounding).
std::vector<double> uniform_grid(double lo, double hi, double step);

/// omega in [-3, 3], step 0.005.
std::vector<double> default_omega_grid();

} // namespace nlbath
