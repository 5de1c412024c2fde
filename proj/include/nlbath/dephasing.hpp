#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nlbath/ensemble.hpp"

namespace nlbath {

/// Least-squares fit of ln y(t) = c - rate * t.
struct RateFit {
    double rate{0.0};
    double rate_stderr{0.0};
    double t_start{0.0};
    double t_end{0.0};
    double residual{0.0}; // RMS of the log-residuals
    std::size_t n_points{0};
};

/// Probe coherence C(t) = |<exp(i phi(t))>| over the ensemble.
struct CoherenceSeries {
    std::vector<double> t;
    std::vector<double> coherence;
    std::vector<double> std_error;
    std::optional<RateFit> fit;
};

inline constexpr double kFitUpper = 0.8;
inline constexpr double kFitLower = 0.2;

/// C(t_k) with standard errors propagated from the covariance of the complex
/// mean. Parallel over time points; each point sums realizations in index order.
CoherenceSeries coherence_series(const TrajectoryEnsemble& ensemble);
CoherenceSeries coherence_series_serial(const TrajectoryEnsemble& ensemble);

/// Fits the window that starts where y first drops below `upper` and ends
/// before it first drops below `lower`; returns -slope of ln y.
/// Throws InsufficientDecay when y never drops below `upper`.
RateFit fit_decoherence_rate(std::span<const double> t, std::span<const double> y,
                             double lower = kFitLower, double upper = kFitUpper);
RateFit fit_decoherence_rate(const CoherenceSeries& series);

} // namespace nlbath
