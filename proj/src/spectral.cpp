#include "nlbath/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "nlbath/error.hpp"

namespace nlbath {

namespace {

struct LagLayout {
    std::size_t n_lags;
    std::size_t n_batches;
};

LagLayout layout(const TrajectoryEnsemble& e, const AutocorrelationOptions& options) {
    if (e.n_realizations < 2)
        throw InvalidParameter("autocorrelation needs at least two realizations");
    if (e.n_records < 1) throw InvalidParameter("ensemble has no recorded points");
    std::size_t n_lags = e.n_records;
    if (options.max_lag) {
        if (!(*options.max_lag >= 0.0)) throw InvalidParameter("max_lag must be non-negative");
        const auto k = static_cast<std::size_t>(std::floor(*options.max_lag / e.record_dt + 1e-9));
        n_lags = std::min(n_lags, k + 1);
    }
    const std::size_t batches =
        std::clamp<std::size_t>(options.n_batches, 1, e.n_realizations);
    return {n_lags, batches};
}

std::size_t batch_begin(std::size_t b, std::size_t n, std::size_t batches) {
    return b * n / batches;
}

/// Per-batch accumulators: sums and sums of squares of per-realization lag products.
struct BatchSums {
    std::vector<double> sum;
    std::vector<double> sumsq;
};

AutocorrelationEstimate assemble(const TrajectoryEnsemble& e, const AutocorrelationOptions& options,
                                 const LagLayout& lay, const std::vector<BatchSums>& sums) {
    AutocorrelationEstimate ac;
    ac.lag_dt = e.record_dt;
    ac.n_realizations = e.n_realizations;
    ac.temperature = e.params.temperature;
    ac.time_averaged = options.time_average;
    ac.n_batches = lay.n_batches;
    ac.values.assign(lay.n_lags, 0.0);
    ac.std_error.assign(lay.n_lags, 0.0);
    ac.batch_values.assign(lay.n_batches * lay.n_lags, 0.0);

    std::vector<double> sumsq(lay.n_lags, 0.0);
    for (std::size_t b = 0; b < lay.n_batches; ++b) {
        const auto count = static_cast<double>(batch_begin(b + 1, e.n_realizations, lay.n_batches) -
                                               batch_begin(b, e.n_realizations, lay.n_batches));
        for (std::size_t k = 0; k < lay.n_lags; ++k) {
            ac.values[k] += sums[b].sum[k];
            sumsq[k] += sums[b].sumsq[k];
            ac.batch_values[b * lay.n_lags + k] = sums[b].sum[k] / count;
        }
    }
    const auto n = static_cast<double>(e.n_realizations);
    for (std::size_t k = 0; k < lay.n_lags; ++k) {
        const double mean = ac.values[k] / n;
        const double var = std::max(0.0, (sumsq[k] - n * mean * mean) / (n - 1.0));
        ac.values[k] = mean;
        ac.std_error[k] = std::sqrt(var / n);
    }
    return ac;
}

void accumulate(BatchSums& acc, std::span<const double> products) {
    for (std::size_t k = 0; k < products.size(); ++k) {
        acc.sum[k] += products[k];
        acc.sumsq[k] += products[k] * products[k];
    }
}

void reference_products(std::span<const double> x, std::size_t n_lags, bool time_average,
                        std::vector<double>& out) {
    const std::size_t m = x.size();
    for (std::size_t k = 0; k < n_lags; ++k) {
        if (!time_average) {
            out[k] = x[0] * x[k];
            continue;
        }
        double s = 0.0;
        for (std::size_t j = 0; j + k < m; ++j) s += x[j] * x[j + k];
        out[k] = s / static_cast<double>(m - k);
    }
}

struct FftwDeleter {
    void operator()(void* p) const { fftw_free(p); }
};

/// Thread-shared FFTW plans for the linear (zero-padded) autocorrelation.
/// Plans are created once; execution uses the new-array interface on
/// per-thread buffers, which FFTW guarantees to be thread-safe.
class CorrelationPlan {
public:
    explicit CorrelationPlan(std::size_t m) : m_(m) {
        n_ = 1;
        while (n_ < 2 * m) n_ <<= 1;
        auto real = alloc_real();
        auto spec = alloc_complex();
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real.get(), spec.get(), FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec.get(), real.get(), FFTW_ESTIMATE);
    }
    ~CorrelationPlan() {
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }
    CorrelationPlan(const CorrelationPlan&) = delete;
    CorrelationPlan& operator=(const CorrelationPlan&) = delete;

    std::unique_ptr<double[], FftwDeleter> alloc_real() const {
        return std::unique_ptr<double[], FftwDeleter>(fftw_alloc_real(n_));
    }
    std::unique_ptr<fftw_complex[], FftwDeleter> alloc_complex() const {
        return std::unique_ptr<fftw_complex[], FftwDeleter>(fftw_alloc_complex(n_ / 2 + 1));
    }

    /// out[k] = sum_j x_j x_{j+k} / (m - k), k < out.size().
    void run(std::span<const double> x, double* real, fftw_complex* spec,
             std::span<double> out) const {
        std::copy(x.begin(), x.end(), real);
        std::fill(real + m_, real + n_, 0.0);
        fftw_execute_dft_r2c(forward_, real, spec);
        for (std::size_t j = 0; j < n_ / 2 + 1; ++j) {
            spec[j][0] = spec[j][0] * spec[j][0] + spec[j][1] * spec[j][1];
            spec[j][1] = 0.0;
        }
        fftw_execute_dft_c2r(backward_, spec, real);
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = real[k] * scale / static_cast<double>(m_ - k);
    }

private:
    std::size_t m_;
    std::size_t n_;
    fftw_plan forward_{};
    fftw_plan backward_{};
};

std::vector<BatchSums> empty_sums(const LagLayout& lay) {
    return std::vector<BatchSums>(lay.n_batches, BatchSums{std::vector<double>(lay.n_lags, 0.0),
                                                           std::vector<double>(lay.n_lags, 0.0)});
}

} // namespace

AutocorrelationEstimate autocorrelation(const TrajectoryEnsemble& e,
                                        const AutocorrelationOptions& options) {
    const LagLayout lay = layout(e, options);
    auto sums = empty_sums(lay);
    const auto batches = static_cast<long long>(lay.n_batches);

    if (!options.time_average) {
#pragma omp parallel for schedule(dynamic, 1)
        for (long long b = 0; b < batches; ++b) {
            std::vector<double> products(lay.n_lags);
            const auto ub = static_cast<std::size_t>(b);
            for (std::size_t i = batch_begin(ub, e.n_realizations, lay.n_batches);
                 i < batch_begin(ub + 1, e.n_realizations, lay.n_batches); ++i) {
                const auto x = e.positions(i);
                for (std::size_t k = 0; k < lay.n_lags; ++k) products[k] = x[0] * x[k];
                accumulate(sums[ub], products);
            }
        }
        return assemble(e, options, lay, sums);
    }

    std::unique_ptr<CorrelationPlan> plan;
#pragma omp critical(nlbath_fftw_planner)
    plan = std::make_unique<CorrelationPlan>(e.n_records);

#pragma omp parallel
    {
        auto real = plan->alloc_real();
        auto spec = plan->alloc_complex();
        std::vector<double> products(lay.n_lags);
#pragma omp for schedule(dynamic, 1)
        for (long long b = 0; b < batches; ++b) {
            const auto ub = static_cast<std::size_t>(b);
            for (std::size_t i = batch_begin(ub, e.n_realizations, lay.n_batches);
                 i < batch_begin(ub + 1, e.n_realizations, lay.n_batches); ++i) {
                plan->run(e.positions(i), real.get(), spec.get(), products);
                accumulate(sums[ub], products);
            }
        }
    }
    AutocorrelationEstimate ac = assemble(e, options, lay, sums);
#pragma omp critical(nlbath_fftw_planner)
    plan.reset();
    return ac;
}

AutocorrelationEstimate autocorrelation_serial(const TrajectoryEnsemble& e,
                                               const AutocorrelationOptions& options) {
    const LagLayout lay = layout(e, options);
    auto sums = empty_sums(lay);
    std::vector<double> products(lay.n_lags);
    for (std::size_t b = 0; b < lay.n_batches; ++b) {
        for (std::size_t i = batch_begin(b, e.n_realizations, lay.n_batches);
             i < batch_begin(b + 1, e.n_realizations, lay.n_batches); ++i) {
            reference_products(e.positions(i), lay.n_lags, options.time_average, products);
            accumulate(sums[b], products);
        }
    }
    return assemble(e, options, lay, sums);
}

double cosine_transform(std::span<const double> values, double lag_dt, double omega) {
    if (values.empty()) return 0.0;
    double s = 0.5 * values.front();
    for (std::size_t k = 1; k + 1 < values.size(); ++k)
        s += values[k] * std::cos(omega * lag_dt * static_cast<double>(k));
    if (values.size() > 1)
        s += 0.5 * values.back() * std::cos(omega * lag_dt * static_cast<double>(values.size() - 1));
    return 2.0 * lag_dt * s;
}

CorrelationTime correlation_time(const AutocorrelationEstimate& ac) {
    if (ac.values.empty() || !(ac.values[0] > 0.0))
        throw InvalidParameter("correlation time needs C(0) > 0");
    const double level = std::exp(-1.0) * ac.values[0];
    for (std::size_t k = 1; k < ac.size(); ++k) {
        if (ac.values[k] < level) {
            const double c0 = ac.values[k - 1];
            const double c1 = ac.values[k];
            const double frac = (c0 - level) / (c0 - c1);
            return {ac.lag(k - 1) + frac * ac.lag_dt, true};
        }
    }
    return {ac.t_max(), false};
}

namespace {

double mean_and_stderr(std::span<const double> xs, double& se) {
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    se = xs.size() > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
    return mean;
}

/// Fills everything except intensity/std_error.
SpectrumEstimate scalars(const AutocorrelationEstimate& ac, std::span<const double> omega_grid) {
    SpectrumEstimate s;
    s.omega.assign(omega_grid.begin(), omega_grid.end());
    s.intensity.assign(omega_grid.size(), 0.0);
    s.std_error.assign(omega_grid.size(), 0.0);
    s.temperature = ac.temperature;

    std::vector<double> batch_izero(ac.n_batches);
    for (std::size_t b = 0; b < ac.n_batches; ++b)
        batch_izero[b] = cosine_transform(ac.batch(b), ac.lag_dt, 0.0);
    s.i_zero = cosine_transform(ac.values, ac.lag_dt, 0.0);
    mean_and_stderr(batch_izero, s.i_zero_stderr);
    if (ac.temperature > 0.0) {
        s.k_zero = s.i_zero / ac.temperature;
        s.k_zero_stderr = s.i_zero_stderr / ac.temperature;
    } else {
        s.k_zero = std::nan("");
        s.k_zero_stderr = std::nan("");
    }
    if (!ac.values.empty() && ac.values[0] > 0.0) s.correlation_time = correlation_time(ac);

    std::vector<double> magnitude(ac.values.size());
    std::transform(ac.values.begin(), ac.values.end(), magnitude.begin(),
                   [](double c) { return std::abs(c); });
    const std::size_t half = magnitude.size() / 2;
    const double total = cosine_transform(magnitude, ac.lag_dt, 0.0);
    const double tail = cosine_transform(std::span<const double>(magnitude).subspan(half),
                                         ac.lag_dt, 0.0);
    s.tail_fraction = total > 0.0 ? tail / total : 0.0;
    s.cutoff_warning = s.tail_fraction > kCutoffWarningFraction;
    return s;
}

void evaluate_frequency(const AutocorrelationEstimate& ac, SpectrumEstimate& s, std::size_t j,
                        std::vector<double>& weights, std::vector<double>& batch_i) {
    const double w = s.omega[j];
    const std::size_t m = ac.size();
    for (std::size_t k = 0; k < m; ++k)
        weights[k] = std::cos(w * ac.lag_dt * static_cast<double>(k));
    weights[0] *= 0.5;
    if (m > 1) weights[m - 1] *= 0.5;
    auto apply = [&](std::span<const double> c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < m; ++k) acc += weights[k] * c[k];
        return 2.0 * ac.lag_dt * acc;
    };
    s.intensity[j] = apply(ac.values);
    for (std::size_t b = 0; b < ac.n_batches; ++b) batch_i[b] = apply(ac.batch(b));
    mean_and_stderr(batch_i, s.std_error[j]);
}

} // namespace

SpectrumEstimate spectrum(const AutocorrelationEstimate& ac, std::span<const double> omega_grid) {
    SpectrumEstimate s = scalars(ac, omega_grid);
    const auto n = static_cast<long long>(s.omega.size());
#pragma omp parallel
    {
        std::vector<double> weights(ac.size());
        std::vector<double> batch_i(ac.n_batches);
#pragma omp for schedule(static)
        for (long long j = 0; j < n; ++j)
            evaluate_frequency(ac, s, static_cast<std::size_t>(j), weights, batch_i);
    }
    return s;
}

SpectrumEstimate spectrum_serial(const AutocorrelationEstimate& ac,
                                 std::span<const double> omega_grid) {
    SpectrumEstimate s = scalars(ac, omega_grid);
    for (std::size_t j = 0; j < s.omega.size(); ++j) {
        double& out = s.intensity[j];
        out = cosine_transform(ac.values, ac.lag_dt, s.omega[j]);
        std::vector<double> batch_i(ac.n_batches);
        for (std::size_t b = 0; b < ac.n_batches; ++b)
            batch_i[b] = cosine_transform(ac.batch(b), ac.lag_dt, s.omega[j]);
        mean_and_stderr(batch_i, s.std_error[j]);
    }
    return s;
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw InvalidParameter("invalid grid bounds");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);
    return grid;
}

std::vector<double> default_omega_grid() { return uniform_grid(-3.0, 3.0, 0.005); }

} // namespace nlbath
