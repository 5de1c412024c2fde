#pragma once

// Reference computations used as oracles by the unit and acceptance tests.
// They depend only on the standard library and Eigen, not on the code under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Composite Simpson rule on [lo, hi] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int n = 20000) {
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int i = 1; i < n; ++i) s += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// Boltzmann moment <x^p> for the density exp(-(-x^2/2 + x^4/4)/T).
inline double boltzmann_moment(double T, int p) {
    auto weight = [T](double x) { return std::exp(-(-0.5 * x * x + 0.25 * x * x * x * x + 0.25) / T); };
    const double L = 2.0 + 4.0 * std::sqrt(std::sqrt(T));
    const double z = simpson(weight, -L, L);
    const double m = simpson([&](double x) { return std::pow(x, p) * weight(x); }, -L, L);
    return m / z;
}

/// Stationary Ornstein-Uhlenbeck paths with unit variance and relaxation
/// time tau, sampled exactly on a grid of spacing h (AR(1) recursion).
/// Realization-major, n x m.
inline std::vector<double> ou_paths(std::size_t n, std::size_t m, double tau, double h, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal;
    const double a = std::exp(-h / tau);
    const double b = std::sqrt(1.0 - a * a);
    std::vector<double> out(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        double x = normal(gen);
        for (std::size_t k = 0; k < m; ++k) {
            out[i * m + k] = x;
            x = a * x + b * normal(gen);
        }
    }
    return out;
}

/// Mean and standard error of a sample.
struct MeanError {
    double mean;
    double error;
};

inline MeanError mean_error(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double mean = s / v.size();
    double q = 0.0;
    for (double x : v) q += (x - mean) * (x - mean);
    return {mean, std::sqrt(q / (v.size() - 1) / v.size())};
}

/// Random d x d density matrix G G^dagger / Tr(G G^dagger) with Gaussian G.
inline Eigen::MatrixXcd random_state(int d, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = {normal(gen), normal(gen)};
    Eigen::MatrixXcd rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline Eigen::MatrixXcd random_matrix(int d, std::mt19937_64& gen) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXcd g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = {normal(gen), normal(gen)};
    return g;
}

/// Least-squares slope of y against x.
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracle
