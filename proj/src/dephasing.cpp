#include "nlbath/dephasing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nlbath/error.hpp"

namespace nlbath {

namespace {

void check_input(const TrajectoryEnsemble& e) {
    if (!e.has_phases()) throw InvalidParameter("ensemble has no recorded phases");
    if (e.params.omega != 0.0)
        throw InvalidParameter("pure-dephasing coherence requires a degenerate probe (omega = 0)");
}

CoherenceSeries allocate(const TrajectoryEnsemble& e) {
    CoherenceSeries s;
    s.t.resize(e.n_records);
    s.coherence.resize(e.n_records);
    s.std_error.resize(e.n_records);
    for (std::size_t k = 0; k < e.n_records; ++k) s.t[k] = e.time(k);
    return s;
}

void evaluate_point(const TrajectoryEnsemble& e, std::size_t k, CoherenceSeries& s) {
    double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0, reim = 0.0;
    const std::size_t stride = e.n_records;
    for (std::size_t i = 0; i < e.n_realizations; ++i) {
        const double phi = e.phase[i * stride + k];
        const double c = std::cos(phi);
        const double sn = std::sin(phi);
        re += c;
        im += sn;
        re2 += c * c;
        im2 += sn * sn;
        reim += c * sn;
    }
    const auto n = static_cast<double>(e.n_realizations);
    const double mr = re / n;
    const double mi = im / n;
    const double mag = std::hypot(mr, mi);
    s.coherence[k] = mag;
    if (e.n_realizations < 2) {
        s.std_error[k] = 0.0;
        return;
    }
    const double vr = std::max(0.0, (re2 - n * mr * mr) / (n - 1.0));
    const double vi = std::max(0.0, (im2 - n * mi * mi) / (n - 1.0));
    const double cov = (reim - n * mr * mi) / (n - 1.0);
    double var;
    if (mag > 0.0) {
        const double ur = mr / mag;
        const double ui = mi / mag;
        var = ur * ur * vr + ui * ui * vi + 2.0 * ur * ui * cov;
    } else {
        var = vr + vi;
    }
    s.std_error[k] = std::sqrt(std::max(0.0, var) / n);
}

} // namespace

CoherenceSeries coherence_series(const TrajectoryEnsemble& e) {
    check_input(e);
    CoherenceSeries s = allocate(e);
    const auto m = static_cast<long long>(e.n_records);
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < m; ++k) evaluate_point(e, static_cast<std::size_t>(k), s);
    return s;
}

CoherenceSeries coherence_series_serial(const TrajectoryEnsemble& e) {
    check_input(e);
    CoherenceSeries s = allocate(e);
    for (std::size_t k = 0; k < e.n_records; ++k) evaluate_point(e, k, s);
    return s;
}

RateFit fit_decoherence_rate(std::span<const double> t, std::span<const double> y, double lower,
                             double upper) {
    if (t.size() != y.size()) throw InvalidParameter("time and value series differ in length");
    if (!(lower > 0.0 && lower < upper)) throw InvalidParameter("invalid fit window");
    std::size_t begin = 0;
    while (begin < y.size() && !(y[begin] < upper)) ++begin;
    if (begin == y.size())
        throw InsufficientDecay("series never decays below " + std::to_string(upper) +
                                "; use a longer t_max or a larger coupling");
    std::size_t end = begin;
    while (end < y.size() && y[end] >= lower) ++end;
    const std::size_t n = end - begin;
    if (n < 3) throw InsufficientDecay("fit window holds fewer than three points");

    double st = 0.0, sl = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        st += t[k];
        sl += std::log(y[k]);
    }
    const auto nd = static_cast<double>(n);
    const double tm = st / nd;
    const double lm = sl / nd;
    double stt = 0.0, stl = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        stt += (t[k] - tm) * (t[k] - tm);
        stl += (t[k] - tm) * (std::log(y[k]) - lm);
    }
    const double slope = stl / stt;
    double ss = 0.0;
    for (std::size_t k = begin; k < end; ++k) {
        const double r = std::log(y[k]) - (lm + slope * (t[k] - tm));
        ss += r * r;
    }

    RateFit fit;
    fit.rate = -slope;
    fit.rate_stderr = n > 2 ? std::sqrt(ss / (nd - 2.0) / stt) : 0.0;
    fit.t_start = t[begin];
    fit.t_end = t[end - 1];
    fit.residual = std::sqrt(ss / nd);
    fit.n_points = n;
    return fit;
}

RateFit fit_decoherence_rate(const CoherenceSeries& series) {
    return fit_decoherence_rate(series.t, series.coherence);
}

} // namespace nlbath
