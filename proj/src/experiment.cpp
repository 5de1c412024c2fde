#include "nlbath/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nlbath/dephasing.hpp"
#include "nlbath/ensemble.hpp"
#include "nlbath/error.hpp"
#include "nlbath/rng.hpp"
#include "nlbath/spectral.hpp"
#include "nlbath/spin_boson.hpp"

namespace nlbath {

using nlohmann::json;

namespace {

constexpr std::uint64_t kSpectrumSalt = 0;
constexpr std::uint64_t kCoherenceSalt = 1;
constexpr std::uint64_t kIndependentSalt = 2;
constexpr double kEquilibriumResidual = 2e-4;

struct Names {
    ExperimentId id;
    std::string_view name;
};

constexpr Names kNames[] = {
    {ExperimentId::ClassicalSpectrum, "classical-spectrum"},
    {ExperimentId::IzeroScan, "izero-scan"},
    {ExperimentId::ClassicalCoherence, "classical-coherence"},
    {ExperimentId::SpinbosonCoherence, "spinboson-coherence"},
    {ExperimentId::SpinbosonSpectrum, "spinboson-spectrum"},
};

bool is_classical(ExperimentId id) {
    return id == ExperimentId::ClassicalSpectrum || id == ExperimentId::IzeroScan ||
           id == ExperimentId::ClassicalCoherence;
}

} // namespace

std::string_view to_string(ExperimentId id) {
    for (const auto& n : kNames)
        if (n.id == id) return n.name;
    return "unknown";
}

ExperimentId experiment_from_string(std::string_view name) {
    for (const auto& n : kNames)
        if (n.name == name) return n.id;
    throw InvalidParameter("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    if (is_classical(experiment)) {
        if (temperatures.empty()) throw InvalidParameter("temperature list is empty");
        for (double T : temperatures)
            if (!(T >= 0.0) || !std::isfinite(T))
                throw InvalidParameter("temperatures must be finite and non-negative");
        ClassicalBathParams{gamma1, 0.0, epsilon, 0.0}.validate();
        if (n_realizations < 2) throw InvalidParameter("need at least two realizations");
        EnsembleOptions o;
        o.n_realizations = n_realizations;
        o.dt = dt;
        o.t_max = t_max;
        o.record_stride = record_stride;
        o.record_phase = experiment == ExperimentId::ClassicalCoherence;
        o.validate();
    } else {
        if (t_tildes.empty()) throw InvalidParameter("t_tilde list is empty");
        if (!(gamma_b > 0.0)) throw InvalidParameter("gamma_b must be positive");
        for (double T : t_tildes) SpinBosonParams{delta, gamma_b, epsilon, T}.validate();
        if (quantum_dt < 0.0 || quantum_t_max < 0.0)
            throw InvalidParameter("quantum dt and t_max must be non-negative");
        if (quantum_records < 2) throw InvalidParameter("need at least two quantum records");
        if (experiment == ExperimentId::SpinbosonCoherence && quantum_t_max == 0.0 &&
            epsilon == 0.0)
            throw InvalidParameter("epsilon = 0 never decoheres; give an explicit quantum t_max");
    }
    if (omega_step && !(*omega_step > 0.0)) throw InvalidParameter("omega step must be positive");
    if (omega_min && omega_max && !(*omega_max >= *omega_min))
        throw InvalidParameter("omega_max must be >= omega_min");
}

namespace {

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["experiment"] = std::string(to_string(c.experiment));
    j["temperatures"] = c.temperatures;
    j["gamma1"] = c.gamma1;
    j["epsilon"] = c.epsilon;
    j["n_realizations"] = c.n_realizations;
    j["dt"] = c.dt;
    j["t_max"] = c.t_max;
    j["record_stride"] = c.record_stride;
    j["time_average"] = c.time_average;
    j["t_tildes"] = c.t_tildes;
    j["gamma_b"] = c.gamma_b;
    j["delta"] = c.delta;
    j["quantum_dt"] = c.quantum_dt;
    j["quantum_t_max"] = c.quantum_t_max;
    j["quantum_records"] = c.quantum_records;
    j["omega_min"] = c.omega_min ? json(*c.omega_min) : json(nullptr);
    j["omega_max"] = c.omega_max ? json(*c.omega_max) : json(nullptr);
    j["omega_step"] = c.omega_step ? json(*c.omega_step) : json(nullptr);
    j["master_seed"] = c.master_seed;
    j["output_dir"] = c.output_dir;
    return j;
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_optional(const json& j, const char* key, std::optional<double>& out) {
    if (!j.contains(key)) return;
    if (j.at(key).is_null()) out.reset();
    else out = j.at(key).get<double>();
}

} // namespace

std::string to_json_string(const ExperimentConfig& config) { return config_to_json(config).dump(2); }

ExperimentConfig config_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.contains("config")) j = j.at("config");
    if (!j.is_object()) throw InvalidParameter("config must be a JSON object");

    ExperimentConfig c;
    try {
        if (j.contains("experiment"))
            c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
        read(j, "temperatures", c.temperatures);
        read(j, "gamma1", c.gamma1);
        read(j, "epsilon", c.epsilon);
        read(j, "n_realizations", c.n_realizations);
        read(j, "dt", c.dt);
        read(j, "t_max", c.t_max);
        read(j, "record_stride", c.record_stride);
        read(j, "time_average", c.time_average);
        read(j, "t_tildes", c.t_tildes);
        read(j, "gamma_b", c.gamma_b);
        read(j, "delta", c.delta);
        read(j, "quantum_dt", c.quantum_dt);
        read(j, "quantum_t_max", c.quantum_t_max);
        read(j, "quantum_records", c.quantum_records);
        read_optional(j, "omega_min", c.omega_min);
        read_optional(j, "omega_max", c.omega_max);
        read_optional(j, "omega_step", c.omega_step);
        read(j, "master_seed", c.master_seed);
        read(j, "output_dir", c.output_dir);
    } catch (const json::exception& e) {
        throw InvalidParameter(std::string("bad config field: ") + e.what());
    }
    return c;
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17e", value);
    return buf;
}

namespace {

std::string short_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
        : out_(path) {
        if (!out_) throw InvalidParameter("cannot open " + path.string() + " for writing");
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ',';
            out_ << format_number(v);
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> omega_grid(const ExperimentConfig& c, double lo, double hi, double step) {
    return uniform_grid(c.omega_min.value_or(lo), c.omega_max.value_or(hi),
                        c.omega_step.value_or(step));
}

EnsembleOptions ensemble_options(const ExperimentConfig& c, std::uint64_t seed, bool phases) {
    EnsembleOptions o;
    o.n_realizations = c.n_realizations;
    o.dt = c.dt;
    o.t_max = c.t_max;
    o.master_seed = seed;
    o.record_stride = c.record_stride;
    o.record_phase = phases;
    return o;
}

struct Context {
    const ExperimentConfig& config;
    json& derived;
    std::vector<std::string>& warnings;
};

SpectrumEstimate bath_spectrum(const ExperimentConfig& c, double T, std::size_t index,
                               std::uint64_t salt, std::span<const double> grid) {
    const ClassicalBathParams params{c.gamma1, T, c.epsilon, 0.0};
    const auto ens = simulate_ensemble(
        params, ensemble_options(c, derive_seed(c.master_seed, index, salt), false));
    AutocorrelationOptions ao;
    ao.time_average = c.time_average;
    return spectrum(autocorrelation(ens, ao), grid);
}

json spectrum_scalars(const SpectrumEstimate& s, const ExperimentConfig& c, double T) {
    const ClassicalBathParams params{c.gamma1, T, c.epsilon, 0.0};
    json j;
    j["temperature"] = T;
    j["i_zero"] = s.i_zero;
    j["i_zero_stderr"] = s.i_zero_stderr;
    j["k_zero"] = number_or_null(s.k_zero);
    j["k_zero_stderr"] = number_or_null(s.k_zero_stderr);
    j["t_c"] = s.correlation_time.value;
    j["t_c_resolved"] = s.correlation_time.resolved;
    j["kramers_rate"] = kramers_rate(params);
    j["pi_kramers_rate"] = std::numbers::pi * kramers_rate(params);
    j["tail_fraction"] = s.tail_fraction;
    j["cutoff_warning"] = s.cutoff_warning;
    return j;
}

void warn_cutoff(Context& ctx, const SpectrumEstimate& s, double T) {
    if (s.cutoff_warning)
        ctx.warnings.push_back("cutoff bias at T=" + short_number(T) + ": tail fraction " +
                               short_number(s.tail_fraction));
    if (!s.correlation_time.resolved)
        ctx.warnings.push_back("correlation time unresolved at T=" + short_number(T));
}

void run_classical_spectrum(Context& ctx, const std::filesystem::path& csv) {
    const auto& c = ctx.config;
    const auto grid = omega_grid(c, -3.0, 3.0, 0.005);
    CsvWriter out(csv, {"temperature", "omega", "intensity", "stderr"});
    json per_t = json::array();
    for (std::size_t i = 0; i < c.temperatures.size(); ++i) {
        const double T = c.temperatures[i];
        const SpectrumEstimate s = bath_spectrum(c, T, i, kSpectrumSalt, grid);
        for (std::size_t j = 0; j < grid.size(); ++j)
            out.row({T, s.omega[j], s.intensity[j], s.std_error[j]});
        per_t.push_back(spectrum_scalars(s, c, T));
        warn_cutoff(ctx, s, T);
    }
    ctx.derived["temperatures"] = per_t;
}

void run_izero_scan(Context& ctx, const std::filesystem::path& csv) {
    const auto& c = ctx.config;
    const std::vector<double> zero{0.0};
    CsvWriter out(csv, {"temperature", "i_zero", "k_zero", "t_c", "stderr"});
    json per_t = json::array();
    for (std::size_t i = 0; i < c.temperatures.size(); ++i) {
        const double T = c.temperatures[i];
        const SpectrumEstimate s = bath_spectrum(c, T, i, kSpectrumSalt, zero);
        out.row({T, s.i_zero, s.k_zero, s.correlation_time.value, s.i_zero_stderr});
        per_t.push_back(spectrum_scalars(s, c, T));
        warn_cutoff(ctx, s, T);
    }
    ctx.derived["temperatures"] = per_t;
}

void run_classical_coherence(Context& ctx, const std::filesystem::path& csv) {
    const auto& c = ctx.config;
    const std::vector<double> zero{0.0};
    CsvWriter out(csv, {"temperature", "t", "coherence", "stderr"});
    json per_t = json::array();
    for (std::size_t i = 0; i < c.temperatures.size(); ++i) {
        const double T = c.temperatures[i];
        const ClassicalBathParams params{c.gamma1, T, c.epsilon, 0.0};
        CoherenceSeries series;
        {
            const auto ens = simulate_ensemble(
                params, ensemble_options(c, derive_seed(c.master_seed, i, kCoherenceSalt), true));
            series = coherence_series(ens);
        }
        for (std::size_t k = 0; k < series.t.size(); ++k)
            out.row({T, series.t[k], series.coherence[k], series.std_error[k]});

        const SpectrumEstimate s = bath_spectrum(c, T, i, kIndependentSalt, zero);
        const double predicted = 2.0 * c.epsilon * c.epsilon * s.i_zero;
        json j;
        j["temperature"] = T;
        j["i_zero_independent"] = s.i_zero;
        j["i_zero_stderr"] = s.i_zero_stderr;
        j["t_c"] = s.correlation_time.value;
        j["rate_law_prediction"] = predicted;
        const double validity = 2.0 * c.epsilon * s.correlation_time.value;
        j["two_eps_t_c"] = validity;
        j["rate_law_valid"] = validity < 1.0;
        if (!(validity < 1.0))
            ctx.warnings.push_back("2 eps t_c = " + short_number(validity) +
                                   " >= 1 at T=" + short_number(T) + "; rate law not applicable");
        try {
            const RateFit fit = fit_decoherence_rate(series);
            j["d_fit"] = fit.rate;
            j["d_fit_stderr"] = fit.rate_stderr;
            j["fit_t_start"] = fit.t_start;
            j["fit_t_end"] = fit.t_end;
            j["fit_residual"] = fit.residual;
            j["d_fit_over_prediction"] = number_or_null(fit.rate / predicted);
        } catch (const InsufficientDecay& e) {
            j["d_fit"] = nullptr;
            ctx.warnings.push_back("T=" + short_number(T) + ": " + e.what());
        }
        per_t.push_back(j);
    }
    ctx.derived["temperatures"] = per_t;
}

SpinBosonParams spin_params(const ExperimentConfig& c, double t_tilde) {
    return SpinBosonParams{c.delta, c.gamma_b, c.epsilon, t_tilde};
}

json validity_json(const SpinBosonParams& p, Context& ctx) {
    const ValidityFlags f = validity(p);
    json j;
    j["delta_tau_c"] = f.delta_tau_c;
    j["epsilon_tau_c"] = f.epsilon_tau_c;
    j["bath_rwa"] = f.bath_rwa;
    j["coupling_rwa"] = f.coupling_rwa;
    if (!f.bath_rwa)
        ctx.warnings.push_back("t_tilde=" + short_number(p.t_tilde) + ": delta*tau_c = " +
                               short_number(f.delta_tau_c) + " < 10");
    if (!f.coupling_rwa)
        ctx.warnings.push_back("t_tilde=" + short_number(p.t_tilde) + ": eps*tau_c = " +
                               short_number(f.epsilon_tau_c) + " > 0.1");
    return j;
}

void run_spinboson_coherence(Context& ctx, const std::filesystem::path& csv) {
    const auto& c = ctx.config;
    CsvWriter out(csv, {"t_tilde", "t", "coherence", "m_sigma1"});
    json per_t = json::array();
    const DensityMatrix rho_a0 = default_probe_state();
    for (double tt : c.t_tildes) {
        const SpinBosonParams p = spin_params(c, tt);
        const double g = gamma_d(p);
        ProbeOptions po;
        po.dt = c.quantum_dt > 0.0 ? c.quantum_dt : default_quantum_dt(p);
        if (c.quantum_t_max > 0.0) {
            po.t_max = c.quantum_t_max;
        } else {
            const double amplitude = 1.0 + p.polarization();
            po.t_max = std::log(amplitude / kEquilibriumResidual) / (2.0 * g);
        }
        const auto steps = static_cast<std::size_t>(std::llround(po.t_max / po.dt));
        po.record_stride = std::max<std::size_t>(1, steps / c.quantum_records);
        const ProbeCoherence pc = simulate_probe_coherence(p, rho_a0, po);
        for (std::size_t k = 0; k < pc.t.size(); ++k)
            out.row({tt, pc.t[k], pc.coherence[k], pc.m_sigma1[k]});

        json j;
        j["t_tilde"] = tt;
        j["gamma_d"] = g;
        j["predicted_rate"] = 2.0 * g;
        j["tau_c"] = p.tau_c();
        j["dt"] = po.dt;
        j["t_max"] = po.t_max;
        j["equilibrium_coherence"] = pc.equilibrium_coherence;
        j["final_coherence"] = pc.coherence.back();
        j["max_trace_drift"] = pc.max_trace_drift;
        j["min_eigenvalue"] = pc.min_eigenvalue;
        j["validity"] = validity_json(p, ctx);
        try {
            const RateFit fit = fit_relaxation_rate(pc);
            j["fitted_rate"] = fit.rate;
            j["fitted_over_predicted"] = fit.rate / (2.0 * g);
            j["fit_t_start"] = fit.t_start;
            j["fit_t_end"] = fit.t_end;
        } catch (const InsufficientDecay& e) {
            j["fitted_rate"] = nullptr;
            ctx.warnings.push_back("t_tilde=" + short_number(tt) + ": " + e.what());
        }
        per_t.push_back(j);
    }
    ctx.derived["t_tildes"] = per_t;
}

void run_spinboson_spectrum(Context& ctx, const std::filesystem::path& csv) {
    const auto& c = ctx.config;
    const auto grid = omega_grid(c, -2.0 * c.delta, 2.0 * c.delta, c.delta / 200.0);
    CsvWriter out(csv, {"t_tilde", "omega", "intensity"});
    json per_t = json::array();
    for (double tt : c.t_tildes) {
        const SpinBosonParams p = spin_params(c, tt);
        const auto values = spectral_function(p, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) out.row({tt, grid[k], values[k]});
        json j;
        j["t_tilde"] = tt;
        j["tau_c"] = p.tau_c();
        j["n_up"] = p.n_up();
        j["n_down"] = p.n_down();
        j["peak_plus_delta"] = 2.0 * p.tau_c() * p.n_up();
        j["peak_minus_delta"] = 2.0 * p.tau_c() * p.n_down();
        j["validity"] = validity_json(p, ctx);
        per_t.push_back(j);
    }
    ctx.derived["t_tildes"] = per_t;
}

} // namespace

RunResult run(const ExperimentConfig& config) {
    config.validate();
    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    const std::string stem(to_string(config.experiment));

    RunResult result;
    result.csv_path = dir / (stem + ".csv");
    result.sidecar_path = dir / (stem + ".json");

    json derived = json::object();
    Context ctx{config, derived, result.warnings};
    switch (config.experiment) {
    case ExperimentId::ClassicalSpectrum: run_classical_spectrum(ctx, result.csv_path); break;
    case ExperimentId::IzeroScan: run_izero_scan(ctx, result.csv_path); break;
    case ExperimentId::ClassicalCoherence: run_classical_coherence(ctx, result.csv_path); break;
    case ExperimentId::SpinbosonCoherence: run_spinboson_coherence(ctx, result.csv_path); break;
    case ExperimentId::SpinbosonSpectrum: run_spinboson_spectrum(ctx, result.csv_path); break;
    }

    json sidecar;
    sidecar["config"] = config_to_json(config);
    sidecar["derived"] = derived;
    sidecar["warnings"] = result.warnings;
    std::ofstream side(result.sidecar_path);
    if (!side) throw InvalidParameter("cannot open " + result.sidecar_path.string());
    side << sidecar.dump(2) << '\n';
    return result;
}

} // namespace nlbath
