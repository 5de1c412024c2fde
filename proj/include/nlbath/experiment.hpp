#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nlbath {

enum class ExperimentId {
    ClassicalSpectrum,
    IzeroScan,
    ClassicalCoherence,
    SpinbosonCoherence,
    SpinbosonSpectrum,
};

std::string_view to_string(ExperimentId id);
ExperimentId experiment_from_string(std::string_view name);

/// Everything needed to reproduce one experiment run. Serializes to JSON;
/// a persisted config re-runs to byte-identical output.
struct ExperimentConfig {
    ExperimentId experiment{ExperimentId::ClassicalSpectrum};

    // classical bath
    std::vector<double> temperatures{};
    double gamma1{0.4};
    double epsilon{0.05};
    std::size_t n_realizations{5000};
    double dt{0.01};
    double t_max{200.0};
    std::size_t record_stride{10};
    bool time_average{false};

    // spin-boson bath
    std::vector<double> t_tildes{};
    double gamma_b{1.0};
    double delta{20.0};
    double quantum_dt{0.0};          // 0: 1e-3 / max(gamma_b, eps, 1)
    double quantum_t_max{0.0};       // 0: long enough to reach equilibrium
    std::size_t quantum_records{2000};

    // frequency grid; unset fields take experiment-specific defaults
    std::optional<double> omega_min{};
    std::optional<double> omega_max{};
    std::optional<double> omega_step{};

    std::uint64_t master_seed{42};
    std::string output_dir{"."};

    void validate() const;
};

std::string to_json_string(const ExperimentConfig& config);
/// Accepts either a bare config object or a run sidecar with a "config" key.
ExperimentConfig config_from_json(std::string_view text);

struct RunResult {
    std::filesystem::path csv_path;
    std::filesystem::path sidecar_path;
    std::vector<std::string> warnings;
};

/// Runs the experiment and writes <output_dir>/<experiment>.csv plus the
/// JSON sidecar <output_dir>/<experiment>.json.
RunResult run(const ExperimentConfig& config);

/// Formats a double in full-precision scientific notation.
std::string format_number(double value);

} // namespace nlbath
