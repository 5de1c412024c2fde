// nlbath: runs the classical and spin-boson bath experiments and writes CSV
// tables plus a JSON sidecar of derived scalars.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "nlbath/error.hpp"
#include "nlbath/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

/// Flags shared by every subcommand; each is applied only when given.
struct Flags {
    std::string config_path;
    std::string temps, t_tildes;
    double gamma1{}, eps{}, gamma_b{}, delta{}, dt{}, t_max{}, quantum_dt{}, quantum_t_max{};
    double omega_min{}, omega_max{}, omega_step{};
    std::size_t n{}, record_stride{}, quantum_records{};
    std::uint64_t seed{};
    std::string out;
    bool time_average{false};
    std::vector<CLI::Option*> given;
};

void add_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON config (or a previous run sidecar)");
    sub->add_option("--temps", f.temps, "comma-separated classical temperatures");
    sub->add_option("--ttilde", f.t_tildes, "comma-separated spin-boson temperatures T/Delta");
    sub->add_option("--gamma1", f.gamma1, "classical dissipation");
    sub->add_option("--eps", f.eps, "probe coupling");
    sub->add_option("--gamma-b", f.gamma_b, "spin-boson bath decay coefficient");
    sub->add_option("--delta", f.delta, "tunneling frequency");
    sub->add_option("--n", f.n, "ensemble realizations");
    sub->add_option("--dt", f.dt, "Langevin step");
    sub->add_option("--t-max", f.t_max, "classical record length");
    sub->add_option("--record-stride", f.record_stride, "record every k-th Langevin step");
    sub->add_flag("--time-average", f.time_average,
                  "average the autocorrelation over reference times");
    sub->add_option("--quantum-dt", f.quantum_dt, "RK4 step (0: default)");
    sub->add_option("--quantum-t-max", f.quantum_t_max, "master-equation horizon (0: auto)");
    sub->add_option("--quantum-records", f.quantum_records, "recorded points per run");
    sub->add_option("--omega-min", f.omega_min);
    sub->add_option("--omega-max", f.omega_max);
    sub->add_option("--omega-step", f.omega_step);
    sub->add_option("--seed", f.seed, "master seed");
    sub->add_option("--out", f.out, "output directory");
}

/// Splits "a,b,c" into numbers. An empty string is an empty list, which the
/// config validation then rejects.
std::vector<double> parse_list(const std::string& text, const char* flag) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw nlbath::InvalidParameter(std::string(flag) + ": '" + item + "' is not a number");
        values.push_back(v);
    }
    return values;
}

bool given(CLI::App* sub, const char* name) { return sub->count(name) > 0; }

nlbath::ExperimentConfig resolve(CLI::App* sub, const Flags& f, nlbath::ExperimentId id) {
    nlbath::ExperimentConfig c;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw nlbath::InvalidParameter("cannot read config " + f.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        c = nlbath::config_from_json(buf.str());
    } else if (id == nlbath::ExperimentId::ClassicalSpectrum ||
               id == nlbath::ExperimentId::IzeroScan ||
               id == nlbath::ExperimentId::ClassicalCoherence) {
        c.temperatures = id == nlbath::ExperimentId::ClassicalCoherence
                             ? std::vector<double>{0.5, 1.0, 2.0}
                             : std::vector<double>{0.25, 0.5, 1.0, 2.0};
    } else {
        c.t_tildes = {0.5, 2.0, 80.0};
    }
    c.experiment = id;
    if (given(sub, "--temps")) c.temperatures = parse_list(f.temps, "--temps");
    if (given(sub, "--ttilde")) c.t_tildes = parse_list(f.t_tildes, "--ttilde");
    if (given(sub, "--gamma1")) c.gamma1 = f.gamma1;
    if (given(sub, "--eps")) c.epsilon = f.eps;
    if (given(sub, "--gamma-b")) c.gamma_b = f.gamma_b;
    if (given(sub, "--delta")) c.delta = f.delta;
    if (given(sub, "--n")) c.n_realizations = f.n;
    if (given(sub, "--dt")) c.dt = f.dt;
    if (given(sub, "--t-max")) c.t_max = f.t_max;
    if (given(sub, "--record-stride")) c.record_stride = f.record_stride;
    if (given(sub, "--time-average")) c.time_average = f.time_average;
    if (given(sub, "--quantum-dt")) c.quantum_dt = f.quantum_dt;
    if (given(sub, "--quantum-t-max")) c.quantum_t_max = f.quantum_t_max;
    if (given(sub, "--quantum-records")) c.quantum_records = f.quantum_records;
    if (given(sub, "--omega-min")) c.omega_min = f.omega_min;
    if (given(sub, "--omega-max")) c.omega_max = f.omega_max;
    if (given(sub, "--omega-step")) c.omega_step = f.omega_step;
    if (given(sub, "--seed")) c.master_seed = f.seed;
    if (given(sub, "--out")) c.output_dir = f.out;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoherence of a probe coupled to non-linear thermal baths"};
    app.require_subcommand(1);

    Flags flags;
    const std::pair<const char*, const char*> commands[] = {
        {"classical-spectrum", "spectrum I(omega, T) of the double-well coordinate"},
        {"izero-scan", "I(0,T), K(0,T) and t_c across temperatures"},
        {"classical-coherence", "probe coherence C(t) and the fitted dephasing rate"},
        {"spinboson-coherence", "probe coherence under the coupled master equation"},
        {"spinboson-spectrum", "closed-form spin-boson spectral function"},
    };
    std::vector<CLI::App*> subs;
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        add_flags(sub, flags);
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        for (auto* sub : subs) {
            if (!sub->parsed()) continue;
            const auto id = nlbath::experiment_from_string(sub->get_name());
            const nlbath::ExperimentConfig config = resolve(sub, flags, id);
            const nlbath::RunResult result = nlbath::run(config);
            for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
            std::cout << result.csv_path.string() << '\n' << result.sidecar_path.string() << '\n';
        }
    } catch (const nlbath::InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlbath::CapacityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}
