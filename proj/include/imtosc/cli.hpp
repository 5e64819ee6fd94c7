#pragma once

#include "imtosc/coloring.hpp"
#include "imtosc/comparator.hpp"
#include "imtosc/image.hpp"
#include "imtosc/kuramoto.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace imtosc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSimulation = 3;
inline constexpr int kExitIo = 4;

/// Invalid configuration; the message starts with the dotted field path.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field, const std::string& message)
        : std::runtime_error(message.starts_with(field + ".") ? message : field + ": " + message), field(field) {}
    std::string field;
};

/// Commands that run an experiment and write a manifest.
const std::vector<std::string>& experiment_commands();

struct OscillatorConfig {
    OscillatorKind kind = OscillatorKind::DR;
    DeviceParams device{0.7, 0.3, 10.0, 0.0, 1.0};  ///< D-R device, or top device of a D-D stack
    DeviceParams bottom{0.7, 0.3, 10.0, 0.0, 1.0};  ///< D-D only
    double g_s = 1.0;                                ///< D-R only
    double c_lump = 0.0;                             ///< <= 0: sum of the internal capacitances

    [[nodiscard]] OscillatorSpec build() const;
};

struct NetworkConfig {
    std::vector<OscillatorConfig> oscillators{OscillatorConfig{}};
    std::vector<CouplingSpec> couplings;

    [[nodiscard]] NetworkSpec build() const;
};

struct GridAxis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 1;

    [[nodiscard]] std::vector<double> values() const { return linear_grid(lo, hi, n); }
};

struct InitialConfig {
    std::vector<double> x0;
    StateVector s0;
};

struct LockSweepConfig {
    OscillatorConfig oscillator{OscillatorKind::DD, {0.7, 0.3, 1.0, 0.0, 0.5}, {0.7, 0.3, 1.0, 0.0, 0.5}, 1.0, 1.0};
    GridAxis r_c{0.5, 5.0, 10};
    GridAxis c_c{0.05, 0.3, 6};
    std::size_t trials = 20;
    double t_end = 400.0;
    double event_tol = 1e-10;
    double eps_phase = kDefaultPhaseEps;
    double orbit_tol = 1e-7;
};

struct MatchConfig {
    std::string input;
    std::string templ;
    double theta_xor = 0.2;
    double theta_wta = 0.5;
};

struct GraphConfig {
    std::string dimacs;              ///< path; takes precedence over family
    std::string family = "complete";  ///< complete, cycle, petersen
    std::size_t n = 3;
};

struct KuramotoBlock {
    std::vector<double> omegas{1.0, 1.2};
    double K = 0.5;
    std::vector<double> theta0;  ///< empty: uniform random from the seed
    KuramotoConfig sim;
};

/// Fully resolved experiment. Only the blocks used by `command` are parsed
/// and serialized; the rest keep their defaults.
struct ExperimentConfig {
    std::string command;
    std::uint64_t seed = 1;
    std::string out = "imtosc-out";
    bool plots = true;

    NetworkConfig network;
    SimConfig sim;
    std::optional<InitialConfig> initial;
    LockSweepConfig lock_sweep;
    ComparatorConfig comparator;
    GridAxis vgs1{1.5, 2.5, 21};
    GridAxis vgs2{1.5, 2.5, 21};
    ImageCompareConfig image;
    std::string saliency_input;
    MatchConfig match;
    GraphConfig graph;
    ColoringConfig coloring;
    KuramotoBlock kuramoto;
};

/// Applies "a.b.c=value". The value is parsed as JSON when possible and kept
/// as a string otherwise; numeric path segments index arrays.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Parses and validates. Unknown keys and invalid values throw ConfigError.
[[nodiscard]] ExperimentConfig parse_config(const std::string& command, const nlohmann::json& doc);
[[nodiscard]] nlohmann::json to_json(const ExperimentConfig& cfg);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);
[[nodiscard]] std::string hex64(std::uint64_t v);
/// Hash of the canonical serialization of the resolved config.
[[nodiscard]] std::string config_hash(const ExperimentConfig& cfg);
[[nodiscard]] nlohmann::json versions();

struct Artifact {
    std::string name;
    std::string content;
};

struct CommandResult {
    std::vector<Artifact> artifacts;
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> summary;  ///< lines echoed to stdout
};

/// Runs one experiment without touching the filesystem except to read the
/// inputs named in the config (resolved against base_dir).
[[nodiscard]] CommandResult execute(const ExperimentConfig& cfg, const std::filesystem::path& base_dir,
                                    std::size_t jobs);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace imtosc::cli
