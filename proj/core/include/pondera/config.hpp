#pragma once

#include "pondera/types.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace pondera {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class GridScale { linear, log };

struct GridSpec {
    double start_hz = 0.0;
    double stop_hz = 0.0;
    int points = 0;          // 0: command picks its default
    GridScale scale = GridScale::linear;
    bool provided = false;
};

enum class SignalKind { pdh, reflected, two_tone };

struct RunConfig {
    SystemConfig system;
    bool self_consistent = false;   // bare-detuning input

    GridSpec grid;
    std::string out_path;           // empty: stdout
    std::string format = "csv";     // csv | json

    std::vector<double> sweep_detunings;   // rad/s (effective)
    std::vector<double> sweep_phases;      // rad
    std::vector<double> sweep_powers;      // W
    std::vector<double> sweep_jitters;     // rad

    std::string phase_mode = "opt";  // "opt" or a number (degrees) as text
    double phase_value = 0.0;        // rad, valid when phase_mode == "value"

    std::string map_kind = "detuning_phase";  // or "jitter"
    SignalKind signal = SignalKind::pdh;
    double signal_gain = 1.0;

    double pump_power = 0.0;         // W, two-tone pump
    double pump_detuning = 0.0;      // rad/s

    double sim_dt = 0.0;             // 0: pick 0.099/kappa
    double sim_duration = 0.0;       // 0: validator default
    int sim_decimation = 0;          // 0: validator default
    std::string sim_dump_path;

    int validate_n_random = 10000;
    bool validate_time_domain = true;

    std::uint64_t seed = 1;

    // every key after defaults, in canonical text form; feeds output
    // metadata and the config hash
    std::vector<std::pair<std::string, std::string>> resolved;
};

/// Line-oriented `key = value` text with `#` comments and dotted sections.
/// Unknown keys, missing mandatory keys and unit violations raise
/// ConfigError naming the offending line.
RunConfig parse_config(const std::string& text);

RunConfig load_config(const std::string& path);

/// FNV-1a over the canonical resolved key=value list.
std::string config_hash(const RunConfig& cfg);

} // namespace pondera
