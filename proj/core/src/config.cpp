#include "pondera/config.hpp"
#include "pondera/constants.hpp"
#include "pondera/system.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pondera {

namespace {

struct RawEntry {
    std::string value;
    int line = 0;
};

using RawMap = std::map<std::string, RawEntry>;

[[noreturn]] void fail(int line, const std::string& msg) {
    std::ostringstream os;
    os << "config line " << line << ": " << msg;
    throw ConfigError(os.str());
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

const std::set<std::string> known_keys = {
    "cavity.wavelength_nm", "cavity.length_m", "cavity.finesse", "cavity.eta",
    "mech.frequency_hz", "mech.quality", "mech.mass_kg", "mech.temperature_k",
    "drive.power_w", "drive.detuning_over_kappa", "drive.detuning_hz",
    "drive.bare_detuning_over_kappa", "drive.bare_detuning_hz",
    "coupling.g0",
    "noise.freq_psd_hz2_per_hz", "noise.amp_psd", "noise.detection_floor",
    "noise.phase_jitter_deg",
    "grid.start_hz", "grid.stop_hz", "grid.points", "grid.scale",
    "output.phase_deg", "output.format", "output.path",
    "sweep.detunings_over_kappa", "sweep.phases_deg", "sweep.powers_w",
    "sweep.jitters_deg",
    "map.kind",
    "signal.kind", "signal.gain",
    "pump.power_w", "pump.detuning_over_kappa",
    "sim.dt_s", "sim.duration_s", "sim.decimation", "sim.dump_path",
    "validate.n_random", "validate.time_domain",
    "run.seed",
};

RawMap tokenize(const std::string& text) {
    RawMap raw;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(lineno, "expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) fail(lineno, "expected `key = value`");
        if (!known_keys.count(key)) fail(lineno, "unknown key '" + key + "'");
        if (raw.count(key)) fail(lineno, "duplicate key '" + key + "'");
        raw[key] = {value, lineno};
    }
    return raw;
}

class Reader {
public:
    explicit Reader(RawMap raw) : raw_(std::move(raw)) {}

    bool has(const std::string& key) const { return raw_.count(key) != 0; }

    double number(const std::string& key) {
        const RawEntry& e = entry(key);
        return parse_number(e.value, e.line, key);
    }

    double number_or(const std::string& key, double def) {
        if (!has(key)) {
            record(key, def);
            return def;
        }
        return number(key);
    }

    long integer(const std::string& key) {
        const double v = number(key);
        if (v != std::floor(v)) {
            fail(raw_.at(key).line, key + " must be an integer");
        }
        return static_cast<long>(v);
    }

    long integer_or(const std::string& key, long def) {
        if (!has(key)) {
            record(key, static_cast<double>(def));
            return def;
        }
        return integer(key);
    }

    std::string word(const std::string& key) {
        const RawEntry& e = entry(key);
        record_text(key, e.value);
        return e.value;
    }

    std::string word_or(const std::string& key, const std::string& def) {
        if (!has(key)) {
            record_text(key, def);
            return def;
        }
        return word(key);
    }

    std::vector<double> list(const std::string& key) {
        const RawEntry& e = entry(key);
        std::vector<double> out;
        std::istringstream is(e.value);
        std::string item;
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(e.line, "empty element in list " + key);
            out.push_back(parse_number_raw(item, e.line, key));
        }
        record_text(key, e.value);
        return out;
    }

    int line_of(const std::string& key) const { return raw_.at(key).line; }

    void check_all_consumed() const {
        for (const auto& [key, e] : raw_)
            if (!consumed_.count(key)) fail(e.line, "key '" + key + "' not valid here");
    }

    std::vector<std::pair<std::string, std::string>> resolved() const {
        std::vector<std::pair<std::string, std::string>> out(resolved_.begin(),
                                                             resolved_.end());
        return out;
    }

private:
    const RawEntry& entry(const std::string& key) {
        auto it = raw_.find(key);
        if (it == raw_.end())
            throw ConfigError("missing mandatory key '" + key + "'");
        consumed_.insert(key);
        return it->second;
    }

    double parse_number(const std::string& s, int line, const std::string& key) {
        const double v = parse_number_raw(s, line, key);
        record(key, v);
        return v;
    }

    static double parse_number_raw(const std::string& s, int line,
                                   const std::string& key) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) fail(line, "bad number for " + key + ": '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            fail(line, "bad number for " + key + ": '" + s + "'");
        }
    }

    void record(const std::string& key, double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        resolved_[key] = buf;
        consumed_.insert(key);
    }
    void record_text(const std::string& key, const std::string& v) {
        resolved_[key] = v;
        consumed_.insert(key);
    }

    RawMap raw_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> resolved_;
};

void require_positive(Reader& r, const std::string& key, double v) {
    if (!(v > 0.0)) {
        const int line = r.has(key) ? r.line_of(key) : 0;
        fail(line, key + " must be positive");
    }
}

} // namespace

RunConfig parse_config(const std::string& text) {
    Reader r(tokenize(text));
    RunConfig rc;

    const double wavelength = r.number("cavity.wavelength_nm") * 1e-9;
    const double length = r.number("cavity.length_m");
    const double finesse = r.number("cavity.finesse");
    const double eta = r.number("cavity.eta");
    require_positive(r, "cavity.wavelength_nm", wavelength);
    require_positive(r, "cavity.length_m", length);
    require_positive(r, "cavity.finesse", finesse);
    if (eta < 0.0 || eta > 1.0)
        fail(r.line_of("cavity.eta"), "cavity.eta must lie in [0, 1]");
    rc.system.cavity = derive_cavity_rates(wavelength, length, finesse, eta);

    const double f_m = r.number("mech.frequency_hz");
    const double quality = r.number("mech.quality");
    const double mass = r.number("mech.mass_kg");
    const double temperature = r.number("mech.temperature_k");
    require_positive(r, "mech.frequency_hz", f_m);
    require_positive(r, "mech.quality", quality);
    require_positive(r, "mech.mass_kg", mass);
    if (temperature < 0.0)
        fail(r.line_of("mech.temperature_k"), "temperature must be >= 0");
    rc.system.mech =
        make_mechanical_mode(phys::hz_to_rad(f_m), quality, mass, temperature);

    const double power = r.number("drive.power_w");
    if (power < 0.0) fail(r.line_of("drive.power_w"), "power must be >= 0");

    const bool d_eff_k = r.has("drive.detuning_over_kappa");
    const bool d_eff_hz = r.has("drive.detuning_hz");
    const bool d_bare_k = r.has("drive.bare_detuning_over_kappa");
    const bool d_bare_hz = r.has("drive.bare_detuning_hz");
    const int n_detuning = d_eff_k + d_eff_hz + d_bare_k + d_bare_hz;
    if (n_detuning != 1)
        throw ConfigError("exactly one drive detuning key is required "
                          "(detuning_over_kappa, detuning_hz, "
                          "bare_detuning_over_kappa or bare_detuning_hz)");
    double detuning = 0.0;
    DetuningKind kind = DetuningKind::effective;
    if (d_eff_k) detuning = r.number("drive.detuning_over_kappa") * rc.system.cavity.kappa;
    if (d_eff_hz) detuning = phys::hz_to_rad(r.number("drive.detuning_hz"));
    if (d_bare_k) {
        detuning = r.number("drive.bare_detuning_over_kappa") * rc.system.cavity.kappa;
        kind = DetuningKind::bare;
    }
    if (d_bare_hz) {
        detuning = phys::hz_to_rad(r.number("drive.bare_detuning_hz"));
        kind = DetuningKind::bare;
    }
    rc.self_consistent = kind == DetuningKind::bare;
    rc.system.drive = make_drive(rc.system.cavity, power, kind, detuning);

    rc.system.g0 = r.has("coupling.g0")
                       ? r.number("coupling.g0")
                       : single_photon_coupling(rc.system.cavity, rc.system.mech);

    // technical noises default to zero
    const double twopi_sq = (2.0 * phys::pi) * (2.0 * phys::pi);
    const double s_freq = r.number_or("noise.freq_psd_hz2_per_hz", 0.0);
    const double s_amp = r.number_or("noise.amp_psd", 0.0);
    if (s_freq < 0.0 || s_amp < 0.0)
        throw ConfigError("noise PSDs must be non-negative");
    rc.system.noise.freq_noise = Psd(s_freq * twopi_sq);
    rc.system.noise.amp_noise = Psd(s_amp);
    rc.system.noise.detection_floor = r.number_or("noise.detection_floor", 0.0);
    if (rc.system.noise.detection_floor < 0.0)
        throw ConfigError("noise.detection_floor must be non-negative");
    rc.system.noise.phase_jitter =
        r.number_or("noise.phase_jitter_deg", 0.0) * phys::pi / 180.0;
    if (rc.system.noise.phase_jitter < 0.0)
        throw ConfigError("noise.phase_jitter_deg must be non-negative");

    if (r.has("grid.start_hz") || r.has("grid.stop_hz") || r.has("grid.points")) {
        rc.grid.provided = true;
        rc.grid.start_hz = r.number("grid.start_hz");
        rc.grid.stop_hz = r.number("grid.stop_hz");
        rc.grid.points = static_cast<int>(r.integer("grid.points"));
        if (rc.grid.points < 2) fail(r.line_of("grid.points"), "need >= 2 points");
        if (rc.grid.stop_hz <= rc.grid.start_hz)
            fail(r.line_of("grid.stop_hz"), "grid.stop_hz must exceed grid.start_hz");
        const std::string scale = r.word_or("grid.scale", "linear");
        if (scale == "linear") rc.grid.scale = GridScale::linear;
        else if (scale == "log") rc.grid.scale = GridScale::log;
        else fail(r.line_of("grid.scale"), "grid.scale must be linear or log");
        if (rc.grid.scale == GridScale::log && rc.grid.start_hz <= 0.0)
            fail(r.line_of("grid.start_hz"), "log grid needs start_hz > 0");
    } else {
        r.word_or("grid.scale", "linear");
    }

    rc.format = r.word_or("output.format", "csv");
    if (rc.format != "csv" && rc.format != "json")
        fail(r.line_of("output.format"), "output.format must be csv or json");
    rc.out_path = r.has("output.path") ? r.word("output.path") : "";

    rc.phase_mode = r.word_or("output.phase_deg", "opt");
    if (rc.phase_mode != "opt") {
        try {
            rc.phase_value = std::stod(rc.phase_mode) * phys::pi / 180.0;
            rc.phase_mode = "value";
        } catch (const std::logic_error&) {
            fail(r.line_of("output.phase_deg"),
                 "output.phase_deg must be a number or 'opt'");
        }
    }

    if (r.has("sweep.detunings_over_kappa"))
        for (double d : r.list("sweep.detunings_over_kappa"))
            rc.sweep_detunings.push_back(d * rc.system.cavity.kappa);
    if (r.has("sweep.phases_deg"))
        for (double p : r.list("sweep.phases_deg"))
            rc.sweep_phases.push_back(p * phys::pi / 180.0);
    if (r.has("sweep.powers_w"))
        rc.sweep_powers = r.list("sweep.powers_w");
    if (r.has("sweep.jitters_deg"))
        for (double j : r.list("sweep.jitters_deg"))
            rc.sweep_jitters.push_back(j * phys::pi / 180.0);

    rc.map_kind = r.word_or("map.kind", "detuning_phase");
    if (rc.map_kind != "detuning_phase" && rc.map_kind != "jitter")
        fail(r.line_of("map.kind"), "map.kind must be detuning_phase or jitter");

    const std::string sig = r.word_or("signal.kind", "pdh");
    if (sig == "pdh") rc.signal = SignalKind::pdh;
    else if (sig == "reflected") rc.signal = SignalKind::reflected;
    else if (sig == "two_tone") rc.signal = SignalKind::two_tone;
    else fail(r.line_of("signal.kind"), "signal.kind must be pdh, reflected or two_tone");
    rc.signal_gain = r.number_or("signal.gain", 1.0);

    rc.pump_power = r.number_or("pump.power_w", 0.0);
    rc.pump_detuning =
        r.number_or("pump.detuning_over_kappa", 0.0) * rc.system.cavity.kappa;

    rc.sim_dt = r.number_or("sim.dt_s", 0.0);
    rc.sim_duration = r.number_or("sim.duration_s", 0.0);
    rc.sim_decimation = static_cast<int>(r.integer_or("sim.decimation", 0));
    rc.sim_dump_path = r.has("sim.dump_path") ? r.word("sim.dump_path") : "";

    rc.validate_n_random =
        static_cast<int>(r.integer_or("validate.n_random", 10000));
    const std::string td = r.word_or("validate.time_domain", "true");
    if (td != "true" && td != "false")
        fail(r.line_of("validate.time_domain"), "expected true or false");
    rc.validate_time_domain = td == "true";

    rc.seed = static_cast<std::uint64_t>(r.integer_or("run.seed", 1));

    r.check_all_consumed();
    rc.resolved = r.resolved();
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_config(os.str());
}

std::string config_hash(const RunConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
    };
    for (const auto& [k, v] : cfg.resolved) {
        mix(k);
        mix("=");
        mix(v);
        mix("\n");
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace pondera
