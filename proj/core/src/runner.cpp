#include "pondera/runner.hpp"
#include "pondera/constants.hpp"
#include "pondera/expsignals.hpp"
#include "pondera/spectra.hpp"
#include "pondera/system.hpp"
#include "pondera/validate.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

namespace pondera {

using nlohmann::json;

unsigned worker_count() {
    if (const char* env = std::getenv("PONDERA_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

namespace {

constexpr const char* tool_version = "0.1.0";

// deterministic fan-out: results land in index order regardless of timing
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::string> units;
    std::vector<std::vector<std::string>> rows;  // cells already formatted
    std::vector<std::pair<std::string, std::string>> extra_meta;
};

void write_output(const std::string& command, const RunConfig& cfg,
                  const Table& table, std::ostream& os) {
    const std::string hash = config_hash(cfg);
    if (cfg.format == "csv") {
        os << "# pondera " << tool_version << "\n";
        os << "# command: " << command << "\n";
        os << "# config_hash: " << hash << "\n";
        for (const auto& [k, v] : cfg.resolved) os << "# config: " << k << " = " << v << "\n";
        for (const auto& [k, v] : table.extra_meta) os << "# " << k << ": " << v << "\n";
        os << "# units: ";
        for (std::size_t i = 0; i < table.units.size(); ++i)
            os << (i ? "," : "") << table.units[i];
        os << "\n";
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            os << (i ? "," : "") << table.columns[i];
        os << "\n";
        for (const auto& row : table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << row[i];
            os << "\n";
        }
    } else {
        json j;
        j["tool"] = "pondera";
        j["version"] = tool_version;
        j["command"] = command;
        j["config_hash"] = hash;
        json jc = json::object();
        for (const auto& [k, v] : cfg.resolved) jc[k] = v;
        j["config"] = jc;
        for (const auto& [k, v] : table.extra_meta) j[k] = v;
        j["columns"] = table.columns;
        j["units"] = table.units;
        json rows = json::array();
        for (const auto& row : table.rows) {
            json r = json::array();
            for (const auto& cell : row) {
                try {
                    std::size_t pos = 0;
                    const double v = std::stod(cell, &pos);
                    if (pos == cell.size()) { r.push_back(v); continue; }
                } catch (const std::logic_error&) {}
                r.push_back(cell);
            }
            rows.push_back(r);
        }
        j["rows"] = rows;
        os << j.dump(2) << "\n";
    }
}

int emit(const std::string& command, const RunConfig& cfg, const Table& table,
         std::ostream& log) {
    if (cfg.out_path.empty()) {
        write_output(command, cfg, table, std::cout);
        return exit_ok;
    }
    std::ofstream os(cfg.out_path);
    if (!os) {
        log << "error: cannot open output path " << cfg.out_path << "\n";
        return exit_config_error;
    }
    write_output(command, cfg, table, os);
    log << command << ": wrote " << cfg.out_path << "\n";
    return exit_ok;
}

SteadyState resolve_steady(const RunConfig& cfg) {
    return cfg.self_consistent
               ? steady_state(cfg.system, SteadyStateMode::self_consistent)
               : steady_state(cfg.system);
}

std::vector<double> build_grid(const RunConfig& cfg, double def_start_hz,
                               double def_stop_hz, int def_points) {
    const GridSpec& g = cfg.grid;
    const double start = g.provided ? g.start_hz : def_start_hz;
    const double stop = g.provided ? g.stop_hz : def_stop_hz;
    const int n = g.provided ? g.points : def_points;
    std::vector<double> omega(n);
    if (g.provided && g.scale == GridScale::log) {
        const double ratio = stop / start;
        for (int i = 0; i < n; ++i)
            omega[i] = phys::hz_to_rad(start * std::pow(ratio, double(i) / (n - 1)));
    } else {
        for (int i = 0; i < n; ++i)
            omega[i] =
                phys::hz_to_rad(start + (stop - start) * double(i) / (n - 1));
    }
    return omega;
}

// dip- and band-feature commands need >= 20 grid points per gamma_m
void check_feature_resolution(const RunConfig& cfg,
                              const std::vector<double>& omega) {
    if (omega.size() < 2) throw ConfigError("grid needs at least 2 points");
    const double spacing = (omega.back() - omega.front()) /
                           static_cast<double>(omega.size() - 1);
    if (spacing > cfg.system.mech.gamma_m / 20.0)
        throw ConfigError(
            "grid too coarse for a dip feature: need >= 20 points per "
            "mechanical linewidth (spacing " +
            fmt(spacing) + " rad/s vs gamma_m " + fmt(cfg.system.mech.gamma_m) +
            " rad/s)");
}

double resolve_phase(const RunConfig& cfg, const SteadyState& st) {
    if (cfg.phase_mode == "value") return cfg.phase_value;
    const SpectrumPoint pt =
        quadrature_spectra(cfg.system.mech.omega_m, cfg.system, st);
    return optimal_spectrum(pt).phi_opt;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
    const SteadyState st = resolve_steady(cfg);
    const StabilityResult stab = stability_check(cfg.system, st);
    if (!stab.is_stable) {
        log << "spectrum: operating point is dynamically unstable (max "
               "eigenvalue real part "
            << stab.max_real << " 1/s); refusing to emit a spectrum\n";
        return exit_validation_failure;
    }
    const double f_m = phys::rad_to_hz(cfg.system.mech.omega_m);
    const double half = 400.0 * phys::rad_to_hz(cfg.system.mech.gamma_m);
    const std::vector<double> omega =
        build_grid(cfg, f_m - half, f_m + half, 4001);
    const double phi = resolve_phase(cfg, st);

    Table t;
    t.columns = {"freq_hz",
                 "sx_quan", "sx_freq", "sx_ampl", "sx_ther", "sx_total",
                 "sy_quan", "sy_freq", "sy_ampl", "sy_ther", "sy_total",
                 "sxy_quan", "sxy_freq", "sxy_ampl", "sxy_ther", "sxy_total",
                 "s_d_phi", "s_d_phi_avg", "s_opt", "phi_opt_deg",
                 "heisenberg_margin"};
    t.units.assign(t.columns.size(), "shot_noise_units");
    t.units[0] = "Hz";
    t.units[19] = "deg";
    t.extra_meta.emplace_back("phase_deg", fmt(phi * 180.0 / phys::pi));
    t.rows.resize(omega.size());
    const double jitter = cfg.system.noise.phase_jitter;
    parallel_for(omega.size(), [&](std::size_t i) {
        const SpectrumPoint pt = quadrature_spectra(omega[i], cfg.system, st);
        const OptimalPoint opt = optimal_spectrum(pt);
        t.rows[i] = {fmt(phys::rad_to_hz(omega[i])),
                     fmt(pt.sx.quan), fmt(pt.sx.freq), fmt(pt.sx.ampl),
                     fmt(pt.sx.ther), fmt(pt.sx.total()),
                     fmt(pt.sy.quan), fmt(pt.sy.freq), fmt(pt.sy.ampl),
                     fmt(pt.sy.ther), fmt(pt.sy.total()),
                     fmt(pt.sxy.quan), fmt(pt.sxy.freq), fmt(pt.sxy.ampl),
                     fmt(pt.sxy.ther), fmt(pt.sxy.total()),
                     fmt(homodyne_spectrum(pt, phi)),
                     fmt(averaged_spectrum(pt, phi, jitter)),
                     fmt(opt.s_opt),
                     fmt(opt.phi_opt * 180.0 / phys::pi),
                     fmt(heisenberg_margin(pt))};
    });
    return emit("spectrum", cfg, t, log);
}

int cmd_cancel(const RunConfig& cfg, std::ostream& log) {
    std::vector<double> detunings = cfg.sweep_detunings;
    if (detunings.empty()) detunings.push_back(cfg.system.drive.detuning);

    const double f_m = phys::rad_to_hz(cfg.system.mech.omega_m);
    const double half = 200.0 * phys::rad_to_hz(cfg.system.mech.gamma_m);
    const std::vector<double> omega =
        build_grid(cfg, f_m - half, f_m + half, 4001);
    check_feature_resolution(cfg, omega);

    Table t;
    t.columns = {"freq_hz"};
    t.units = {"Hz"};
    for (std::size_t d = 0; d < detunings.size(); ++d) {
        const std::string tag = "_d" + std::to_string(d);
        t.columns.push_back("ratio_abs" + tag);
        t.columns.push_back("response" + tag);
        t.units.push_back("dimensionless");
        t.units.push_back("normalized");
        t.extra_meta.emplace_back("detuning_over_kappa" + tag,
                                  fmt(detunings[d] / cfg.system.cavity.kappa));
    }
    t.rows.resize(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i)
        t.rows[i].push_back(fmt(phys::rad_to_hz(omega[i])));

    std::vector<std::vector<double>> ratios(detunings.size()),
        responses(detunings.size());
    parallel_for(detunings.size(), [&](std::size_t d) {
        SystemConfig sys = cfg.system;
        sys.drive.kind = DetuningKind::effective;
        sys.drive.detuning = detunings[d];
        const SteadyState st = steady_state(sys);
        ratios[d].resize(omega.size());
        for (std::size_t i = 0; i < omega.size(); ++i)
            ratios[d][i] = std::abs(cancellation_ratio(omega[i], sys, st));
        ResponseCurve curve;
        const double floor = sys.noise.detection_floor;
        switch (cfg.signal) {
            case SignalKind::pdh:
                curve = pdh_response_curve(omega, sys, st, floor, cfg.signal_gain);
                break;
            case SignalKind::reflected:
                curve = reflected_response_curve(omega, sys, st, floor,
                                                 cfg.signal_gain);
                break;
            case SignalKind::two_tone: {
                SystemConfig pump = cfg.system;
                pump.drive = make_drive(pump.cavity, cfg.pump_power,
                                        DetuningKind::effective,
                                        cfg.pump_detuning);
                curve = two_tone_pdh_curve(omega, sys, pump, floor,
                                           cfg.signal_gain);
                break;
            }
        }
        responses[d] = std::move(curve.amplitude);
    });
    for (std::size_t d = 0; d < detunings.size(); ++d)
        for (std::size_t i = 0; i < omega.size(); ++i) {
            t.rows[i].push_back(fmt(ratios[d][i]));
            t.rows[i].push_back(fmt(responses[d][i]));
        }
    return emit("cancel", cfg, t, log);
}

int cmd_map(const RunConfig& cfg, std::ostream& log) {
    Table t;
    if (cfg.map_kind == "detuning_phase") {
        std::vector<double> detunings = cfg.sweep_detunings;
        if (detunings.empty()) {
            for (int i = 0; i < 81; ++i)
                detunings.push_back((0.001 + 0.099 * i / 80.0) *
                                    cfg.system.cavity.kappa);
        }
        std::vector<double> phases = cfg.sweep_phases;
        if (phases.empty()) {
            for (int i = 0; i < 181; ++i)
                phases.push_back(phys::pi * i / 180.0);
        }
        const DetuningPhaseMap map =
            detuning_phase_map(detunings, phases, cfg.system);
        t.columns = {"detuning_over_kappa"};
        t.units = {"dimensionless"};
        for (double p : phases) {
            t.columns.push_back("phi_" + fmt(p * 180.0 / phys::pi));
            t.units.push_back("shot_noise_units");
        }
        for (std::size_t i = 0; i < detunings.size(); ++i) {
            std::vector<std::string> row;
            row.push_back(fmt(detunings[i] / cfg.system.cavity.kappa));
            for (const MapCell& cell : map.cells[i])
                row.push_back(cell.unstable ? "unstable" : fmt(cell.value));
            t.rows.push_back(std::move(row));
        }
        t.extra_meta.emplace_back("map_kind", "detuning_phase");
        t.extra_meta.emplace_back("at", "omega_m");
    } else {
        const SteadyState st = resolve_steady(cfg);
        const double phi = resolve_phase(cfg, st);
        const double f_m = phys::rad_to_hz(cfg.system.mech.omega_m);
        const double half = 60.0 * phys::rad_to_hz(cfg.system.mech.gamma_m);
        const std::vector<double> omega =
            build_grid(cfg, f_m - half, f_m + half, 1201);
        std::vector<double> jitters = cfg.sweep_jitters;
        if (jitters.empty()) {
            for (int i = 0; i <= 100; ++i)
                jitters.push_back((phys::pi / 180.0) * 2.0 * i / 100.0);
        }
        const JitterMap map = jitter_map(omega, jitters, phi, cfg.system, st);
        const StabilityResult stab = stability_check(cfg.system, st);
        t.extra_meta.emplace_back("map_kind", "jitter");
        t.extra_meta.emplace_back("phase_deg", fmt(phi * 180.0 / phys::pi));
        t.extra_meta.emplace_back("stable", stab.is_stable ? "true" : "false");
        t.columns = {"jitter_deg"};
        t.units = {"deg"};
        for (double w : omega) {
            t.columns.push_back("f_" + fmt(phys::rad_to_hz(w)));
            t.units.push_back("shot_noise_units");
        }
        for (std::size_t j = 0; j < jitters.size(); ++j) {
            std::vector<std::string> row;
            row.push_back(fmt(jitters[j] * 180.0 / phys::pi));
            for (double v : map.values[j]) row.push_back(fmt(v));
            t.rows.push_back(std::move(row));
        }
    }
    return emit("map", cfg, t, log);
}

int cmd_squeeze(const RunConfig& cfg, std::ostream& log) {
    const SteadyState st = resolve_steady(cfg);
    const StabilityResult stab = stability_check(cfg.system, st);
    if (!stab.is_stable) {
        log << "squeeze: operating point is dynamically unstable; refusing\n";
        return exit_validation_failure;
    }
    const double f_m = phys::rad_to_hz(cfg.system.mech.omega_m);
    const double half = 400.0 * phys::rad_to_hz(cfg.system.mech.gamma_m);
    const std::vector<double> omega =
        build_grid(cfg, f_m - half, f_m + half, 8001);
    check_feature_resolution(cfg, omega);
    const double phi = resolve_phase(cfg, st);
    const SqueezingReport rep = squeezing_report(omega, phi, cfg.system, st);

    Table t;
    t.columns = {"freq_hz", "s_d_phi", "phi_opt_deg"};
    t.units = {"Hz", "shot_noise_units", "deg"};
    t.extra_meta.emplace_back("phase_deg", fmt(phi * 180.0 / phys::pi));
    t.extra_meta.emplace_back("min_value", fmt(rep.min_value));
    t.extra_meta.emplace_back("min_freq_hz", fmt(phys::rad_to_hz(rep.min_omega)));
    t.extra_meta.emplace_back("min_db", fmt(rep.min_db));
    t.extra_meta.emplace_back("n_bands", fmt(double(rep.bands.size())));
    for (std::size_t b = 0; b < rep.bands.size(); ++b) {
        t.extra_meta.emplace_back(
            "band" + std::to_string(b),
            fmt(phys::rad_to_hz(rep.bands[b].omega_lo)) + " to " +
                fmt(phys::rad_to_hz(rep.bands[b].omega_hi)) + " Hz");
    }
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const SpectrumPoint pt = quadrature_spectra(omega[i], cfg.system, st);
        t.rows.push_back({fmt(phys::rad_to_hz(omega[i])),
                          fmt(homodyne_spectrum(pt, phi)),
                          fmt(rep.phi_opt_trace[i] * 180.0 / phys::pi)});
    }
    return emit("squeeze", cfg, t, log);
}

int cmd_stability(const RunConfig& cfg, std::ostream& log) {
    std::vector<double> detunings = cfg.sweep_detunings;
    if (detunings.empty()) {
        for (int i = 0; i <= 2000; ++i)
            detunings.push_back((1e-4 + (3.0 - 1e-4) * i / 2000.0) *
                                cfg.system.cavity.kappa);
    }
    Table t;
    t.columns = {"detuning_over_kappa", "stable", "max_re_eig",
                 "re_eig1", "im_eig1", "re_eig2", "im_eig2",
                 "re_eig3", "im_eig3", "re_eig4", "im_eig4"};
    t.units = {"dimensionless", "bool", "1/s", "1/s", "rad/s", "1/s",
               "rad/s", "1/s", "rad/s", "1/s", "rad/s"};
    t.rows.resize(detunings.size());
    parallel_for(detunings.size(), [&](std::size_t i) {
        SystemConfig sys = cfg.system;
        sys.drive.kind = DetuningKind::effective;
        sys.drive.detuning = detunings[i];
        const SteadyState st = steady_state(sys);
        const StabilityResult res = stability_check(sys, st);
        std::vector<std::string> row{fmt(detunings[i] / sys.cavity.kappa),
                                     res.is_stable ? "1" : "0",
                                     fmt(res.max_real)};
        for (const complex& ev : res.eigenvalues) {
            row.push_back(fmt(ev.real()));
            row.push_back(fmt(ev.imag()));
        }
        t.rows[i] = std::move(row);
    });
    return emit("stability", cfg, t, log);
}

int cmd_validate(const RunConfig& cfg, std::ostream& log) {
    CrossValidateSpec spec;
    spec.n_random_configs = cfg.validate_n_random;
    spec.run_time_domain = cfg.validate_time_domain;
    spec.seed = cfg.seed;
    spec.sim_duration = cfg.sim_duration;
    const ValidationReport rep = cross_validate(cfg.system, spec);

    if (!cfg.sim_dump_path.empty()) {
        const SteadyState st = resolve_steady(cfg);
        SdeParams params;
        params.dt = cfg.sim_dt > 0.0 ? cfg.sim_dt : 0.099 / cfg.system.cavity.kappa;
        params.duration = cfg.sim_duration > 0.0 ? cfg.sim_duration
                                                 : 2000.0 / cfg.system.mech.gamma_m;
        params.decimation = cfg.sim_decimation > 0 ? cfg.sim_decimation : 1;
        params.seed = cfg.seed;
        const TrajectoryBundle tb = sde_simulate(cfg.system, st, params);
        std::ofstream os(cfg.sim_dump_path);
        tb.write_csv(os, config_hash(cfg));
        log << "validate: trajectory dumped to " << cfg.sim_dump_path << "\n";
    }

    Table t;
    t.columns = {"check", "status", "max_deviation", "detail"};
    t.units = {"text", "text", "dimensionless", "text"};
    for (const ValidationEntry& e : rep.entries) {
        t.rows.push_back({e.name,
                          e.skipped ? "skipped" : (e.pass ? "pass" : "FAIL"),
                          fmt(e.max_deviation), e.detail});
        log << (e.skipped ? "  [skip] " : (e.pass ? "  [pass] " : "  [FAIL] "))
            << e.name << " (max dev " << e.max_deviation << ") " << e.detail
            << "\n";
    }
    const int rc = emit("validate", cfg, t, log);
    if (rc != exit_ok) return rc;
    return rep.all_pass() ? exit_ok : exit_validation_failure;
}

} // namespace

int run_command(const std::string& command, const RunConfig& cfg,
                std::ostream& log) {
    try {
        if (command == "spectrum") return cmd_spectrum(cfg, log);
        if (command == "cancel") return cmd_cancel(cfg, log);
        if (command == "map") return cmd_map(cfg, log);
        if (command == "squeeze") return cmd_squeeze(cfg, log);
        if (command == "stability") return cmd_stability(cfg, log);
        if (command == "validate") return cmd_validate(cfg, log);
        log << "error: unknown command '" << command << "'\n";
        return exit_config_error;
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const ParameterError& e) {
        log << "parameter error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const UnstableError& e) {
        log << "unstable operating point: " << e.what() << "\n";
        return exit_validation_failure;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return exit_validation_failure;
    }
}

} // namespace pondera
