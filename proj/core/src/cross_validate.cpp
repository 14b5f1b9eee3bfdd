#include "pondera/constants.hpp"
#include "pondera/rng.hpp"
#include "pondera/spectra.hpp"
#include "pondera/system.hpp"
#include "pondera/validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pondera {

bool ValidationReport::all_pass() const {
    return std::all_of(entries.begin(), entries.end(),
                       [](const ValidationEntry& e) { return e.pass || e.skipped; });
}

namespace {

double rel_dev(complex a, complex b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale < 1e-250) return 0.0;
    return std::abs(a - b) / scale;
}

double log_uniform(Xoshiro256pp& rng, double lo, double hi) {
    return lo * std::pow(hi / lo, rng.uniform());
}

// Random physically-plausible stable configuration for oracle comparisons.
SystemConfig random_config(Xoshiro256pp& rng) {
    for (;;) {
        const double kappa = log_uniform(rng, 3e5, 3e8);
        const double eta = rng.uniform();
        const double omega_m = log_uniform(rng, 3e4, 3e6);
        const double quality = log_uniform(rng, 1e2, 1e6);
        const double mass = log_uniform(rng, 1e-9, 1e-6);
        const double power = log_uniform(rng, 1e-5, 5e-2);
        const double detuning = (2.0 * rng.uniform() - 1.0) * 0.3 * kappa;

        SystemConfig cfg;
        const double length = 1e-3;
        cfg.cavity = cavity_from_rates(1064e-9, length, (1.0 - eta) * kappa,
                                       eta * kappa);
        cfg.mech = make_mechanical_mode(omega_m, quality, mass, 300.0);
        cfg.drive = make_drive(cfg.cavity, power, DetuningKind::effective, detuning);
        cfg.g0 = single_photon_coupling(cfg.cavity, cfg.mech);
        cfg.noise.freq_noise = Psd(log_uniform(rng, 1e-2, 1e6));
        cfg.noise.amp_noise = Psd(rng.uniform());
        const SteadyState st = steady_state(cfg);
        if (stability_check(cfg, st).is_stable) return cfg;
    }
}

ValidationEntry oracle_entry(const SystemConfig& base_cfg,
                             const CrossValidateSpec& spec) {
    ValidationEntry e;
    e.name = "nu coefficients: closed form vs matrix solve";
    Xoshiro256pp rng(spec.seed);
    double worst = 0.0;
    for (int i = 0; i < spec.n_random_configs; ++i) {
        const SystemConfig cfg = (i == 0) ? base_cfg : random_config(rng);
        const SteadyState st = steady_state(cfg);
        const double span =
            std::max(3.0 * cfg.mech.omega_m, 0.5 * cfg.cavity.kappa);
        const double omega = (2.0 * rng.uniform() - 1.0) * span;
        NuSet closed = nu_set(omega, cfg, st);
        if (spec.nu2_perturbation != 0.0)
            closed.nu2 *= 1.0 + spec.nu2_perturbation;
        const OracleCoefficients oc = fourier_matrix_oracle(omega, cfg, st);
        if (oc.singular) continue;
        worst = std::max({worst, rel_dev(closed.nu1, oc.nu1),
                          rel_dev(closed.nu2, oc.nu2), rel_dev(closed.nu3, oc.nu3),
                          rel_dev(closed.nu4, oc.nu4), rel_dev(closed.nu_t, oc.nu_t)});
    }
    e.max_deviation = worst;
    e.pass = worst < 1e-10;
    std::ostringstream os;
    os << spec.n_random_configs << " random stable configurations";
    e.detail = os.str();
    return e;
}

ValidationEntry amp_pathway_entry(const SystemConfig& cfg) {
    // The amplitude-noise channel drives both field quadratures through the
    // input port; its output coefficient must equal nu1 + nu2, the
    // combination behind the adopted zeta_12 cross-spectrum.
    ValidationEntry e;
    e.name = "amplitude pathway equals nu1 + nu2";
    const SteadyState st = steady_state(cfg);
    Xoshiro256pp rng(99);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double omega =
            (2.0 * rng.uniform() - 1.0) * 3.0 * cfg.mech.omega_m;
        const NuSet nu = nu_set(omega, cfg, st);
        const OracleCoefficients oc = fourier_matrix_oracle(omega, cfg, st);
        worst = std::max(worst, rel_dev(nu.nu1 + nu.nu2, oc.amp_pathway));
    }
    e.max_deviation = worst;
    e.pass = worst < 1e-10;
    return e;
}

ValidationEntry spectra_entry(const SystemConfig& base_cfg,
                              const CrossValidateSpec& spec) {
    ValidationEntry e;
    e.name = "spectrum decomposition vs first-principles assembly";
    Xoshiro256pp rng(spec.seed + 1);
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
        const SystemConfig cfg = (i % 4 == 0) ? base_cfg : random_config(rng);
        const SteadyState st = steady_state(cfg);
        const double omega = log_uniform(rng, 1e-2 * cfg.mech.omega_m,
                                         3.0 * cfg.mech.omega_m);
        const SpectrumPoint pt = quadrature_spectra(omega, cfg, st);
        const OracleSpectrum os = oracle_spectrum_point(omega, cfg, st);
        const double scale = std::max({std::abs(pt.sx.total()),
                                       std::abs(pt.sy.total()), 1.0});
        worst = std::max({worst, std::abs(pt.sx.total() - os.sx) / scale,
                          std::abs(pt.sy.total() - os.sy) / scale,
                          std::abs(pt.sxy.total() - os.sxy) / scale});
    }
    e.max_deviation = worst;
    e.pass = worst < 1e-9;
    return e;
}

// Boxcar-smooth `m` adjacent bins of a PSD (used for band comparisons).
std::vector<double> smooth(const std::vector<double>& v, std::size_t m) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t lo = i >= m / 2 ? i - m / 2 : 0;
        const std::size_t hi = std::min(v.size(), lo + m);
        double s = 0.0;
        for (std::size_t j = lo; j < hi; ++j) s += v[j];
        out[i] = s / static_cast<double>(hi - lo);
    }
    return out;
}

} // namespace

ValidationReport cross_validate(const SystemConfig& cfg,
                                const CrossValidateSpec& spec) {
    ValidationReport rep;
    rep.entries.push_back(oracle_entry(cfg, spec));
    rep.entries.push_back(amp_pathway_entry(cfg));
    rep.entries.push_back(spectra_entry(cfg, spec));

    if (!spec.run_time_domain) return rep;

    ValidationEntry td;
    td.name = "time domain: Welch PSD of Y_out vs analytic";
    ValidationEntry dip;
    dip.name = "time domain: cancellation dip within 3 gamma_m";

    const SteadyState st = steady_state(cfg);
    if (!stability_check(cfg, st).is_stable) {
        td.skipped = true;
        td.detail = "unstable: skipped time-domain";
        dip.skipped = true;
        dip.detail = td.detail;
        rep.entries.push_back(td);
        rep.entries.push_back(dip);
        return rep;
    }

    const double gamma_m = cfg.mech.gamma_m;
    const double omega_m = cfg.mech.omega_m;
    SdeParams params;
    params.dt = 0.099 / cfg.cavity.kappa;
    params.decimation = std::max(1, static_cast<int>(2e-7 / params.dt));
    const double h = params.dt * params.decimation;
    // segment long enough to resolve gamma_m/2, power-of-two samples
    std::size_t seg = 1;
    while (static_cast<double>(seg) * h < 4.0 * phys::pi / gamma_m) seg <<= 1;
    const int want_segments = 220;
    params.duration = spec.sim_duration > 0.0
                          ? spec.sim_duration
                          : static_cast<double>(seg) * h *
                                (0.5 * (want_segments + 1));
    params.seed = spec.seed + 7;

    const TrajectoryBundle tb = sde_simulate(cfg, st, params);
    const WelchResult wr = welch_psd(tb.y_out, h, seg, 0.5);

    // compare over [omega_m - 20 gamma_m, omega_m + 20 gamma_m]
    std::vector<double> sim, ana, freq;
    for (std::size_t j = 1; j + 1 < wr.freq_hz.size(); ++j) {
        const double w = phys::hz_to_rad(wr.freq_hz[j]);
        if (w < omega_m - 20.0 * gamma_m || w > omega_m + 20.0 * gamma_m)
            continue;
        const double x = 0.5 * w * h;
        const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
        sim.push_back(wr.psd[j] / (2.0 * sinc * sinc));
        ana.push_back(homodyne_spectrum(quadrature_spectra(w, cfg, st),
                                        0.5 * phys::pi));
        freq.push_back(w);
    }
    const std::size_t m = 5;
    const std::vector<double> sim_s = smooth(sim, m);
    const std::vector<double> ana_s = smooth(ana, m);
    double worst = 0.0;
    for (std::size_t j = 0; j < sim_s.size(); ++j)
        worst = std::max(worst, std::abs(sim_s[j] / ana_s[j] - 1.0));
    td.max_deviation = worst;
    td.pass = worst < 0.10;
    {
        std::ostringstream os;
        os << wr.n_segments << " segments, " << sim_s.size()
           << " band bins (smoothed over " << m << ")";
        td.detail = os.str();
    }
    rep.entries.push_back(td);

    const std::size_t imin = static_cast<std::size_t>(
        std::min_element(sim_s.begin(), sim_s.end()) - sim_s.begin());
    dip.max_deviation = std::abs(freq[imin] - omega_m) / gamma_m;
    dip.pass = dip.max_deviation < 3.0;
    rep.entries.push_back(dip);
    return rep;
}

} // namespace pondera
