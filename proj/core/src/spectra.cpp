#include "pondera/spectra.hpp"
#include "pondera/constants.hpp"
#include "pondera/system.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pondera {

namespace {
constexpr complex I{0.0, 1.0};

double thermal_spectrum(double omega, const MechanicalMode& mech) {
    const double pref = mech.gamma_m / mech.omega_m;
    if (mech.temperature == 0.0) return pref * std::abs(omega);
    const double x = phys::hbar * omega / (2.0 * phys::k_boltzmann * mech.temperature);
    if (std::abs(x) < 1e-8)  // analytic limit of w*coth(x)
        return pref * (2.0 * phys::k_boltzmann * mech.temperature / phys::hbar);
    return pref * omega / std::tanh(x);
}
} // namespace

InputSpectra input_noise_spectra(double omega, const SystemConfig& cfg) {
    InputSpectra in;
    in.s_in = 1.0;
    in.s_thermal = thermal_spectrum(omega, cfg.mech);
    in.s_freq = cfg.noise.freq_noise(omega);
    in.s_amp = cfg.noise.amp_noise(omega);
    return in;
}

SpectrumPoint quadrature_spectra(double omega, const SystemConfig& cfg,
                                 const SteadyState& st) {
    const NuSet p = nu_set(omega, cfg, st);   // +w
    const NuSet m = nu_set(-omega, cfg, st);  // -w, direct substitution

    // lambda_ij^{+-}(w) = nu_i(w) +- nu_j*(-w), needed at both signs of w
    const complex l12p = p.nu1 + std::conj(m.nu2);
    const complex l12p_m = m.nu1 + std::conj(p.nu2);
    const complex l12m = p.nu1 - std::conj(m.nu2);
    const complex l12m_m = m.nu1 - std::conj(p.nu2);
    const complex l34p = p.nu3 + std::conj(m.nu4);
    const complex l34p_m = m.nu3 + std::conj(p.nu4);
    const complex l34m = p.nu3 - std::conj(m.nu4);
    const complex l34m_m = m.nu3 - std::conj(p.nu4);

    const double k2 = cfg.cavity.kappa2;
    const double alpha2 = std::norm(st.alpha);
    const complex e2t = std::exp(2.0 * I * st.theta);
    const InputSpectra in = input_noise_spectra(omega, cfg);

    SpectrumPoint pt;
    pt.omega = omega;

    pt.sx.quan = 0.5 * (std::norm(l12p) + std::norm(l12p_m)) +
                 (std::norm(l34p) + std::norm(l34p_m)) * k2;
    pt.sx.freq = (std::norm(l34p + std::conj(l34p_m)) -
                  2.0 * std::real((1.0 + e2t) * l34p * l34p_m)) *
                 alpha2 * in.s_freq;
    pt.sx.ampl = std::norm(l12p + std::conj(l12p_m)) * in.s_amp;
    pt.sx.ther = std::norm(p.nu_t + std::conj(m.nu_t)) * in.s_thermal;

    pt.sy.quan = 0.5 * (std::norm(l12m) + std::norm(l12m_m)) +
                 (std::norm(l34m) + std::norm(l34m_m)) * k2;
    pt.sy.freq = (std::norm(l34m - std::conj(l34m_m)) +
                  2.0 * std::real((1.0 + e2t) * l34m * l34m_m)) *
                 alpha2 * in.s_freq;
    pt.sy.ampl = std::norm(l12m - std::conj(l12m_m)) * in.s_amp;
    pt.sy.ther = std::norm(p.nu_t - std::conj(m.nu_t)) * in.s_thermal;

    const complex xi12 = p.nu1 * m.nu2 + m.nu1 * p.nu2;
    const complex xi34 = p.nu3 * m.nu4 + m.nu3 * p.nu4;
    const complex eta34 = p.nu3 * m.nu3 - std::conj(p.nu4) * std::conj(m.nu4);
    const complex zeta34 = (p.nu3 + p.nu4) * (m.nu3 + m.nu4);
    // zeta12 by structural analogy with zeta34; cross-checked against the
    // first-principles oracle in validate.
    const complex zeta12 = (p.nu1 + p.nu2) * (m.nu1 + m.nu2);

    pt.sxy.quan = std::imag(xi12) + 2.0 * std::imag(xi34) * k2;
    pt.sxy.freq =
        2.0 * std::imag(zeta34 - (1.0 + e2t) * eta34) * alpha2 * in.s_freq;
    pt.sxy.ampl = 2.0 * std::imag(zeta12) * in.s_amp;
    pt.sxy.ther = 2.0 * std::imag(p.nu_t * m.nu_t) * in.s_thermal;

    return pt;
}

double homodyne_spectrum(const SpectrumPoint& pt, double phi) {
    const double sx = pt.sx.total(), sy = pt.sy.total(), sxy = pt.sxy.total();
    return 0.5 * (sx + sy) + 0.5 * (sx - sy) * std::cos(2.0 * phi) +
           sxy * std::sin(2.0 * phi);
}

OptimalPoint optimal_spectrum(const SpectrumPoint& pt) {
    const double sx = pt.sx.total(), sy = pt.sy.total(), sxy = pt.sxy.total();
    const double r = std::hypot(sx - sy, 2.0 * sxy);
    OptimalPoint opt;
    opt.s_opt = 0.5 * (sx + sy - r);
    if (r == 0.0) {
        opt.degenerate = true;
        opt.phi_opt = 0.0;
        return opt;
    }
    const double s = (sxy >= 0.0) ? 1.0 : -1.0;
    const double arg = std::clamp((sx - sy) / r, -1.0, 1.0);
    double phi = 0.5 * (phys::pi + s * std::acos(arg));
    phi = std::fmod(phi, phys::pi);
    if (phi < 0.0) phi += phys::pi;
    opt.phi_opt = phi;
    return opt;
}

double averaged_spectrum(const SpectrumPoint& pt, double phi, double dphi) {
    const double sx = pt.sx.total(), sy = pt.sy.total(), sxy = pt.sxy.total();
    const double att = std::exp(-2.0 * dphi * dphi);
    return 0.5 * (sx + sy) +
           att * (0.5 * (sx - sy) * std::cos(2.0 * phi) +
                  sxy * std::sin(2.0 * phi));
}

double averaged_optimal_spectrum(const SpectrumPoint& pt, double dphi) {
    const double sx = pt.sx.total(), sy = pt.sy.total(), sxy = pt.sxy.total();
    const double att = std::exp(-2.0 * dphi * dphi);
    return 0.5 * (sx + sy - att * std::hypot(sx - sy, 2.0 * sxy));
}

double heisenberg_margin(const SpectrumPoint& pt) {
    const double sxy = pt.sxy.total();
    return pt.sx.total() * pt.sy.total() - sxy * sxy - 1.0;
}

SqueezingReport squeezing_report(const std::vector<double>& grid, double phi,
                                 const SystemConfig& cfg, const SteadyState& st) {
    SqueezingReport rep;
    rep.phi = phi;
    if (grid.empty()) return rep;

    auto value = [&](double w) {
        return homodyne_spectrum(quadrature_spectra(w, cfg, st), phi);
    };

    std::vector<double> vals(grid.size());
    rep.phi_opt_trace.resize(grid.size());
    rep.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const SpectrumPoint pt = quadrature_spectra(grid[i], cfg, st);
        vals[i] = homodyne_spectrum(pt, phi);
        rep.phi_opt_trace[i] = optimal_spectrum(pt).phi_opt;
        if (vals[i] < rep.min_value) {
            rep.min_value = vals[i];
            rep.min_omega = grid[i];
        }
    }

    const double tol = cfg.mech.gamma_m / 100.0;
    auto refine_edge = [&](double lo, double hi) {
        // sign change of S - 1 bracketed in [lo, hi]
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if ((value(lo) - 1.0) * (value(mid) - 1.0) <= 0.0)
                hi = mid;
            else
                lo = mid;
        }
        return 0.5 * (lo + hi);
    };

    bool inside = vals[0] < 1.0;
    SqueezingBand band;
    if (inside) band.omega_lo = grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const bool below = vals[i] < 1.0;
        if (below && !inside) {
            band.omega_lo = refine_edge(grid[i - 1], grid[i]);
            inside = true;
        } else if (!below && inside) {
            band.omega_hi = refine_edge(grid[i - 1], grid[i]);
            rep.bands.push_back(band);
            inside = false;
        }
    }
    if (inside) {
        band.omega_hi = grid.back();
        rep.bands.push_back(band);
    }

    // polish the minimum within its grid cell (golden section)
    if (rep.min_value < std::numeric_limits<double>::infinity()) {
        auto it = std::lower_bound(grid.begin(), grid.end(), rep.min_omega);
        std::size_t i = static_cast<std::size_t>(it - grid.begin());
        double a = grid[i > 0 ? i - 1 : 0];
        double b = grid[std::min(i + 1, grid.size() - 1)];
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = value(x1), f2 = value(x2);
        while (b - a > tol) {
            if (f1 < f2) {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - gr * (b - a); f1 = value(x1);
            } else {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + gr * (b - a); f2 = value(x2);
            }
        }
        const double wmin = 0.5 * (a + b);
        const double vmin = value(wmin);
        if (vmin < rep.min_value) {
            rep.min_value = vmin;
            rep.min_omega = wmin;
        }
    }
    rep.min_db = 10.0 * std::log10(rep.min_value);
    return rep;
}

DetuningPhaseMap detuning_phase_map(const std::vector<double>& detunings,
                                    const std::vector<double>& phases,
                                    const SystemConfig& cfg) {
    DetuningPhaseMap map;
    map.detunings = detunings;
    map.phases = phases;
    map.cells.resize(detunings.size());
    for (std::size_t i = 0; i < detunings.size(); ++i) {
        SystemConfig c = cfg;
        c.drive.kind = DetuningKind::effective;
        c.drive.detuning = detunings[i];
        const SteadyState st = steady_state(c);
        auto& row = map.cells[i];
        row.resize(phases.size());
        if (!stability_check(c, st).is_stable) {
            for (auto& cell : row) cell.unstable = true;
            continue;
        }
        const SpectrumPoint pt = quadrature_spectra(c.mech.omega_m, c, st);
        for (std::size_t j = 0; j < phases.size(); ++j)
            row[j].value = homodyne_spectrum(pt, phases[j]);
    }
    return map;
}

JitterMap jitter_map(const std::vector<double>& omegas,
                     const std::vector<double>& jitters, double phi,
                     const SystemConfig& cfg, const SteadyState& st) {
    JitterMap map;
    map.omegas = omegas;
    map.jitters = jitters;
    map.values.resize(jitters.size());
    std::vector<SpectrumPoint> pts(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i)
        pts[i] = quadrature_spectra(omegas[i], cfg, st);
    for (std::size_t j = 0; j < jitters.size(); ++j) {
        map.values[j].resize(omegas.size());
        for (std::size_t i = 0; i < omegas.size(); ++i)
            map.values[j][i] = averaged_spectrum(pts[i], phi, jitters[j]);
    }
    return map;
}

} // namespace pondera
