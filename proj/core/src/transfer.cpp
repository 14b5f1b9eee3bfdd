#include "pondera/transfer.hpp"

#include <cmath>

namespace pondera {

namespace {
constexpr complex I{0.0, 1.0};
} // namespace

complex chi0(double omega, const MechanicalMode& mech) {
    const double wm = mech.omega_m;
    return wm / complex(wm * wm - omega * omega, -omega * mech.gamma_m);
}

complex chi_eff(double omega, const SystemConfig& cfg, const SteadyState& st) {
    const double wm = cfg.mech.omega_m;
    const double kappa = cfg.cavity.kappa;
    const double delta = st.detuning;
    const double g2 = std::norm(st.coupling);
    const complex cav = complex(kappa, -omega) * complex(kappa, -omega) +
                        delta * delta;
    const complex den =
        complex(wm * wm - omega * omega, -omega * cfg.mech.gamma_m) -
        g2 * delta * wm / cav;
    if (den == complex(0.0, 0.0))
        throw SingularityError("chi_eff pole", omega);
    return wm / den;
}

NuSet nu_set(double omega, const SystemConfig& cfg, const SteadyState& st) {
    const double kappa = cfg.cavity.kappa;
    const double k1 = cfg.cavity.kappa1;
    const double eta = cfg.cavity.eta;
    const double delta = st.detuning;
    const complex d1 = complex(kappa, delta - omega);
    const complex d2 = complex(kappa, -(delta + omega));
    const complex ce = chi_eff(omega, cfg, st);
    const complex g = st.coupling;
    const double g2 = std::norm(g);
    const double s1 = std::sqrt(2.0 * k1);

    NuSet nu;
    nu.nu1 = complex((1.0 - 2.0 * eta) * kappa, -(delta - omega)) / d1 +
             I * g2 * k1 * ce / (d1 * d1);
    nu.nu2 = I * g * g * k1 * ce / (d1 * d2);
    nu.nu3 = (nu.nu1 + 1.0) / s1;
    nu.nu4 = nu.nu2 / s1;
    nu.nu_t = I * g * std::sqrt(k1) * ce / d1;
    return nu;
}

TransferSet evaluate_transfer(const std::vector<double>& grid,
                              const SystemConfig& cfg, const SteadyState& st) {
    TransferSet ts;
    ts.omega = grid;
    ts.source = st;
    const std::size_t n = grid.size();
    ts.nu1.resize(n); ts.nu2.resize(n); ts.nu3.resize(n); ts.nu4.resize(n);
    ts.nu_t.resize(n); ts.chi0_v.resize(n); ts.chi_eff_v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const NuSet nu = nu_set(grid[i], cfg, st);
        ts.nu1[i] = nu.nu1;
        ts.nu2[i] = nu.nu2;
        ts.nu3[i] = nu.nu3;
        ts.nu4[i] = nu.nu4;
        ts.nu_t[i] = nu.nu_t;
        ts.chi0_v[i] = chi0(grid[i], cfg.mech);
        ts.chi_eff_v[i] = chi_eff(grid[i], cfg, st);
    }
    return ts;
}

complex cancellation_ratio(double omega, const SystemConfig& cfg,
                           const SteadyState& st) {
    return chi_eff(omega, cfg, st) / chi0(omega, cfg.mech);
}

complex freq_noise_output_coefficient(double omega, const SystemConfig& cfg,
                                      const SteadyState& st) {
    const NuSet nu = nu_set(omega, cfg, st);
    return I * (st.alpha * nu.nu3 - std::conj(st.alpha) * nu.nu4);
}

OpticalSpring optical_spring(const SystemConfig& cfg, const SteadyState& st) {
    const double kappa = cfg.cavity.kappa;
    const double delta = st.detuning;
    const double wm = cfg.mech.omega_m;
    const double g2 = std::norm(st.coupling);
    const double resid = kappa * kappa + delta * delta - wm * wm;
    const double den = resid * resid + 4.0 * kappa * kappa * wm * wm;
    OpticalSpring s;
    s.omega_opt_sq = g2 * delta * wm * resid / den;
    s.gamma_opt = 2.0 * kappa * g2 * delta * wm / den;
    s.k_opt = cfg.mech.mass * s.omega_opt_sq;
    return s;
}

complex spring_chi_eff(double omega, const OpticalSpring& spring,
                       const MechanicalMode& mech) {
    const double wm = mech.omega_m;
    return wm / complex(wm * wm - spring.omega_opt_sq - omega * omega,
                        -omega * (mech.gamma_m + spring.gamma_opt));
}

complex toy_model_ratio(double omega, double omega_m, double omega_opt_sq) {
    const double den = omega_m * omega_m + omega_opt_sq - omega * omega;
    if (den == 0.0)
        throw SingularityError("toy-model resonance", omega);
    return complex(omega_m * omega_m - omega * omega, 0.0) / den;
}

complex omit_coefficient(double omega, const SystemConfig& cfg,
                         const SteadyState& st) {
    const double kappa = cfg.cavity.kappa;
    const double k1 = cfg.cavity.kappa1;
    const double delta = st.detuning;
    const complex d1 = complex(kappa, delta - omega);
    const complex d2 = complex(kappa, -(delta + omega));
    const complex ce = chi_eff(omega, cfg, st);
    const double g2 = std::norm(st.coupling);
    const complex inv_chi0 = 1.0 / chi0(omega, cfg.mech);
    return std::sqrt(2.0 * k1) / d1 * ce * (inv_chi0 + I * g2 / (2.0 * d2));
}

NuSet two_tone_probe_nu(double omega, const SystemConfig& pump_cfg,
                        const SteadyState& pump_st) {
    const double kappa = pump_cfg.cavity.kappa;
    const double k1 = pump_cfg.cavity.kappa1;
    const double eta = pump_cfg.cavity.eta;
    const complex d1 = complex(kappa, -omega);  // Delta = 0 for the probe
    const complex ce = chi_eff(omega, pump_cfg, pump_st);
    const complex g = pump_st.coupling;  // pump-dressed
    const double g2 = std::norm(g);
    const double s1 = std::sqrt(2.0 * k1);

    NuSet nu;
    nu.nu1 = complex((1.0 - 2.0 * eta) * kappa, omega) / d1 +
             I * g2 * k1 * ce / (d1 * d1);
    nu.nu2 = I * g * g * k1 * ce / (d1 * d1);
    nu.nu3 = (nu.nu1 + 1.0) / s1;
    nu.nu4 = nu.nu2 / s1;
    nu.nu_t = I * g * std::sqrt(k1) * ce / d1;
    return nu;
}

} // namespace pondera
