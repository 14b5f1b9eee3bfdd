#pragma once

#include "pondera/types.hpp"

#include <vector>

namespace pondera {

/// Bare mechanical susceptibility chi0 = omega_m / (omega_m^2 - w^2 - i w gamma_m).
complex chi0(double omega, const MechanicalMode& mech);

/// Radiation-pressure-dressed susceptibility,
/// chi_eff = omega_m [omega_m^2 - w^2 - i w gamma_m
///                    - |G|^2 Delta omega_m / ((kappa - i w)^2 + Delta^2)]^-1.
/// Throws SingularityError on an exact pole (instability boundary).
complex chi_eff(double omega, const SystemConfig& cfg, const SteadyState& st);

// Output transfer coefficients onto a1_out: nu1, nu2 act on the driven-port
// noise, nu3, nu4 on the detuning/loss channel, nu_t on the thermal force.
struct NuSet {
    complex nu1, nu2, nu3, nu4, nu_t;
};

NuSet nu_set(double omega, const SystemConfig& cfg, const SteadyState& st);

struct TransferSet {
    std::vector<double> omega;  // rad/s
    std::vector<complex> nu1, nu2, nu3, nu4, nu_t, chi0_v, chi_eff_v;
    SteadyState source;
};

TransferSet evaluate_transfer(const std::vector<double>& grid,
                              const SystemConfig& cfg, const SteadyState& st);

/// chi_eff / chi0: the factor multiplying frequency noise in the output.
complex cancellation_ratio(double omega, const SystemConfig& cfg,
                           const SteadyState& st);

/// Exact output coefficient of phidot: c_phi = i (alpha nu3 - alpha* nu4).
complex freq_noise_output_coefficient(double omega, const SystemConfig& cfg,
                                      const SteadyState& st);

struct OpticalSpring {
    double omega_opt_sq = 0.0;  // rad^2/s^2; softens the resonance when > 0
    double gamma_opt = 0.0;     // rad/s, same sign as the detuning
    double k_opt = 0.0;         // m * omega_opt_sq, N/m in zero-point units
};

/// Spring constants evaluated at omega_m. The dressed resonance sits at
/// sqrt(omega_m^2 - omega_opt_sq): the sign is fixed by expanding chi_eff
/// to first order in |G|^2 at omega_m.
OpticalSpring optical_spring(const SystemConfig& cfg, const SteadyState& st);

/// Lorentzian approximation
/// chi_eff ~ omega_m [(omega_m^2 - omega_opt^2) - w^2 - i w (gamma_m + gamma_opt)]^-1.
complex spring_chi_eff(double omega, const OpticalSpring& spring,
                       const MechanicalMode& mech);

/// Undamped two-spring model: (y - x)/y = (omega_m^2 - w^2)/(omega_m^2 + omega_opt^2 - w^2).
/// Throws SingularityError at the shifted resonance.
complex toy_model_ratio(double omega, double omega_m, double omega_opt_sq);

/// nu3 through its factorized rewrite; agrees with nu_set to 1e-12 relative.
complex omit_coefficient(double omega, const SystemConfig& cfg,
                         const SteadyState& st);

/// Probe coefficients for a resonant probe dressed by a detuned pump:
/// Delta = 0 substituted in the explicit detuning slots while G and chi_eff
/// keep the pump drive's values.
NuSet two_tone_probe_nu(double omega, const SystemConfig& pump_cfg,
                        const SteadyState& pump_st);

} // namespace pondera
