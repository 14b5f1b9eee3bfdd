#pragma once

#include "pondera/types.hpp"

#include <Eigen/Dense>

#include <array>

namespace pondera {

/// Cavity from geometry: kappa = pi*c/(2*L*F), split kappa1 = (1-eta)*kappa,
/// kappa2 = eta*kappa.
OpticalCavity derive_cavity_rates(double wavelength, double length,
                                  double finesse, double eta);

/// Cavity from explicit port rates (finesse left unset).
OpticalCavity cavity_from_rates(double wavelength, double length,
                                double kappa1, double kappa2);

/// Single-photon coupling G0 = (omega_c/L)*sqrt(hbar/(m*omega_m)) for an
/// end-mirror Fabry-Perot (d omega_c/dx = -omega_c/L).
double single_photon_coupling(const OpticalCavity& cavity,
                              const MechanicalMode& mech);

MechanicalMode make_mechanical_mode(double omega_m, double quality,
                                    double mass, double temperature);

/// Drive with amplitude E0 = sqrt(2 kappa1 P / hbar omega0); omega0 from the
/// cavity wavelength.
LaserDrive make_drive(const OpticalCavity& cavity, double power,
                      DetuningKind kind, double detuning);

enum class SteadyStateMode { fixed_detuning, self_consistent };

struct SteadyStateBranch {
    SteadyState state;
    bool stable = false;
};

/// Steady state in fixed-detuning mode: alpha = E0/(kappa + i*Delta) with
/// Delta taken as given. Requires drive.kind == effective.
SteadyState steady_state(const SystemConfig& cfg);

/// Self-consistent mode: solves Delta = Delta0 - g0^2 |alpha|^2 / omega_m,
/// a cubic in |alpha|^2 handled through companion-matrix eigenvalues.
/// Returns every real positive root, each flagged by stability_check.
/// The designated solution (branch continuously connected to low power)
/// is the first entry: the smallest |alpha|^2 root.
std::vector<SteadyStateBranch> steady_state_branches(const SystemConfig& cfg);

/// Steady state in the requested mode; self_consistent returns the
/// designated branch and throws UnstableError if that branch is unstable.
SteadyState steady_state(const SystemConfig& cfg, SteadyStateMode mode);

struct StabilityResult {
    bool is_stable = false;
    std::array<complex, 4> eigenvalues{};
    double max_real = 0.0;
};

/// Drift matrix of the linearized dynamics in (dq, dp, dX, dY) where
/// dX = da + da^dag and dY = -i(da - da^dag).
Eigen::Matrix4d drift_matrix(const SystemConfig& cfg, const SteadyState& st);

/// All drift eigenvalues in the open left half plane.
StabilityResult stability_check(const SystemConfig& cfg, const SteadyState& st);

} // namespace pondera
