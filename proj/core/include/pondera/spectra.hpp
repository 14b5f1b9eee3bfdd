#pragma once

#include "pondera/transfer.hpp"
#include "pondera/types.hpp"

#include <vector>

namespace pondera {

struct InputSpectra {
    double s_in = 1.0;      // vacuum, shot-noise units
    double s_thermal = 0.0; // (gamma_m/omega_m) * w * coth(hbar w / 2 kB T), rad/s
    double s_freq = 0.0;    // S_phidot at w
    double s_amp = 0.0;     // S_eps at w
};

/// Input-side spectral densities. w = 0 uses the analytic limit of
/// w*coth(hbar w/2 kB T) (2 kB T / hbar, or |w| at T = 0).
InputSpectra input_noise_spectra(double omega, const SystemConfig& cfg);

struct NoiseSplit {
    double quan = 0.0, freq = 0.0, ampl = 0.0, ther = 0.0;
    double total() const { return quan + freq + ampl + ther; }
};

struct SpectrumPoint {
    NoiseSplit sx, sy, sxy;
    double omega = 0.0;
};

/// Full four-way decomposition of S_X, S_Y, S_XY at one frequency.
/// Coefficients at -w are evaluated by direct substitution (chi_eff(-w) is
/// not chi_eff(w)* in general).
SpectrumPoint quadrature_spectra(double omega, const SystemConfig& cfg,
                                 const SteadyState& st);

/// S_d^phi = (S_X+S_Y)/2 + (S_X-S_Y) cos(2 phi)/2 + S_XY sin(2 phi).
double homodyne_spectrum(const SpectrumPoint& pt, double phi);

struct OptimalPoint {
    double s_opt = 0.0;
    double phi_opt = 0.0;    // reduced to [0, pi)
    bool degenerate = false; // S_X = S_Y and S_XY = 0: phase undefined, 0 used
};

OptimalPoint optimal_spectrum(const SpectrumPoint& pt);

/// Gaussian-phase-jitter average: exp(-2 dphi^2) attenuation on both
/// phase-dependent terms.
double averaged_spectrum(const SpectrumPoint& pt, double phi, double dphi);

/// Companion optimal form with the same attenuation on the root term.
double averaged_optimal_spectrum(const SpectrumPoint& pt, double dphi);

/// S_X S_Y - S_XY^2 - 1, >= 0 up to roundoff for any physical state.
double heisenberg_margin(const SpectrumPoint& pt);

struct SqueezingBand {
    double omega_lo = 0.0, omega_hi = 0.0;  // rad/s, S < 1 strictly inside
};

struct SqueezingReport {
    double phi = 0.0;
    std::vector<SqueezingBand> bands;
    double min_value = 1.0;
    double min_omega = 0.0;
    double min_db = 0.0;                  // 10*log10(min_value)
    std::vector<double> phi_opt_trace;    // phi_opt over the grid
};

/// Sub-unity bands of S_d^phi over the grid; edges refined by bisection to
/// gamma_m/100. An empty band list just means no squeezing.
SqueezingReport squeezing_report(const std::vector<double>& grid, double phi,
                                 const SystemConfig& cfg, const SteadyState& st);

struct MapCell {
    double value = 0.0;
    bool unstable = false;  // flagged, not evaluated
};

struct DetuningPhaseMap {
    std::vector<double> detunings;             // rad/s
    std::vector<double> phases;                // rad
    std::vector<std::vector<MapCell>> cells;   // [detuning][phase]
};

/// S_d^phi(omega_m) over a detuning x phase grid. Each detuning column is
/// stability-checked first.
DetuningPhaseMap detuning_phase_map(const std::vector<double>& detunings,
                                    const std::vector<double>& phases,
                                    const SystemConfig& cfg);

struct JitterMap {
    std::vector<double> omegas;               // rad/s
    std::vector<double> jitters;              // rad
    std::vector<std::vector<double>> values;  // [jitter][omega]
};

/// Averaged spectrum over an omega x jitter grid at fixed detuning and phase.
JitterMap jitter_map(const std::vector<double>& omegas,
                     const std::vector<double>& jitters, double phi,
                     const SystemConfig& cfg, const SteadyState& st);

} // namespace pondera
