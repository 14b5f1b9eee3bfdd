#pragma once

#include "pondera/transfer.hpp"
#include "pondera/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace pondera {

// Output coefficients rederived by solving the linearized equations in
// (dq, dp, da, da^dag) at each frequency, independent of the closed forms.
struct OracleCoefficients {
    complex nu1, nu2, nu3, nu4, nu_t;
    complex amp_pathway;   // coefficient of eps onto a1_out (= nu1 + nu2)
    complex freq_pathway;  // coefficient of phidot onto a1_out
    bool singular = false; // matrix solve hit an instability pole
};

OracleCoefficients fourier_matrix_oracle(double omega, const SystemConfig& cfg,
                                         const SteadyState& st);

/// S_X, S_Y, S_XY assembled from the oracle's per-channel coefficients and
/// the input correlation table; independent of the closed-form decomposition.
struct OracleSpectrum {
    double sx = 0.0, sy = 0.0, sxy = 0.0;
};

OracleSpectrum oracle_spectrum_point(double omega, const SystemConfig& cfg,
                                     const SteadyState& st);

struct WelchResult {
    std::vector<double> freq_hz;    // positive frequencies
    std::vector<double> psd;        // one-sided; unit-variance white -> 2*dt
    std::vector<double> stderr_psd; // from segment scatter
    int n_segments = 0;
    bool few_segments = false;      // < 8 segments: error bars unreliable
};

/// Windowed averaged periodogram (Hann window).
WelchResult welch_psd(std::span<const double> series, double dt,
                      std::size_t segment_length, double overlap = 0.5);

struct SdeParams {
    double dt = 0.0;         // base step, s; must satisfy dt <= 0.1/kappa
    double duration = 0.0;   // total simulated time, s
    std::uint64_t seed = 0;
    int decimation = 1;      // output sample interval = decimation * dt
};

struct TrajectoryBundle {
    SdeParams params;
    double sample_dt = 0.0;       // decimation * dt
    std::vector<double> x_out;    // amplitude quadrature, boxcar-averaged
    std::vector<double> y_out;    // phase quadrature, boxcar-averaged
    std::uint64_t seed = 0;

    void write_csv(std::ostream& os, const std::string& config_hash) const;
};

/// Time-domain validator: exact exponential propagation of the linearized
/// system with Gaussian increments drawn from the exact integrated
/// covariance. Output samples are averages of the output quadratures over
/// each sample interval, so the feed-through vacuum term stays white and the
/// statistics are exact at any decimation. Thermal noise enters white at the
/// classical value (gamma_m/omega_m)(2 kB T/hbar).
/// Refuses dt > 0.1/kappa and unstable configurations.
TrajectoryBundle sde_simulate(const SystemConfig& cfg, const SteadyState& st,
                              const SdeParams& params);

struct ValidationEntry {
    std::string name;
    bool pass = false;
    bool skipped = false;
    double max_deviation = 0.0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationEntry> entries;
    bool all_pass() const;
};

struct CrossValidateSpec {
    int n_random_configs = 10000;   // oracle-vs-closed-form sample count
    std::uint64_t seed = 20240811;
    bool run_time_domain = true;
    double sim_duration = 0.0;      // 0: pick from gamma_m
    double nu2_perturbation = 0.0;  // test hook: relative bend of nu2
};

/// Runs the frequency-domain oracle comparison, the spectra assembly
/// comparison, and (optionally) the time-domain PSD match on `cfg`.
ValidationReport cross_validate(const SystemConfig& cfg,
                                const CrossValidateSpec& spec);

} // namespace pondera
