#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pondera {

using complex = std::complex<double>;

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularityError : std::runtime_error {
    explicit SingularityError(const std::string& what, double omega_)
        : std::runtime_error(what), omega(omega_) {}
    double omega;  // offending frequency, rad/s
};

struct UnstableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Piecewise-linear PSD over angular frequency; a bare constant when the
// table is empty. Values are two-sided spectral densities.
class Psd {
public:
    Psd() = default;
    explicit Psd(double constant) : constant_(constant) {
        if (constant < 0.0) throw ParameterError("PSD must be non-negative");
    }
    Psd(std::vector<std::pair<double, double>> table);  // (omega, value), sorted

    double operator()(double omega) const;
    bool is_constant() const { return table_.empty(); }
    double constant_value() const { return constant_; }
    const std::vector<std::pair<double, double>>& table() const { return table_; }

private:
    double constant_ = 0.0;
    std::vector<std::pair<double, double>> table_;
};

struct OpticalCavity {
    double wavelength = 0.0;            // m
    double length = 0.0;                // m
    std::optional<double> finesse;      // dimensionless, when geometry-derived
    double kappa1 = 0.0;                // input-port amplitude decay rate, rad/s
    double kappa2 = 0.0;                // loss-port amplitude decay rate, rad/s
    double kappa = 0.0;                 // total = kappa1 + kappa2, rad/s
    double eta = 0.0;                   // kappa2 / kappa

    double resonance_omega() const;     // 2*pi*c/wavelength, rad/s
};

struct MechanicalMode {
    double omega_m = 0.0;       // rad/s
    double quality = 0.0;       // Q
    double gamma_m = 0.0;       // omega_m / Q, rad/s
    double mass = 0.0;          // effective mass, kg
    double temperature = 0.0;   // bath temperature, K
};

// Sign convention: detuning > 0 means the laser sits red of the cavity
// (bare detuning Delta0 = omega_c - omega_0). Used consistently everywhere.
enum class DetuningKind { effective, bare };

struct LaserDrive {
    double power = 0.0;         // W
    double omega0 = 0.0;        // laser angular frequency, rad/s
    double amplitude = 0.0;     // E0 = sqrt(2 kappa1 P / hbar omega0), rad/s*sqrt(photon)
    DetuningKind kind = DetuningKind::effective;
    double detuning = 0.0;      // rad/s, meaning set by `kind`
};

struct NoiseBudget {
    Psd freq_noise;               // S_phidot, (rad/s)^2 per Hz, two-sided
    Psd amp_noise;                // S_eps, shot-noise units per Hz, two-sided
    double detection_floor = 0.0; // additive floor in normalized output units
    double phase_jitter = 0.0;    // homodyne phase std dev, rad
};

struct SystemConfig {
    OpticalCavity cavity;
    MechanicalMode mech;
    LaserDrive drive;
    double g0 = 0.0;       // single-photon coupling, rad/s
    NoiseBudget noise;
};

struct SteadyState {
    complex alpha;         // intracavity amplitude, sqrt(photons)
    double q_s = 0.0;      // static displacement, zero-point units
    double detuning = 0.0; // effective detuning, rad/s
    complex coupling;      // G = g0*sqrt(2)*alpha, rad/s
    double theta = 0.0;    // arg(alpha) = -atan2(detuning, kappa)
};

} // namespace pondera
