#include "pondera/expsignals.hpp"
#include "pondera/constants.hpp"
#include "pondera/spectra.hpp"
#include "pondera/system.hpp"

#include <cmath>

namespace pondera {

ReflectedField reflected_mean_field(const SystemConfig& cfg, const SteadyState& st) {
    const double kappa = cfg.cavity.kappa;
    const double k1 = cfg.cavity.kappa1;
    const double delta = st.detuning;
    const double e0 = cfg.drive.amplitude;
    const double a1in = e0 / std::sqrt(2.0 * k1);

    ReflectedField rf;
    rf.mean_field = a1in * complex(kappa - 2.0 * k1, delta) / complex(kappa, delta);
    // two-argument arctangent keeps kappa = 2 k1 off the branch cut
    rf.phi_r = std::atan2(delta, kappa - 2.0 * k1) - std::atan2(delta, kappa);
    const double er0 = a1in * (kappa - 2.0 * k1) / kappa;  // Delta = 0 value
    rf.dip_depth = a1in * a1in - er0 * er0;
    return rf;
}

namespace {

// Reference for the PDH normalization: phase-quadrature spectrum at zero
// frequency, zero detuning and no optomechanical coupling, same drive and
// noise budget.
double pdh_reference(const SystemConfig& cfg) {
    SystemConfig ref = cfg;
    ref.g0 = 0.0;
    ref.drive.kind = DetuningKind::effective;
    ref.drive.detuning = 0.0;
    const SteadyState st = steady_state(ref);
    const SpectrumPoint pt = quadrature_spectra(0.0, ref, st);
    return homodyne_spectrum(pt, 0.5 * phys::pi);
}

} // namespace

ResponseCurve pdh_response_curve(const std::vector<double>& grid,
                                 const SystemConfig& cfg, const SteadyState& st,
                                 double detection_floor, double gain) {
    const double ref = pdh_reference(cfg);
    ResponseCurve curve;
    curve.kind = ResponseKind::pdh;
    curve.omega = grid;
    curve.amplitude.reserve(grid.size());
    for (double w : grid) {
        const double s = homodyne_spectrum(quadrature_spectra(w, cfg, st),
                                           0.5 * phys::pi);
        curve.amplitude.push_back(gain * std::sqrt((s + detection_floor) / ref));
    }
    return curve;
}

ResponseCurve two_tone_pdh_curve(const std::vector<double>& grid,
                                 const SystemConfig& probe_cfg,
                                 const SystemConfig& pump_cfg,
                                 double detection_floor, double gain) {
    SystemConfig probe = probe_cfg;
    probe.drive.kind = DetuningKind::effective;
    probe.drive.detuning = 0.0;
    const SteadyState probe_st = steady_state(probe);
    const SteadyState pump_st = steady_state(pump_cfg);
    const double ref = pdh_reference(probe);

    ResponseCurve curve;
    curve.kind = ResponseKind::two_tone_pdh;
    curve.omega = grid;
    curve.amplitude.reserve(grid.size());
    SystemConfig point_cfg = probe;
    for (double w : grid) {
        const double suppress = std::norm(cancellation_ratio(w, pump_cfg, pump_st));
        point_cfg.noise.freq_noise = Psd(probe.noise.freq_noise(w) * suppress);
        const double s = homodyne_spectrum(
            quadrature_spectra(w, point_cfg, probe_st), 0.5 * phys::pi);
        curve.amplitude.push_back(gain * std::sqrt((s + detection_floor) / ref));
    }
    return curve;
}

ResponseCurve reflected_response_curve(const std::vector<double>& grid,
                                       const SystemConfig& cfg,
                                       const SteadyState& st,
                                       double detection_floor, double gain) {
    const ReflectedField rf = reflected_mean_field(cfg, st);
    if (rf.dip_depth <= 0.0)
        throw ParameterError("reflection dip depth vanishes; cannot normalize");
    const double s_freq = cfg.noise.freq_noise(cfg.mech.omega_m);
    if (s_freq <= 0.0)
        throw ParameterError("reflected response needs nonzero frequency noise");
    const double pref = cfg.cavity.kappa * std::abs(rf.mean_field) /
                        (std::sqrt(s_freq) * rf.dip_depth);

    ResponseCurve curve;
    curve.kind = ResponseKind::reflected;
    curve.omega = grid;
    curve.amplitude.reserve(grid.size());
    for (double w : grid) {
        const double s = homodyne_spectrum(quadrature_spectra(w, cfg, st), rf.phi_r);
        curve.amplitude.push_back(gain * pref * std::sqrt(s + detection_floor));
    }
    return curve;
}

} // namespace pondera
