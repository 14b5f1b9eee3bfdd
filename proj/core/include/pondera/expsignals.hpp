#pragma once

#include "pondera/types.hpp"

#include <string>
#include <vector>

namespace pondera {

struct ReflectedField {
    complex mean_field;     // E_R, same units as the mean input a1_in
    double phi_r = 0.0;     // phase of E_R, rad
    double dip_depth = 0.0; // |a1_in|^2 - |E_R at Delta=0|^2
};

/// Mean reflected field E_R = (E0/sqrt(2 k1)) (kappa - 2 k1 + i Delta)/(kappa + i Delta).
ReflectedField reflected_mean_field(const SystemConfig& cfg, const SteadyState& st);

enum class ResponseKind { pdh, two_tone_pdh, reflected };

struct ResponseCurve {
    std::vector<double> omega;      // rad/s
    std::vector<double> amplitude;  // dimensionless, normalization per kind
    ResponseKind kind = ResponseKind::pdh;
};

/// PDH response modeled as a phase-quadrature readout:
/// sqrt(S_d^{pi/2}(w) + floor), normalized to the zero-detuning, zero-coupling,
/// low-frequency value so the small-detuning plateau sits at one.
/// `gain` is the optional per-curve vertical-scale factor (default 1).
ResponseCurve pdh_response_curve(const std::vector<double>& grid,
                                 const SystemConfig& cfg, const SteadyState& st,
                                 double detection_floor, double gain = 1.0);

/// Resonant-probe PDH response under a detuned pump. The pump suppresses the
/// detuning noise seen by the probe by |chi_eff(pump)/chi0|^2; the probe reads
/// it at Delta = 0 with its own coefficients.
ResponseCurve two_tone_pdh_curve(const std::vector<double>& grid,
                                 const SystemConfig& probe_cfg,
                                 const SystemConfig& pump_cfg,
                                 double detection_floor, double gain = 1.0);

/// Normalized reflected-field response,
/// A = kappa |E_R| / (sqrt(S_phidot) [|a1_in|^2 - |E_R^0|^2]) * sqrt(S_d^{phi_R} + floor).
ResponseCurve reflected_response_curve(const std::vector<double>& grid,
                                       const SystemConfig& cfg,
                                       const SteadyState& st,
                                       double detection_floor, double gain = 1.0);

} // namespace pondera
