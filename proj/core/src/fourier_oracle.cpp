#include "pondera/spectra.hpp"
#include "pondera/validate.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace pondera {

namespace {
constexpr complex I{0.0, 1.0};

using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

// Linearized equations at frequency w in (dq, dp, da, da^dag), with
// da^dag(w) = [da(-w)]^dag. Row order: dq, dp, da, da^dag equations.
Matrix4c system_matrix(double omega, const SystemConfig& cfg,
                       const SteadyState& st) {
    const double wm = cfg.mech.omega_m;
    const double gm = cfg.mech.gamma_m;
    const double kappa = cfg.cavity.kappa;
    const double delta = st.detuning;
    const complex g0a = cfg.g0 * st.alpha;
    Matrix4c m;
    m << complex(0.0, -omega), complex(-wm, 0.0), 0.0, 0.0,
        complex(wm, 0.0), complex(gm, -omega), -std::conj(g0a), -g0a,
        -I * g0a, 0.0, complex(kappa, delta - omega), 0.0,
        I * std::conj(g0a), 0.0, 0.0, complex(kappa, -(delta + omega));
    return m;
}
} // namespace

OracleCoefficients fourier_matrix_oracle(double omega, const SystemConfig& cfg,
                                         const SteadyState& st) {
    const Matrix4c m = system_matrix(omega, cfg, st);
    Eigen::FullPivLU<Matrix4c> lu(m);
    OracleCoefficients oc;
    if (!lu.isInvertible()) {
        oc.singular = true;
        return oc;
    }
    const double s1 = std::sqrt(2.0 * cfg.cavity.kappa1);

    // response of da to a unit input in each equation's drive slot
    const Vector4c r_p = lu.solve(Vector4c(0, 1, 0, 0));    // xi in dp eq
    const Vector4c r_a = lu.solve(Vector4c(0, 0, 1, 0));    // da-equation input
    const Vector4c r_ad = lu.solve(Vector4c(0, 0, 0, 1));   // da^dag-equation input

    // a1_out = s1*da - a1_in; a1_in drives both field equations with s1
    oc.nu1 = s1 * r_a(2) * s1 - 1.0;
    oc.nu2 = s1 * r_ad(2) * s1;
    oc.nu3 = s1 * r_a(2);   // zeta enters the da equation with unit weight
    oc.nu4 = s1 * r_ad(2);
    oc.nu_t = s1 * r_p(2);
    oc.amp_pathway = oc.nu1 + oc.nu2;
    oc.freq_pathway =
        s1 * (r_a(2) * I * st.alpha - r_ad(2) * I * std::conj(st.alpha));
    return oc;
}

namespace {

// Channel coefficients of X(w) and Y(w): a1, a1^dag, a2, a2^dag (loss-port
// weights folded in), phidot, eps, xi.
struct QuadCoeffs {
    complex a1, a1d, a2, a2d, ph, eps, xi;
};

struct XYCoeffs {
    QuadCoeffs x, y;
};

XYCoeffs quad_coeffs(const OracleCoefficients& p, const OracleCoefficients& m,
                     const SystemConfig& cfg, const SteadyState& st) {
    const double s2 = std::sqrt(2.0 * cfg.cavity.kappa2);
    const complex al = st.alpha;
    XYCoeffs c;
    c.x.a1 = p.nu1 + std::conj(m.nu2);
    c.x.a1d = p.nu2 + std::conj(m.nu1);
    c.x.a2 = s2 * (p.nu3 + std::conj(m.nu4));
    c.x.a2d = s2 * (p.nu4 + std::conj(m.nu3));
    c.x.ph = I * (al * (p.nu3 + std::conj(m.nu4)) -
                  std::conj(al) * (std::conj(m.nu3) + p.nu4));
    c.x.eps = c.x.a1 + c.x.a1d;
    c.x.xi = p.nu_t + std::conj(m.nu_t);

    c.y.a1 = -I * (p.nu1 - std::conj(m.nu2));
    c.y.a1d = -I * (p.nu2 - std::conj(m.nu1));
    c.y.a2 = -I * s2 * (p.nu3 - std::conj(m.nu4));
    c.y.a2d = -I * s2 * (p.nu4 - std::conj(m.nu3));
    c.y.ph = al * (p.nu3 - std::conj(m.nu4)) +
             std::conj(al) * (std::conj(m.nu3) - p.nu4);
    c.y.eps = c.y.a1 + c.y.a1d;
    c.y.xi = -I * (p.nu_t - std::conj(m.nu_t));
    return c;
}

// Fully symmetrized spectrum of two quadratures from the correlation table:
// vacuum ports contribute through <a a^dag> only, classical channels are
// real with the given two-sided PSDs.
double sym_spectrum(const QuadCoeffs& ap, const QuadCoeffs& am,
                    const QuadCoeffs& bp, const QuadCoeffs& bm,
                    double s_freq, double s_amp, double s_thermal) {
    complex v = 0.25 * (ap.a1 * bm.a1d + bm.a1 * ap.a1d +
                        bp.a1 * am.a1d + am.a1 * bp.a1d);
    v += 0.25 * (ap.a2 * bm.a2d + bm.a2 * ap.a2d +
                 bp.a2 * am.a2d + am.a2 * bp.a2d);
    v += 0.5 * (ap.ph * bm.ph + am.ph * bp.ph) * s_freq;
    v += 0.5 * (ap.eps * bm.eps + am.eps * bp.eps) * s_amp;
    v += 0.5 * (ap.xi * bm.xi + am.xi * bp.xi) * s_thermal;
    return v.real();
}

} // namespace

OracleSpectrum oracle_spectrum_point(double omega, const SystemConfig& cfg,
                                     const SteadyState& st) {
    const OracleCoefficients p = fourier_matrix_oracle(omega, cfg, st);
    const OracleCoefficients m = fourier_matrix_oracle(-omega, cfg, st);
    const XYCoeffs cp = quad_coeffs(p, m, cfg, st);
    const XYCoeffs cm = quad_coeffs(m, p, cfg, st);
    const InputSpectra in = input_noise_spectra(omega, cfg);
    OracleSpectrum s;
    s.sx = sym_spectrum(cp.x, cm.x, cp.x, cm.x, in.s_freq, in.s_amp, in.s_thermal);
    s.sy = sym_spectrum(cp.y, cm.y, cp.y, cm.y, in.s_freq, in.s_amp, in.s_thermal);
    s.sxy = sym_spectrum(cp.x, cm.x, cp.y, cm.y, in.s_freq, in.s_amp, in.s_thermal);
    return s;
}

} // namespace pondera
