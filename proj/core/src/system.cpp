#include "pondera/system.hpp"
#include "pondera/constants.hpp"

#include <algorithm>
#include <cmath>

namespace pondera {

Psd::Psd(std::vector<std::pair<double, double>> table) : table_(std::move(table)) {
    if (table_.empty()) throw ParameterError("empty PSD table");
    if (!std::is_sorted(table_.begin(), table_.end(),
                        [](auto& a, auto& b) { return a.first < b.first; }))
        throw ParameterError("PSD table must be sorted by frequency");
    for (auto& [w, v] : table_) {
        (void)w;
        if (v < 0.0) throw ParameterError("PSD must be non-negative");
    }
}

double Psd::operator()(double omega) const {
    if (table_.empty()) return constant_;
    const double w = std::abs(omega);  // two-sided, symmetric
    if (w <= table_.front().first) return table_.front().second;
    if (w >= table_.back().first) return table_.back().second;
    auto hi = std::lower_bound(table_.begin(), table_.end(), w,
                               [](auto& p, double x) { return p.first < x; });
    auto lo = hi - 1;
    const double t = (w - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

double OpticalCavity::resonance_omega() const {
    return 2.0 * phys::pi * phys::c_light / wavelength;
}

OpticalCavity derive_cavity_rates(double wavelength, double length,
                                  double finesse, double eta) {
    if (wavelength <= 0.0 || length <= 0.0 || finesse <= 0.0)
        throw ParameterError("cavity geometry must be positive");
    if (eta < 0.0 || eta > 1.0)
        throw ParameterError("loss parameter eta must lie in [0, 1]");
    OpticalCavity cav;
    cav.wavelength = wavelength;
    cav.length = length;
    cav.finesse = finesse;
    cav.kappa = phys::pi * phys::c_light / (2.0 * length * finesse);
    cav.kappa2 = eta * cav.kappa;
    cav.kappa1 = cav.kappa - cav.kappa2;
    cav.eta = eta;
    return cav;
}

OpticalCavity cavity_from_rates(double wavelength, double length,
                                double kappa1, double kappa2) {
    if (wavelength <= 0.0 || length <= 0.0)
        throw ParameterError("cavity geometry must be positive");
    if (kappa1 < 0.0 || kappa2 < 0.0 || kappa1 + kappa2 <= 0.0)
        throw ParameterError("cavity rates must be non-negative with kappa > 0");
    OpticalCavity cav;
    cav.wavelength = wavelength;
    cav.length = length;
    cav.kappa1 = kappa1;
    cav.kappa2 = kappa2;
    cav.kappa = kappa1 + kappa2;
    cav.eta = kappa2 / cav.kappa;
    return cav;
}

double single_photon_coupling(const OpticalCavity& cavity,
                              const MechanicalMode& mech) {
    if (mech.mass <= 0.0 || mech.omega_m <= 0.0)
        throw ParameterError("mechanical mass and frequency must be positive");
    const double omega_c = cavity.resonance_omega();
    return (omega_c / cavity.length) *
           std::sqrt(phys::hbar / (mech.mass * mech.omega_m));
}

MechanicalMode make_mechanical_mode(double omega_m, double quality,
                                    double mass, double temperature) {
    if (omega_m <= 0.0 || quality <= 0.0 || mass <= 0.0)
        throw ParameterError("mechanical parameters must be positive");
    if (temperature < 0.0)
        throw ParameterError("temperature must be non-negative");
    MechanicalMode m;
    m.omega_m = omega_m;
    m.quality = quality;
    m.gamma_m = omega_m / quality;
    m.mass = mass;
    m.temperature = temperature;
    return m;
}

LaserDrive make_drive(const OpticalCavity& cavity, double power,
                      DetuningKind kind, double detuning) {
    if (power < 0.0) throw ParameterError("drive power must be non-negative");
    LaserDrive d;
    d.power = power;
    d.omega0 = cavity.resonance_omega();
    d.amplitude = std::sqrt(2.0 * cavity.kappa1 * power / (phys::hbar * d.omega0));
    d.kind = kind;
    d.detuning = detuning;
    return d;
}

SteadyState steady_state(const SystemConfig& cfg) {
    if (cfg.drive.kind != DetuningKind::effective)
        throw ParameterError("fixed-detuning mode needs an effective detuning");
    SteadyState st;
    st.detuning = cfg.drive.detuning;
    st.alpha = cfg.drive.amplitude / complex(cfg.cavity.kappa, st.detuning);
    st.coupling = cfg.g0 * std::sqrt(2.0) * st.alpha;
    st.q_s = (cfg.g0 / cfg.mech.omega_m) * std::norm(st.alpha);
    st.theta = -std::atan2(st.detuning, cfg.cavity.kappa);
    return st;
}

namespace {

SteadyState state_from_photon_number(const SystemConfig& cfg, double delta0,
                                     double n_photons) {
    SystemConfig fixed = cfg;
    fixed.drive.kind = DetuningKind::effective;
    fixed.drive.detuning =
        delta0 - cfg.g0 * cfg.g0 * n_photons / cfg.mech.omega_m;
    return steady_state(fixed);
}

} // namespace

std::vector<SteadyStateBranch> steady_state_branches(const SystemConfig& cfg) {
    if (cfg.drive.kind != DetuningKind::bare)
        throw ParameterError("self-consistent mode needs a bare detuning");
    const double delta0 = cfg.drive.detuning;
    const double kappa = cfg.cavity.kappa;
    const double e0 = cfg.drive.amplitude;
    const double shift = cfg.g0 * cfg.g0 / cfg.mech.omega_m;  // detuning per photon

    std::vector<double> roots;
    if (shift == 0.0 || e0 == 0.0) {
        roots.push_back(e0 * e0 / (kappa * kappa + delta0 * delta0));
    } else {
        // u (kappa^2 + (delta0 - shift*u)^2) = E0^2, cubic in u = |alpha|^2:
        // shift^2 u^3 - 2 delta0 shift u^2 + (kappa^2 + delta0^2) u - E0^2 = 0
        const double a = shift * shift;
        const double b = -2.0 * delta0 * shift;
        const double c = kappa * kappa + delta0 * delta0;
        const double d = -e0 * e0;
        Eigen::Matrix3d companion = Eigen::Matrix3d::Zero();
        companion(0, 2) = -d / a;
        companion(1, 0) = 1.0;
        companion(1, 2) = -c / a;
        companion(2, 1) = 1.0;
        companion(2, 2) = -b / a;
        Eigen::EigenSolver<Eigen::Matrix3d> es(companion);
        for (int i = 0; i < 3; ++i) {
            const complex r = es.eigenvalues()(i);
            // keep real positive roots; tolerate eigensolver imaginary dust
            if (r.real() > 0.0 &&
                std::abs(r.imag()) < 1e-9 * std::max(1.0, std::abs(r.real()))) {
                // one Newton polish on the cubic
                double u = r.real();
                for (int it = 0; it < 3; ++it) {
                    const double f = ((a * u + b) * u + c) * u + d;
                    const double fp = (3.0 * a * u + 2.0 * b) * u + c;
                    if (fp != 0.0) u -= f / fp;
                }
                if (u > 0.0) roots.push_back(u);
            }
        }
        std::sort(roots.begin(), roots.end());
        if (roots.empty())
            throw std::runtime_error("no physical steady-state root");
    }

    std::vector<SteadyStateBranch> branches;
    branches.reserve(roots.size());
    for (double u : roots) {
        SteadyStateBranch br;
        br.state = state_from_photon_number(cfg, delta0, u);
        br.stable = stability_check(cfg, br.state).is_stable;
        branches.push_back(br);
    }
    return branches;
}

SteadyState steady_state(const SystemConfig& cfg, SteadyStateMode mode) {
    if (mode == SteadyStateMode::fixed_detuning) return steady_state(cfg);
    auto branches = steady_state_branches(cfg);
    if (!branches.front().stable)
        throw UnstableError("designated steady-state branch is unstable");
    return branches.front().state;
}

Eigen::Matrix4d drift_matrix(const SystemConfig& cfg, const SteadyState& st) {
    const double g_r = cfg.g0 * st.alpha.real();
    const double g_i = cfg.g0 * st.alpha.imag();
    const double kappa = cfg.cavity.kappa;
    const double delta = st.detuning;
    Eigen::Matrix4d a;
    a << 0.0, cfg.mech.omega_m, 0.0, 0.0,
        -cfg.mech.omega_m, -cfg.mech.gamma_m, g_r, g_i,
        -2.0 * g_i, 0.0, -kappa, delta,
        2.0 * g_r, 0.0, -delta, -kappa;
    return a;
}

StabilityResult stability_check(const SystemConfig& cfg, const SteadyState& st) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(drift_matrix(cfg, st));
    StabilityResult res;
    res.max_real = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        res.eigenvalues[i] = es.eigenvalues()(i);
        res.max_real = std::max(res.max_real, res.eigenvalues[i].real());
    }
    res.is_stable = res.max_real < 0.0;
    return res;
}

} // namespace pondera
