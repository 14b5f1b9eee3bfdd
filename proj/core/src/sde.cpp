#include "pondera/constants.hpp"
#include "pondera/rng.hpp"
#include "pondera/system.hpp"
#include "pondera/validate.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <ostream>

namespace pondera {

namespace {

using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Vector8d = Eigen::Matrix<double, 8, 1>;

// Augmented state (q, p, X, Y, IX, IY, zX, zY): IX/IY integrate the scaled
// intracavity quadratures, zX/zY the feed-through noise, so one exact step
// of length h yields the boxcar-averaged output quadratures.
struct Discretization {
    Eigen::Matrix<double, 8, 4> phi_state;  // state columns of exp(A h)
    Matrix8d noise_sqrt;                    // Q^(1/2) of the joint increment
    Eigen::Matrix4d stationary_sqrt;        // P0^(1/2) for the start state
};

Discretization discretize(const SystemConfig& cfg, const SteadyState& st,
                          double h) {
    const double s1 = std::sqrt(2.0 * cfg.cavity.kappa1);
    const double s2 = std::sqrt(2.0 * cfg.cavity.kappa2);
    const double ar = st.alpha.real();
    const double ai = st.alpha.imag();
    const double s_thermal =
        cfg.mech.temperature > 0.0
            ? (cfg.mech.gamma_m / cfg.mech.omega_m) *
                  (2.0 * phys::k_boltzmann * cfg.mech.temperature / phys::hbar)
            : 0.0;
    const double s_freq = cfg.noise.freq_noise(cfg.mech.omega_m);
    const double s_amp = cfg.noise.amp_noise(cfg.mech.omega_m);

    Matrix8d a = Matrix8d::Zero();
    a.topLeftCorner<4, 4>() = drift_matrix(cfg, st);
    a(4, 2) = s1;  // IX' = s1 * X
    a(5, 3) = s1;

    // channels: nX1 nY1 nX2 nY2 phidot eps xi (two-sided white intensities)
    Eigen::Matrix<double, 8, 7> b = Eigen::Matrix<double, 8, 7>::Zero();
    b(1, 6) = 1.0;
    b(2, 0) = s1; b(2, 2) = s2; b(2, 4) = -2.0 * ai; b(2, 5) = 2.0 * s1;
    b(3, 1) = s1; b(3, 3) = s2; b(3, 4) = 2.0 * ar;
    b(6, 0) = 1.0; b(6, 5) = 2.0;
    b(7, 1) = 1.0;
    Eigen::Matrix<double, 7, 1> intensities;
    intensities << 1.0, 1.0, 1.0, 1.0, s_freq, s_amp, s_thermal;
    const Matrix8d qc = b * intensities.asDiagonal() * b.transpose();

    // Van Loan: exp([[-A, Qc],[0, A^T]] h) gives Phi = F22^T, Q = F22^T F12
    Eigen::Matrix<double, 16, 16> m = Eigen::Matrix<double, 16, 16>::Zero();
    m.topLeftCorner<8, 8>() = -a;
    m.topRightCorner<8, 8>() = qc;
    m.bottomRightCorner<8, 8>() = a.transpose();
    const Eigen::Matrix<double, 16, 16> f = (m * h).exp();
    const Matrix8d phi = f.bottomRightCorner<8, 8>().transpose();
    Matrix8d q = phi * f.topRightCorner<8, 8>();
    q = 0.5 * (q + q.transpose()).eval();

    Discretization d;
    d.phi_state = phi.leftCols<4>();
    Eigen::SelfAdjointEigenSolver<Matrix8d> es(q);
    d.noise_sqrt = es.eigenvectors() *
                   es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    // stationary state covariance: A P + P A^T + Qc_state = 0
    const Eigen::Matrix4d as = a.topLeftCorner<4, 4>();
    const Eigen::Matrix4d qs = qc.topLeftCorner<4, 4>();
    Eigen::Matrix<double, 16, 16> kron = Eigen::Matrix<double, 16, 16>::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k) {
                kron(i * 4 + k, j * 4 + k) += as(i, j);   // A (x) I
                kron(i * 4 + k, i * 4 + j) += as(k, j);   // I (x) A
            }
    Eigen::Matrix<double, 16, 1> rhs;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) rhs(i * 4 + k) = -qs(i, k);
    const Eigen::Matrix<double, 16, 1> vec_p = kron.fullPivLu().solve(rhs);
    Eigen::Matrix4d p0;
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) p0(i, k) = vec_p(i * 4 + k);
    p0 = 0.5 * (p0 + p0.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es0(p0);
    d.stationary_sqrt = es0.eigenvectors() *
                        es0.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    return d;
}

} // namespace

TrajectoryBundle sde_simulate(const SystemConfig& cfg, const SteadyState& st,
                              const SdeParams& params) {
    if (params.dt <= 0.0 || params.duration <= 0.0)
        throw ParameterError("dt and duration must be positive");
    if (params.dt > 0.1 / cfg.cavity.kappa)
        throw ParameterError("integrator step too coarse: dt must be <= 0.1/kappa");
    if (params.decimation < 1)
        throw ParameterError("decimation must be >= 1");
    if (!stability_check(cfg, st).is_stable)
        throw UnstableError("refusing to simulate an unstable configuration");

    const double h = params.dt * params.decimation;
    const std::size_t n_samples =
        static_cast<std::size_t>(params.duration / h);
    if (n_samples == 0)
        throw ParameterError("duration shorter than one output sample");

    const Discretization d = discretize(cfg, st, h);
    const double s1 = std::sqrt(2.0 * cfg.cavity.kappa1);
    (void)s1;

    TrajectoryBundle tb;
    tb.params = params;
    tb.sample_dt = h;
    tb.seed = params.seed;
    tb.x_out.resize(n_samples);
    tb.y_out.resize(n_samples);

    Xoshiro256pp rng(params.seed);
    Eigen::Vector4d g0;
    for (int i = 0; i < 4; ++i) g0(i) = rng.normal();
    Eigen::Vector4d x = d.stationary_sqrt * g0;

    Vector8d g;
    for (std::size_t k = 0; k < n_samples; ++k) {
        for (int i = 0; i < 8; ++i) g(i) = rng.normal();
        const Vector8d u = d.phi_state * x + d.noise_sqrt * g;
        x = u.head<4>();
        tb.x_out[k] = (u(4) - u(6)) / h;
        tb.y_out[k] = (u(5) - u(7)) / h;
    }
    return tb;
}

void TrajectoryBundle::write_csv(std::ostream& os,
                                 const std::string& config_hash) const {
    os << "# pondera trajectory\n";
    os << "# dt_s=" << params.dt << " duration_s=" << params.duration
       << " seed=" << seed << " decimation=" << params.decimation
       << " sample_dt_s=" << sample_dt << " config=" << config_hash << "\n";
    os << "# columns: time_s,x_out,y_out\n";
    os.precision(17);
    for (std::size_t k = 0; k < x_out.size(); ++k)
        os << (static_cast<double>(k) + 0.5) * sample_dt << ',' << x_out[k]
           << ',' << y_out[k] << '\n';
}

} // namespace pondera
