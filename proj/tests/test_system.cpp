#include "pondera/constants.hpp"
#include "pondera/system.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace pondera;
using pondera::testing::device_config;

TEST_CASE("cavity rates from geometry") {
    const OpticalCavity cav = derive_cavity_rates(1064e-9, 0.57e-3, 57000.0, 0.5);
    // pi*c/(2*L*F) evaluated independently at full precision
    CHECK(cav.kappa == doctest::Approx(14494087.159963474).epsilon(1e-14));
    CHECK(phys::rad_to_hz(cav.kappa) / 1e6 == doctest::Approx(2.31).epsilon(5e-3));
    CHECK(cav.kappa1 + cav.kappa2 - cav.kappa == 0.0);  // exact closure
    CHECK(cav.eta == doctest::Approx(cav.kappa2 / cav.kappa).epsilon(1e-15));
    // finesse consistency within 1e-12 relative
    CHECK(std::abs(cav.kappa - phys::pi * phys::c_light /
                                   (2.0 * cav.length * *cav.finesse)) <=
          1e-12 * cav.kappa);

    SUBCASE("lossless limit") {
        const OpticalCavity big = derive_cavity_rates(1064e-9, 0.57e-3, 1e15, 0.5);
        CHECK(big.kappa < 1e-3);
    }
    SUBCASE("rejects non-positive geometry") {
        CHECK_THROWS_AS(derive_cavity_rates(-1e-9, 0.57e-3, 57000.0, 0.5),
                        ParameterError);
        CHECK_THROWS_AS(derive_cavity_rates(1064e-9, 0.0, 57000.0, 0.5),
                        ParameterError);
        CHECK_THROWS_AS(derive_cavity_rates(1064e-9, 0.57e-3, 57000.0, 1.5),
                        ParameterError);
    }
    SUBCASE("rate closure for random splits") {
        for (double eta : {0.0, 0.17, 0.5, 0.99, 1.0}) {
            const OpticalCavity c = derive_cavity_rates(1550e-9, 2e-3, 1e4, eta);
            CHECK(c.kappa1 + c.kappa2 - c.kappa == 0.0);
        }
    }
}

TEST_CASE("single-photon coupling") {
    const OpticalCavity cav = derive_cavity_rates(1064e-9, 0.57e-3, 57000.0, 0.5);
    const MechanicalMode mech =
        make_mechanical_mode(phys::hz_to_rad(128961.0), 16000.0, 1.35e-7, 300.0);
    const double g0 = single_photon_coupling(cav, mech);
    CHECK(g0 == doctest::Approx(96.435326137719898).epsilon(1e-14));

    SUBCASE("infinite-mass limit") {
        MechanicalMode heavy = mech;
        heavy.mass = 1e12;
        CHECK(single_photon_coupling(cav, heavy) < 1e-7);
    }
    SUBCASE("1/L scaling at fixed mode") {
        OpticalCavity twice = cav;
        twice.length = 2.0 * cav.length;
        CHECK(single_photon_coupling(twice, mech) ==
              doctest::Approx(0.5 * g0).epsilon(1e-14));
    }
    SUBCASE("rejects degenerate mechanics") {
        CHECK_THROWS_AS(make_mechanical_mode(0.0, 16000.0, 1.35e-7, 300.0),
                        ParameterError);
        CHECK_THROWS_AS(make_mechanical_mode(1e5, 16000.0, 0.0, 300.0),
                        ParameterError);
    }
}

TEST_CASE("steady state, fixed detuning") {
    SUBCASE("resonant drive is real") {
        const SystemConfig cfg = device_config(0.09e-3, 0.0);
        const SteadyState st = steady_state(cfg);
        CHECK(st.alpha.imag() == 0.0);
        CHECK(st.alpha.real() ==
              doctest::Approx(cfg.drive.amplitude / cfg.cavity.kappa));
    }
    SUBCASE("photon number and phase at 0.0047 kappa") {
        const SystemConfig cfg = device_config(0.09e-3, 0.0047);
        const SteadyState st = steady_state(cfg);
        CHECK(std::norm(st.alpha) ==
              doctest::Approx(33258828.159248676).epsilon(1e-12));
        CHECK(std::abs(std::arg(st.alpha) - st.theta) < 1e-12);
        CHECK(st.theta ==
              doctest::Approx(-std::atan(st.detuning / cfg.cavity.kappa)));
    }
    SUBCASE("zeroth-order residuals vanish") {
        const SystemConfig cfg = device_config(1e-3, 0.021);
        const SteadyState st = steady_state(cfg);
        const complex res = cfg.drive.amplitude -
                            complex(cfg.cavity.kappa, st.detuning) * st.alpha;
        CHECK(std::abs(res) <= 1e-10 * cfg.drive.amplitude);
        CHECK(std::abs(st.q_s * cfg.mech.omega_m - cfg.g0 * std::norm(st.alpha)) <=
              1e-10 * cfg.g0 * std::norm(st.alpha));
        CHECK(st.coupling == cfg.g0 * std::sqrt(2.0) * st.alpha);
    }
}

namespace {

// brute-force fixed point of |alpha|^2 = E0^2/(kappa^2 + (D0 - shift*u)^2)
double fixed_point_photons(const SystemConfig& cfg, double delta0) {
    const double shift = cfg.g0 * cfg.g0 / cfg.mech.omega_m;
    const double e2 = cfg.drive.amplitude * cfg.drive.amplitude;
    const double k2 = cfg.cavity.kappa * cfg.cavity.kappa;
    double u = e2 / (k2 + delta0 * delta0);
    for (int i = 0; i < 20000; ++i) {
        const double d = delta0 - shift * u;
        u = 0.5 * u + 0.5 * e2 / (k2 + d * d);
    }
    return u;
}

} // namespace

TEST_CASE("steady state, self-consistent") {
    SUBCASE("no back-action reproduces fixed mode bit-for-bit") {
        SystemConfig cfg = device_config(0.09e-3, 0.0);
        cfg.g0 = 0.0;
        cfg.drive.kind = DetuningKind::bare;
        cfg.drive.detuning = 0.31 * cfg.cavity.kappa;
        const auto branches = steady_state_branches(cfg);
        REQUIRE(branches.size() == 1);

        SystemConfig fixed = cfg;
        fixed.drive.kind = DetuningKind::effective;
        const SteadyState direct = steady_state(fixed);
        CHECK(branches[0].state.alpha == direct.alpha);
        CHECK(branches[0].state.detuning == direct.detuning);
    }
    SUBCASE("cubic agrees with brute-force fixed point") {
        SystemConfig cfg = device_config(0.09e-3, 0.0);
        cfg.drive.kind = DetuningKind::bare;
        cfg.drive.detuning = 0.0047 * cfg.cavity.kappa;
        const auto branches = steady_state_branches(cfg);
        REQUIRE(branches.size() == 1);
        const double u_fp = fixed_point_photons(cfg, cfg.drive.detuning);
        CHECK(std::norm(branches[0].state.alpha) ==
              doctest::Approx(u_fp).epsilon(1e-10));
    }
    SUBCASE("single-root regression at high power") {
        SystemConfig cfg = device_config(30e-3, 0.0, 1e5, 4.0);
        cfg.drive.kind = DetuningKind::bare;
        cfg.drive.detuning = 0.02 * cfg.cavity.kappa;
        const auto branches = steady_state_branches(cfg);
        REQUIRE(branches.size() == 1);
        CHECK(std::norm(branches[0].state.alpha) ==
              doctest::Approx(2417005358.7630506).epsilon(1e-9));
    }
    SUBCASE("bistable region returns all roots, middle branch unstable") {
        SystemConfig cfg = device_config(13e-3, 0.0, 1e5, 4.0);
        cfg.drive.kind = DetuningKind::bare;
        cfg.drive.detuning = 3.0 * cfg.cavity.kappa;
        const auto branches = steady_state_branches(cfg);
        REQUIRE(branches.size() == 3);
        CHECK(std::norm(branches[0].state.alpha) <
              std::norm(branches[1].state.alpha));
        CHECK(std::norm(branches[1].state.alpha) <
              std::norm(branches[2].state.alpha));
        CHECK_FALSE(branches[1].stable);  // middle branch of the fold
        CHECK(branches[0].stable);
        // designated branch: continuously connected to low power
        const SteadyState designated =
            steady_state(cfg, SteadyStateMode::self_consistent);
        CHECK(designated.alpha == branches[0].state.alpha);
    }
}

TEST_CASE("stability") {
    SUBCASE("decoupled limit has textbook eigenvalues") {
        SystemConfig cfg = device_config(0.0, 0.13);
        const SteadyState st = steady_state(cfg);
        const StabilityResult res = stability_check(cfg, st);
        CHECK(res.is_stable);
        const double kappa = cfg.cavity.kappa;
        const double delta = st.detuning;
        // pairs {-kappa +- i delta} and {-gamma_m/2 +- i omega_m (1 + O(1/Q^2))}
        int n_cavity = 0, n_mech = 0;
        for (const complex& ev : res.eigenvalues) {
            if (std::abs(ev.real() + kappa) < 1e-6 * kappa) {
                ++n_cavity;
                CHECK(std::abs(std::abs(ev.imag()) - std::abs(delta)) <
                      1e-6 * kappa);
            } else {
                ++n_mech;
                CHECK(ev.real() ==
                      doctest::Approx(-cfg.mech.gamma_m / 2).epsilon(1e-6));
                CHECK(std::abs(ev.imag()) ==
                      doctest::Approx(cfg.mech.omega_m).epsilon(1e-7));
            }
        }
        CHECK(n_cavity == 2);
        CHECK(n_mech == 2);
    }
    SUBCASE("squeezing operating point is stable") {
        SystemConfig cfg = device_config(30e-3, 0.014, 1e5, 4.0);
        const SteadyState st = steady_state(cfg);
        CHECK(stability_check(cfg, st).is_stable);
    }
    SUBCASE("detuning sweep at 30 mW: contiguous unstable interval") {
        // regression endpoints found by bisection on the eigenvalue sweep
        const double lo = 0.057329964918713922;
        const double hi = 2.3199738956707749;
        auto stable_at = [](double dfrac) {
            SystemConfig cfg = device_config(30e-3, dfrac, 1e5, 4.0);
            const SteadyState st = steady_state(cfg);
            return stability_check(cfg, st).is_stable;
        };
        CHECK(stable_at(lo * 0.999));
        CHECK_FALSE(stable_at(lo * 1.001));
        CHECK_FALSE(stable_at(hi * 0.999));
        CHECK(stable_at(hi * 1.001));
        CHECK_FALSE(stable_at(0.5));  // interior of the interval
    }
    SUBCASE("invariant under uniform time rescaling") {
        SystemConfig cfg = device_config(5e-3, 0.05);
        const SteadyState st = steady_state(cfg);
        const StabilityResult base = stability_check(cfg, st);

        const double s = 3.7;
        SystemConfig scaled = cfg;
        scaled.cavity.kappa *= s;
        scaled.cavity.kappa1 *= s;
        scaled.cavity.kappa2 *= s;
        scaled.mech.omega_m *= s;
        scaled.mech.gamma_m *= s;
        scaled.g0 *= s;
        SteadyState st_scaled = st;  // same alpha; rates carry the scaling
        st_scaled.detuning *= s;
        st_scaled.coupling *= s;
        const StabilityResult res = stability_check(scaled, st_scaled);
        CHECK(res.is_stable == base.is_stable);
        for (int i = 0; i < 4; ++i) {
            // eigenvalues scale by s (up to ordering)
            bool matched = false;
            for (int j = 0; j < 4; ++j)
                if (std::abs(res.eigenvalues[i] - s * base.eigenvalues[j]) <
                    1e-6 * s * std::abs(base.eigenvalues[j]) + 1e-9)
                    matched = true;
            CHECK(matched);
        }
    }
}

TEST_CASE("tabulated PSD") {
    const Psd psd(std::vector<std::pair<double, double>>{
        {1e3, 2.0}, {1e4, 4.0}, {1e5, 1.0}});
    CHECK(psd(1e2) == 2.0);     // clamped below
    CHECK(psd(1e6) == 1.0);     // clamped above
    CHECK(psd(5.5e3) == doctest::Approx(3.0));
    CHECK(psd(-5.5e3) == doctest::Approx(3.0));  // symmetric in omega
    CHECK_THROWS_AS(Psd(-1.0), ParameterError);
    CHECK_THROWS_AS(Psd(std::vector<std::pair<double, double>>{{1e3, -2.0}}),
                    ParameterError);
}
