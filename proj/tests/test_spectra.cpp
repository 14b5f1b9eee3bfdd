#include "pondera/constants.hpp"
#include "pondera/rng.hpp"
#include "pondera/spectra.hpp"
#include "pondera/system.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace pondera;
using pondera::testing::device_config;
using pondera::testing::squeezing_config;

TEST_CASE("input noise spectra") {
    SystemConfig cfg = device_config(1e-3, 0.02, 16000.0, 300.0, 300.0, 0.1);
    SUBCASE("classical limit of the thermal density") {
        const double w = cfg.mech.omega_m;  // hbar w << kB T at 300 K
        const double classical = (cfg.mech.gamma_m / cfg.mech.omega_m) *
                                 (2.0 * phys::k_boltzmann * 300.0 / phys::hbar);
        CHECK(input_noise_spectra(w, cfg).s_thermal ==
              doctest::Approx(classical).epsilon(1e-9));
        // w = 0 handled by the analytic limit
        CHECK(input_noise_spectra(0.0, cfg).s_thermal ==
              doctest::Approx(classical).epsilon(1e-12));
    }
    SUBCASE("zero temperature keeps |w|") {
        cfg.mech.temperature = 0.0;
        const double w = 3e5;
        CHECK(input_noise_spectra(w, cfg).s_thermal ==
              doctest::Approx((cfg.mech.gamma_m / cfg.mech.omega_m) * w));
        CHECK(input_noise_spectra(-w, cfg).s_thermal ==
              doctest::Approx((cfg.mech.gamma_m / cfg.mech.omega_m) * w));
    }
    SUBCASE("budget values pass through with the 2 pi factors") {
        CHECK(input_noise_spectra(1e5, cfg).s_freq ==
              doctest::Approx(4.0 * phys::pi * phys::pi * 300.0));
        CHECK(input_noise_spectra(1e5, cfg).s_amp == doctest::Approx(0.1));
        CHECK(input_noise_spectra(1e5, cfg).s_in == 1.0);
    }
}

TEST_CASE("vacuum passthrough") {
    Xoshiro256pp rng(31);
    for (double eta : {0.0, 0.3, 0.5, 1.0}) {
        SystemConfig cfg = device_config(0.0, 0.0, 16000.0, 0.0, 0.0, 0.0, eta);
        for (int i = 0; i < 25; ++i) {
            cfg.drive.detuning = (2.0 * rng.uniform() - 1.0) * cfg.cavity.kappa;
            const SteadyState st = steady_state(cfg);
            const double w = (2.0 * rng.uniform() - 1.0) * 3e7;
            const SpectrumPoint pt = quadrature_spectra(w, cfg, st);
            CHECK(std::abs(pt.sx.total() - 1.0) < 1e-10);
            CHECK(std::abs(pt.sy.total() - 1.0) < 1e-10);
            CHECK(std::abs(pt.sxy.total()) < 1e-10);
        }
    }
}

TEST_CASE("resonant drive transduces no frequency noise") {
    // at Delta = 0 the frequency-noise pathway has no mechanical feature
    const SystemConfig cfg =
        device_config(1e-3, 0.0, 16000.0, 300.0, 1e10, 0.0);
    const SteadyState st = steady_state(cfg);
    const double wm = cfg.mech.omega_m;
    const double gm = cfg.mech.gamma_m;
    const double at_res = quadrature_spectra(wm, cfg, st).sx.freq;
    for (double off : {-10.0, -3.0, 3.0, 10.0}) {
        const double nearby = quadrature_spectra(wm + off * gm, cfg, st).sx.freq;
        CHECK(std::abs(nearby / at_res - 1.0) < 1e-3);
    }
}

TEST_CASE("squeezing-point decomposition, frozen") {
    const SystemConfig cfg = squeezing_config(0.014);
    const SteadyState st = steady_state(cfg);
    const SpectrumPoint pt = quadrature_spectra(cfg.mech.omega_m, cfg, st);
    CHECK(pt.sx.quan == doctest::Approx(4.9991752087526642).epsilon(1e-10));
    CHECK(pt.sx.freq == doctest::Approx(4.7050056531902611e-05).epsilon(1e-8));
    CHECK(pt.sx.ampl == 0.0);
    CHECK(pt.sx.ther == doctest::Approx(5.8940745190404202).epsilon(1e-10));
    CHECK(pt.sy.quan == doctest::Approx(10200.989584744297).epsilon(1e-10));
    CHECK(pt.sy.freq == doctest::Approx(0.060177814579996894).epsilon(1e-8));
    CHECK(pt.sy.ther == doctest::Approx(7532.6160035518278).epsilon(1e-10));
    CHECK(pt.sxy.quan == doctest::Approx(214.22777563347699).epsilon(1e-10));
    CHECK(pt.sxy.freq == doctest::Approx(0.0016812924189361712).epsilon(1e-8));
    CHECK(pt.sxy.ther == doctest::Approx(210.62577883247909).epsilon(1e-10));

    SUBCASE("cancellation suppresses the frequency term at the resonance") {
        const double phi = optimal_spectrum(pt).phi_opt;
        auto freq_part = [&](double w) {
            const SpectrumPoint q = quadrature_spectra(w, cfg, st);
            SpectrumPoint only;
            only.sx.freq = q.sx.freq;
            only.sy.freq = q.sy.freq;
            only.sxy.freq = q.sxy.freq;
            return homodyne_spectrum(only, phi);
        };
        const double up = freq_part(cfg.mech.omega_m + 50.0 * cfg.mech.gamma_m);
        const double ratio = freq_part(cfg.mech.omega_m) / up;
        CHECK(ratio == doctest::Approx(1.0375090714557902e-4).epsilon(1e-6));
        CHECK(ratio < 0.01);  // at least 20 dB down
    }
}

TEST_CASE("homodyne phase algebra") {
    const SystemConfig cfg = squeezing_config(0.014);
    const SteadyState st = steady_state(cfg);
    const SpectrumPoint pt = quadrature_spectra(0.98 * cfg.mech.omega_m, cfg, st);

    CHECK(homodyne_spectrum(pt, 0.0) == doctest::Approx(pt.sx.total()));
    CHECK(homodyne_spectrum(pt, 0.5 * phys::pi) == doctest::Approx(pt.sy.total()));
    const double mean = (homodyne_spectrum(pt, 0.0) +
                         homodyne_spectrum(pt, 0.25 * phys::pi) +
                         homodyne_spectrum(pt, 0.5 * phys::pi) +
                         homodyne_spectrum(pt, 0.75 * phys::pi)) /
                        4.0;
    CHECK(mean == doctest::Approx(0.5 * (pt.sx.total() + pt.sy.total()))
                      .epsilon(1e-12));
    // pi-periodicity
    CHECK(homodyne_spectrum(pt, 0.3) ==
          doctest::Approx(homodyne_spectrum(pt, 0.3 + phys::pi)).epsilon(1e-12));

    SUBCASE("squeezed below shot noise at the resonance") {
        const SpectrumPoint res = quadrature_spectra(cfg.mech.omega_m, cfg, st);
        const double phi_bar = 178.6 * phys::pi / 180.0;
        CHECK(homodyne_spectrum(res, phi_bar) < 1.0);
    }
}

TEST_CASE("optimal phase and spectrum") {
    SUBCASE("degenerate-free analytic case") {
        SpectrumPoint pt;
        pt.sx.quan = 3.0;
        pt.sy.quan = 2.0;
        pt.sxy.quan = 0.0;
        const OptimalPoint opt = optimal_spectrum(pt);
        CHECK(opt.s_opt == doctest::Approx(2.0));
        CHECK(opt.phi_opt == doctest::Approx(0.5 * phys::pi));
        CHECK_FALSE(opt.degenerate);
    }
    SUBCASE("degenerate point flags and returns zero phase") {
        SpectrumPoint pt;
        pt.sx.quan = 1.0;
        pt.sy.quan = 1.0;
        const OptimalPoint opt = optimal_spectrum(pt);
        CHECK(opt.degenerate);
        CHECK(opt.phi_opt == 0.0);
        CHECK(opt.s_opt == doctest::Approx(1.0));
    }
    SUBCASE("matches brute-force minimization and bounds") {
        const SystemConfig cfg = squeezing_config(0.014);
        const SteadyState st = steady_state(cfg);
        Xoshiro256pp rng(41);
        for (int i = 0; i < 60; ++i) {
            const double w =
                cfg.mech.omega_m + (2.0 * rng.uniform() - 1.0) * 1e5;
            const SpectrumPoint pt = quadrature_spectra(w, cfg, st);
            const OptimalPoint opt = optimal_spectrum(pt);
            CHECK(opt.s_opt <=
                  std::min(pt.sx.total(), pt.sy.total()) + 1e-12);
            double brute = 1e300;
            for (int k = 0; k < 20000; ++k)
                brute = std::min(
                    brute, homodyne_spectrum(pt, phys::pi * k / 20000.0));
            CHECK(std::abs(opt.s_opt - brute) <=
                  1e-8 * std::abs(brute) + 1e-12);
            CHECK(homodyne_spectrum(pt, opt.phi_opt) ==
                  doctest::Approx(opt.s_opt).epsilon(1e-10));
        }
    }
    SUBCASE("optimal phase at the bare resonance, three detunings") {
        const double expect[][2] = {
            {0.014, 178.6275405934243},
            {0.001, 179.90196282587436},
            {0.063, 173.829233785208},
        };
        for (const auto& row : expect) {
            const SystemConfig cfg = squeezing_config(row[0]);
            const SteadyState st = steady_state(cfg);
            const SpectrumPoint pt =
                quadrature_spectra(cfg.mech.omega_m, cfg, st);
            const double deg = optimal_spectrum(pt).phi_opt * 180.0 / phys::pi;
            CHECK(deg == doctest::Approx(row[1]).epsilon(1e-9));
        }
    }
}

TEST_CASE("phase-jitter averaging") {
    const SystemConfig cfg = squeezing_config(0.014);
    const SteadyState st = steady_state(cfg);
    const SpectrumPoint pt = quadrature_spectra(cfg.mech.omega_m, cfg, st);
    const double phi = optimal_spectrum(pt).phi_opt;

    SUBCASE("zero jitter is bit-identical") {
        CHECK(averaged_spectrum(pt, phi, 0.0) == homodyne_spectrum(pt, phi));
        CHECK(averaged_optimal_spectrum(pt, 0.0) ==
              optimal_spectrum(pt).s_opt);
    }
    SUBCASE("large jitter randomizes the phase") {
        CHECK(averaged_spectrum(pt, phi, 50.0) ==
              doctest::Approx(0.5 * (pt.sx.total() + pt.sy.total()))
                  .epsilon(1e-12));
    }
    SUBCASE("monotone degradation of the squeezing minimum") {
        double prev = averaged_spectrum(pt, phi, 0.0);
        for (double deg : {0.05, 0.2, 0.5, 1.0, 2.0}) {
            const double v =
                averaged_spectrum(pt, phi, deg * phys::pi / 180.0);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("uncertainty-product margin") {
    SUBCASE("pure vacuum saturates the bound") {
        SystemConfig cfg = device_config(0.0, 0.1, 16000.0, 0.0, 0.0, 0.0, 0.0);
        const SteadyState st = steady_state(cfg);
        for (double w : {1e5, 8.1e5, 4e6})
            CHECK(std::abs(heisenberg_margin(quadrature_spectra(w, cfg, st))) <
                  1e-12);
    }
    SUBCASE("driven but lossless and noise-free stays saturated") {
        SystemConfig cfg = device_config(1e-3, 0.02, 16000.0, 0.0, 0.0, 0.0, 0.0);
        const SteadyState st = steady_state(cfg);
        for (double w : {3e5, 8.10285e5, 1.1e6})
            CHECK(std::abs(heisenberg_margin(quadrature_spectra(w, cfg, st))) <
                  1e-9);
    }
    SUBCASE("thermal noise opens the margin") {
        const SystemConfig cfg = device_config(1e-3, 0.02, 16000.0, 300.0);
        const SteadyState st = steady_state(cfg);
        CHECK(heisenberg_margin(quadrature_spectra(8.1e5, cfg, st)) > 0.0);
    }
}

TEST_CASE("decomposition properties") {
    const SystemConfig cfg =
        device_config(1e-3, 0.021, 16000.0, 300.0, 1e10, 0.3);
    const SteadyState st = steady_state(cfg);
    Xoshiro256pp rng(53);
    for (int i = 0; i < 100; ++i) {
        const double w = (0.1 + 2.9 * rng.uniform()) * cfg.mech.omega_m;
        const SpectrumPoint pt = quadrature_spectra(w, cfg, st);
        for (const NoiseSplit* s : {&pt.sx, &pt.sy}) {
            CHECK(s->quan >= 0.0);
            CHECK(s->freq >= 0.0);
            CHECK(s->ampl >= 0.0);
            CHECK(s->ther >= 0.0);
            CHECK(s->total() ==
                  doctest::Approx(s->quan + s->freq + s->ampl + s->ther)
                      .epsilon(1e-12));
        }
        CHECK(pt.sx.total() >= 0.0);
        CHECK(pt.sy.total() >= 0.0);
    }
}

TEST_CASE("squeezing report") {
    SUBCASE("shot-noise-only configuration reports nothing") {
        SystemConfig cfg = device_config(0.0, 0.05, 16000.0, 0.0);
        const SteadyState st = steady_state(cfg);
        std::vector<double> grid;
        for (int i = 0; i <= 400; ++i)
            grid.push_back(cfg.mech.omega_m +
                           (-20.0 + 0.1 * i) * cfg.mech.gamma_m);
        const SqueezingReport rep = squeezing_report(grid, 0.3, cfg, st);
        CHECK(rep.bands.empty());
    }
    SUBCASE("squeezing-point band and frozen depth") {
        const SystemConfig cfg = squeezing_config(0.014);
        const SteadyState st = steady_state(cfg);
        const SpectrumPoint pt = quadrature_spectra(cfg.mech.omega_m, cfg, st);
        const double phi = optimal_spectrum(pt).phi_opt;
        std::vector<double> grid;
        for (int i = 0; i <= 8000; ++i)
            grid.push_back(cfg.mech.omega_m +
                           (-400.0 + 0.1 * i) * cfg.mech.gamma_m);
        const SqueezingReport rep = squeezing_report(grid, phi, cfg, st);
        REQUIRE(rep.bands.size() == 1);
        CHECK(rep.bands[0].omega_lo < cfg.mech.omega_m);
        CHECK(rep.bands[0].omega_hi > cfg.mech.omega_m);
        CHECK(rep.min_db == doctest::Approx(-1.4606166388422244).epsilon(1e-7));
        CHECK(std::abs(rep.min_omega - cfg.mech.omega_m) < cfg.mech.gamma_m);
        // every reported band is strictly sub-unity inside
        for (const SqueezingBand& b : rep.bands) {
            for (double t : {0.25, 0.5, 0.75}) {
                const double w = b.omega_lo + t * (b.omega_hi - b.omega_lo);
                CHECK(homodyne_spectrum(quadrature_spectra(w, cfg, st), phi) <
                      1.0);
            }
        }

        SUBCASE("stronger frequency noise narrows the band") {
            double prev_width =
                rep.bands[0].omega_hi - rep.bands[0].omega_lo;
            for (double s : {3e3, 3e4}) {
                const SystemConfig louder = squeezing_config(0.014, s);
                const SteadyState st2 = steady_state(louder);
                const SqueezingReport rep2 =
                    squeezing_report(grid, phi, louder, st2);
                REQUIRE(rep2.bands.size() >= 1);
                // widest band still contains omega_m
                double width = 0.0;
                for (const SqueezingBand& b : rep2.bands)
                    if (b.omega_lo < cfg.mech.omega_m &&
                        b.omega_hi > cfg.mech.omega_m)
                        width = b.omega_hi - b.omega_lo;
                CHECK(width > 0.0);
                CHECK(width < prev_width);
                prev_width = width;
            }
        }
    }
}

TEST_CASE("detuning-phase map") {
    const SystemConfig base = squeezing_config(0.014);
    std::vector<double> detunings;
    for (double f : {0.001, 0.014, 0.04, 0.1})
        detunings.push_back(f * base.cavity.kappa);
    std::vector<double> phases;
    for (int i = 0; i < 360; ++i) phases.push_back(phys::pi * i / 360.0);
    const DetuningPhaseMap map = detuning_phase_map(detunings, phases, base);

    // 0.1 kappa sits inside the 30 mW unstable interval: flagged, not valued
    for (const MapCell& cell : map.cells[3]) CHECK(cell.unstable);
    for (std::size_t d = 0; d < 3; ++d)
        for (const MapCell& cell : map.cells[d]) CHECK_FALSE(cell.unstable);

    auto subunity_width = [&](std::size_t d) {
        int n = 0;
        for (const MapCell& cell : map.cells[d])
            if (!cell.unstable && cell.value < 1.0) ++n;
        return n;
    };
    // the sub-shot-noise phase window widens with detuning
    CHECK(subunity_width(0) < subunity_width(1));
    CHECK(subunity_width(1) < subunity_width(2));
    CHECK(subunity_width(0) > 0);
}

TEST_CASE("jitter map") {
    const SystemConfig cfg = squeezing_config(0.014);
    const SteadyState st = steady_state(cfg);
    std::vector<double> omegas;
    for (int i = 0; i <= 200; ++i)
        omegas.push_back(cfg.mech.omega_m + (-10.0 + 0.1 * i) * cfg.mech.gamma_m);
    const std::vector<double> jitters = {0.0, 0.5 * phys::pi / 180.0,
                                         2.0 * phys::pi / 180.0};
    const double phi = 178.6275405934243 * phys::pi / 180.0;
    const JitterMap map = jitter_map(omegas, jitters, phi, cfg, st);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double direct = homodyne_spectrum(
            quadrature_spectra(omegas[i], cfg, st), phi);
        CHECK(map.values[0][i] == doctest::Approx(direct).epsilon(1e-12));
        CHECK(map.values[2][i] >= map.values[0][i] - 1e-12);
    }
}
