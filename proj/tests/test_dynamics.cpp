// Reference survival probabilities in this file come from an independent
// 30-digit evaluation of the exact mode solution, frozen to 13 digits.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "nqa/dynamics.hpp"

using namespace nqa;

TEST_CASE("hermitian-limit finals match the exact solution") {
    const ChainParams p = canonical_params(0.0);
    const Trajectory t1 = integrate_diabatic(p, 1);
    const Trajectory t8 = integrate_diabatic(p, 8);
    REQUIRE(std::abs(t1.P.back() - 7.380440232947e-04) <= 1e-11);
    REQUIRE(std::abs(t8.P.back() - 1.529324558097e-01) <= 1e-11);

    // single-mode norm conservation at delta = 0
    const ModeState& st = t1.states.back();
    REQUIRE(std::abs(std::norm(st.u) + std::norm(st.v) - 1.0) <= 1e-8);
    REQUIRE(t1.stats.renormalizations == 0);
}

TEST_CASE("trajectory structure and probability readout") {
    const ChainParams p = make_params(0.5, 10.0, 0.05, 100.0, 64);
    const std::vector<double> grid = default_sample_grid(201);
    const Trajectory tr = integrate_diabatic(p, 4, grid);
    REQUIRE(tr.s == grid);
    REQUIRE(tr.states.size() == grid.size());
    REQUIRE(tr.frame.size() == grid.size());
    REQUIRE(tr.P.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        REQUIRE(tr.P[i] >= 0.0);
        REQUIRE(tr.P[i] <= 1.0);
        REQUIRE(tr.P[i] == survival_probability(tr.frame[i]));
    }
}

TEST_CASE("both integration engines produce the same survival curve") {
    for (double delta : {0.0, 0.05}) {
        const ChainParams p = make_params(0.5, 10.0, delta, 100.0, 64);
        const Trajectory td = integrate_diabatic(p, 8);
        const Trajectory ta = integrate_adiabatic(p, 8);
        double worst = 0.0;
        for (std::size_t i = 0; i < td.P.size(); ++i)
            worst = std::max(worst, std::abs(td.P[i] - ta.P[i]));
        REQUIRE(worst <= 1e-10);
    }
}

TEST_CASE("forward integration agrees with the closed-form engine") {
    const ChainParams p = canonical_params(0.0);
    const double dia = integrate_diabatic(p, 1).P.back();
    const double web = weber_survival(p, 1).p;
    REQUIRE(std::abs(dia - web) <= 1e-8);
}

TEST_CASE("frame transform round trip") {
    const ChainParams p = canonical_params(10.0);
    const ModeSpectrum sp = eigensystem(p, 37, 0.4 * p.tau);
    const ModeState st{cplx{0.3, -0.8}, cplx{0.5, 0.1}};
    const ModeState back = inverse_frame_transform(frame_transform(st, sp), sp);
    REQUIRE(std::abs(back.u - st.u) <= 1e-13);
    REQUIRE(std::abs(back.v - st.v) <= 1e-13);
}

TEST_CASE("adiabatic engine refuses modes on the exceptional ring") {
    const ChainParams p = canonical_params(10.0);  // alpha between modes 128, 129
    REQUIRE_THROWS_AS(integrate_adiabatic(p, 128), domain_error);
    REQUIRE_THROWS_AS(integrate_adiabatic(p, 129), domain_error);
    REQUIRE_NOTHROW(integrate_adiabatic(p, 180));
    // the diabatic engine covers the excluded modes
    const Trajectory tr = integrate_diabatic(p, 128, default_sample_grid(51));
    REQUIRE(tr.P.back() >= 0.0);
    REQUIRE(tr.P.back() <= 1.0);
    REQUIRE(tr.stats.renormalizations > 0);  // non-Hermitian amplification
}

TEST_CASE("sample grids are validated") {
    const ChainParams p = make_params(0.5, 10.0, 0.0, 100.0, 64);
    REQUIRE_THROWS_AS(integrate_diabatic(p, 1, {0.0, 0.5, 0.9}), invalid_params);
    REQUIRE_THROWS_AS(integrate_diabatic(p, 1, {0.0, 0.5, 0.5, 1.0}),
                      invalid_params);
    REQUIRE_THROWS_AS(default_sample_grid(1), invalid_params);
    const std::vector<double> g = default_sample_grid(11);
    REQUIRE(g.front() == 0.0);
    REQUIRE(g.back() == 1.0);
    REQUIRE(g.size() == 11);
}

TEST_CASE("ground-state probability is worker-count independent") {
    const ChainParams p = make_params(0.5, 10.0, 3.0, 500.0, 256);
    const GroundStateResult a =
        ground_state_probability(p, Engine::weber, Preparation::asymptotic, 1);
    const GroundStateResult b =
        ground_state_probability(p, Engine::weber, Preparation::asymptotic, 4);
    REQUIRE(a.p_gs == b.p_gs);  // bit identical
    REQUIRE(a.per_mode == b.per_mode);
    REQUIRE(a.per_mode.size() == std::size_t(p.N / 2));
    REQUIRE(a.p_gs > 0.0);
    REQUIRE(a.p_gs < 1.0);
    REQUIRE(a.per_mode.back() > 0.99);  // short-wavelength modes stay put
}

TEST_CASE("kink statistics from per-mode survivals") {
    const KinkReport zero = kink_number({1.0, 1.0, 1.0});
    REQUIRE(zero.number == 0.0);
    REQUIRE(zero.density == 0.0);

    const KinkReport r = kink_number({0.5, 1.0});
    REQUIRE(r.number == 1.0);
    REQUIRE(r.density == 0.25);
    REQUIRE(r.excitation == std::vector<double>{0.5, 0.0});

    // fully excited chain: every pair of sites hosts a kink pair
    const KinkReport full = kink_number(std::vector<double>(8, 0.0));
    REQUIRE(full.number == 16.0);
    REQUIRE(full.density == 1.0);

    REQUIRE_THROWS_AS(kink_number({}), invalid_params);
    REQUIRE_THROWS_AS(kink_number({1.2}), invalid_params);
}

TEST_CASE("kink density tracks the closed form in the slow-decay regime") {
    const ChainParams p = make_params(0.5, 10.0, 0.05, 100.0, 16);
    const GroundStateResult gs = ground_state_probability(p, Engine::diabatic);
    const KinkReport kr = kink_number(gs.per_mode);
    const ClosedKinkDensity cf = kink_density_closed(p);
    REQUIRE_FALSE(cf.beyond_validity);
    REQUIRE(std::abs(kr.density - cf.n) <= 0.15 * cf.n);
}

TEST_CASE("excitation surface evaluates a small grid") {
    const ChainParams base = make_params(0.5, 10.0, 0.0, 100.0, 64);
    const std::vector<double> rows{0.3, 1.0};
    const std::vector<double> phis{0.5, 1.5, 2.5};
    const ExcitationSurface surf =
        excitation_surface(base, SurfaceTime::at_tau, SurfaceAxis::delta_axis,
                           rows, phis, Engine::diabatic);
    REQUIRE(surf.p_ex.size() == rows.size());
    for (const auto& row : surf.p_ex) {
        REQUIRE(row.size() == phis.size());
        for (double v : row) {
            REQUIRE(std::isfinite(v));
            REQUIRE(v >= 0.0);
            REQUIRE(v <= 1.0);
        }
    }
    REQUIRE_THROWS_AS(
        excitation_surface(base, SurfaceTime::at_tau, SurfaceAxis::alpha_axis,
                           {1.6}, phis),
        invalid_params);
    REQUIRE_THROWS_AS(
        excitation_surface(base, SurfaceTime::at_tau, SurfaceAxis::delta_axis,
                           rows, {0.0}),
        invalid_params);
    REQUIRE_THROWS_AS(
        excitation_surface(base, SurfaceTime::at_tau, SurfaceAxis::delta_axis,
                           {}, phis),
        invalid_params);
}

TEST_CASE("preparation choice shifts the initial condition slightly") {
    const ChainParams p = make_params(0.5, 10.0, 0.0, 100.0, 64);
    const double pa =
        integrate_diabatic(p, 1, default_sample_grid(51),
                           Preparation::asymptotic).P.back();
    const double pi_ =
        integrate_diabatic(p, 1, default_sample_grid(51),
                           Preparation::instantaneous).P.back();
    REQUIRE(pa != pi_);
    REQUIRE(std::abs(pa - pi_) <= 0.05);  // O(1/(tau J)) mixing
}
