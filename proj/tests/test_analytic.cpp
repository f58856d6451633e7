// Reference values in this file were computed with 30-digit arbitrary
// precision arithmetic and frozen here (13 digits for the survival table).

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "nqa/analytic.hpp"

using namespace nqa;

TEST_CASE("weber parameters satisfy their stated identities") {
    const ChainParams p = canonical_params(10.0);
    for (int k : {1, 64, 300}) {
        const double phi = mode_angle(p.N, k).phi;
        const WeberParams w = weber_parameters(p, k, 1.0);
        REQUIRE(w.nu.real() > 0.0);
        const double want =
            2.0 * p.tau * p.J * std::cos(phi) * std::cos(phi) /
            std::hypot(p.g, p.delta);
        REQUIRE(std::abs(std::norm(w.z) - want) <= 1e-10 * want);
    }
}

TEST_CASE("exact mode solution matches the frozen survival table") {
    struct Row {
        double delta;
        int k;
        double want;
    };
    const Row rows[] = {
        {0.0, 1, 7.380440232947e-04},   {0.0, 8, 1.529324558097e-01},
        {0.0, 64, 9.999905147603e-01},  {0.0, 128, 9.999504647570e-01},
        {0.0, 512, 9.999999990665e-01}, {10.0, 1, 9.999999583836e-01},
        {10.0, 8, 9.999995120452e-01},  {10.0, 64, 9.999678244827e-01},
        {10.0, 128, 9.998918241466e-01},{10.0, 512, 9.999999983278e-01},
    };
    for (const Row& r : rows) {
        const SurvivalEstimate got = weber_survival(canonical_params(r.delta), r.k);
        // the deviation must stay inside the function's own error report,
        // which in turn must be small at these points
        REQUIRE(std::abs(got.p - r.want) <= std::max(1e-12, got.uncertainty));
        REQUIRE(got.uncertainty <= 1e-4);
    }
}

TEST_CASE("exact solution outside its argument domain is refused") {
    const ChainParams p = make_params(0.5, 10.0, 2.0, 500.0, 64);
    REQUIRE_THROWS_AS(weber_survival(p, 32, 0.5), domain_error);
    REQUIRE_NOTHROW(weber_survival(p, 32, 1.0));
}

TEST_CASE("long-wavelength asymptotics match the frozen values") {
    struct Row {
        double delta;
        int k;
        double want;
    };
    const Row rows[] = {
        {0.0, 1, 0.00073897174936677289}, {0.0, 8, 0.15313437507628894},
        {0.0, 64, 0.99998801711497158},   {10.0, 1, 0.99999997343211242},
        {10.0, 8, 0.99999999988229675},   {10.0, 64, 0.99999999999795052},
    };
    for (const Row& r : rows) {
        const AsymptoticSurvival got =
            pk_asymptotic(canonical_params(r.delta), r.k);
        REQUIRE(std::abs(got.p - r.want) <= 1e-12 * r.want);
    }
    // validity flags and the domain cut at phi = pi/8
    REQUIRE_FALSE(pk_asymptotic(canonical_params(0.0), 16).warning_band);
    REQUIRE(pk_asymptotic(canonical_params(0.0), 64).warning_band);
    REQUIRE_THROWS_AS(pk_asymptotic(canonical_params(0.0), 65), invalid_params);
}

TEST_CASE("closed-form inputs and the reference time scale") {
    const ChainParams p64 = make_params(0.5, 10.0, 0.0, 500.0, 64);
    const ClosedFormInputs in64 = closed_form_inputs(p64);
    REQUIRE(std::abs(in64.tau0 - 16600.46272796062) <= 1e-9);
    REQUIRE(std::abs(closed_form_inputs(canonical_params(0.0)).tau0 -
                     4249718.4583579188) <= 1e-6);

    // delta = 0 degenerates to the Hermitian scaling variables
    REQUIRE(in64.kappa0 == 0.0);
    REQUIRE(std::abs(in64.kappa - p64.tau / in64.tau0) <= 1e-15);
    REQUIRE(std::abs(in64.nu_first - cplx(p64.tau / in64.tau0, 0.0)) <= 1e-15);
}

TEST_CASE("ground-state estimates match the frozen values") {
    struct Row {
        double tau;
        double want;
    };
    const Row rows[] = {{500.0, 0.17241817479068018},
                        {4000.0, 0.7799671341434327},
                        {8000.0, 0.95158553794294586},
                        {16000.0, 0.99765603986372606}};
    for (const Row& r : rows) {
        const ChainParams p = make_params(0.5, 10.0, 0.0, r.tau, 64);
        REQUIRE(std::abs(pgs_landau_zener(p) - r.want) <= 1e-12);
        // at delta = 0 the first-mode estimate reduces to it exactly
        REQUIRE(std::abs(pgs_first_mode(p) - pgs_landau_zener(p)) <= 1e-10);
    }
    const ChainParams p10 = canonical_params(10.0);
    REQUIRE(std::abs(pgs_first_mode(p10) - 0.9999999624362915) <= 1e-12);

    const FastQuenchEstimate fq = pgs_fast_quench(p10);
    REQUIRE(std::abs(fq.p_gs - 0.99999998121686949) <= 1e-12);
    REQUIRE(fq.condition_met);
    REQUIRE_FALSE(fq.invalid);
    REQUIRE_FALSE(fq.short_time_warning);
}

TEST_CASE("closed kink density matches the frozen values") {
    struct Row {
        double delta;
        double want;
    };
    const Row rows[] = {{0.1, 0.027315977972534416},
                        {1.0, 0.0043396650835599151},
                        {10.0, 7.8354332653574268e-13}};
    for (const Row& r : rows) {
        const ClosedKinkDensity got = kink_density_closed(canonical_params(r.delta));
        REQUIRE(std::abs(got.n - r.want) <= 1e-10 * r.want);
        REQUIRE_FALSE(got.beyond_validity);
    }
    // Hermitian limit: n = n0 = sqrt(g/(J tau)) / (2 pi)
    REQUIRE(std::abs(kink_density_closed(canonical_params(0.0)).n -
                     0.031830988618379067) <= 1e-15);
    REQUIRE(kink_density_closed(canonical_params(20.0)).beyond_validity);
}
