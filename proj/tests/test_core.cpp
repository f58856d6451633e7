#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "nqa/core.hpp"

using namespace nqa;

TEST_CASE("parameter validation rejects out-of-domain values") {
    REQUIRE_THROWS_AS(make_params(0.0, 10.0, 0.0, 500.0, 64), invalid_params);
    REQUIRE_THROWS_AS(make_params(-1.0, 10.0, 0.0, 500.0, 64), invalid_params);
    REQUIRE_THROWS_AS(make_params(0.5, 0.0, 0.0, 500.0, 64), invalid_params);
    REQUIRE_THROWS_AS(make_params(0.5, 10.0, -0.1, 500.0, 64), invalid_params);
    REQUIRE_THROWS_AS(make_params(0.5, 10.0, 0.0, 0.0, 64), invalid_params);
    REQUIRE_THROWS_AS(make_params(0.5, 10.0, 0.0, -5.0, 64), invalid_params);
    REQUIRE_THROWS_AS(make_params(0.5, 10.0, 0.0, 500.0, 0), invalid_params);
    REQUIRE_THROWS_AS(make_params(0.5, 10.0, 0.0, 500.0, 62), invalid_params);
    REQUIRE_NOTHROW(make_params(0.5, 10.0, 0.0, 500.0, 64));
}

TEST_CASE("alpha is the phase of g + i delta") {
    REQUIRE(make_params(0.5, 10.0, 0.0, 500.0, 64).alpha == 0.0);
    REQUIRE(std::abs(make_params(0.5, 10.0, 10.0, 500.0, 64).alpha -
                     M_PI / 4.0) <= 1e-15);
    const ChainParams p = make_params(0.5, 10.0, 5.0, 500.0, 64);
    REQUIRE(std::abs(std::tan(p.alpha) - 0.5) <= 1e-15);
}

TEST_CASE("mode angles are ascending and fill (0, pi)") {
    const int N = 64;
    REQUIRE(std::abs(mode_angle(N, 1).phi - M_PI / N) <= 1e-16);
    REQUIRE(std::abs(mode_angle(N, N / 2).phi - M_PI * (N - 1.0) / N) <= 1e-14);
    for (int k = 2; k <= N / 2; ++k)
        REQUIRE(mode_angle(N, k).phi > mode_angle(N, k - 1).phi);
    REQUIRE(mode_angle(N, 5).k == 5);
    REQUIRE_THROWS_AS(mode_angle(N, 0), invalid_params);
    REQUIRE_THROWS_AS(mode_angle(N, N / 2 + 1), invalid_params);
}

TEST_CASE("driver schedule ramps linearly and clamps to zero") {
    const ChainParams p = make_params(0.5, 10.0, 4.0, 500.0, 64);
    REQUIRE(schedule_g(p, 0.0) == cplx(10.0, 4.0));
    REQUIRE(std::abs(schedule_g(p, 250.0) - cplx(5.0, 2.0)) <= 1e-13);
    REQUIRE(schedule_g(p, 500.0) == cplx(0.0, 0.0));
    REQUIRE(schedule_g(p, 1e9) == cplx(0.0, 0.0));
    REQUIRE_THROWS_AS(schedule_g(p, -1.0), invalid_params);
}

TEST_CASE("canonical parameter point") {
    const ChainParams p = canonical_params();
    REQUIRE(p.J == 0.5);
    REQUIRE(p.g == 10.0);
    REQUIRE(p.delta == 10.0);
    REQUIRE(p.tau == 500.0);
    REQUIRE(p.N == 1024);
    REQUIRE(canonical_params(3.0).delta == 3.0);
}
