#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "nqa/ode.hpp"

using namespace nqa;

TEST_CASE("damped phase rotation matches the closed form") {
    const cplx lambda{-0.3, 2.5};
    auto rhs = [&](double, const State<1>& y, State<1>& dy) {
        dy[0] = lambda * y[0];
    };
    IntegrationStats st;
    const State<1> y1 =
        integrate_dense<1>(rhs, State<1>{cplx{1.0, 0.0}}, 0.0, 3.0, nullptr, 0,
                           [](std::size_t, const State<1>&) {}, {}, &st);
    const cplx want = std::exp(3.0 * lambda);
    REQUIRE(std::abs(y1[0] - want) <= 1e-9 * std::abs(want));
    REQUIRE(st.accepted > 0);
    REQUIRE(st.rhs_evals == 1 + 6 * (st.accepted + st.rejected));
    REQUIRE(st.max_local_error > 0.0);
    REQUIRE(st.max_local_error <= 1.0);
    REQUIRE(st.renormalizations == 0);
}

TEST_CASE("dense output samples a harmonic oscillator") {
    auto rhs = [](double, const State<2>& y, State<2>& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    std::vector<double> times;
    for (int i = 0; i <= 20; ++i) times.push_back(0.5 * i);
    std::vector<cplx> u(times.size());
    const State<2> yend = integrate_dense<2>(
        rhs, State<2>{cplx{1.0, 0.0}, cplx{0.0, 0.0}}, 0.0, times.back(),
        times.data(), times.size(),
        [&](std::size_t i, const State<2>& y) { u[i] = y[0]; });
    for (std::size_t i = 0; i < times.size(); ++i)
        REQUIRE(std::abs(u[i] - std::cos(times[i])) <= 1e-8);
    // the first sample is the initial condition, the last one the end state
    REQUIRE(u.front() == cplx(1.0, 0.0));
    REQUIRE(u.back() == yend[0]);
}

TEST_CASE("joint-norm renormalization tracks exponential growth") {
    auto rhs = [](double, const State<1>& y, State<1>& dy) { dy[0] = y[0]; };
    AdaptiveOptions opt;
    opt.renorm_threshold = 1e10;
    IntegrationStats st;
    const State<1> y1 =
        integrate_dense<1>(rhs, State<1>{cplx{1.0, 0.0}}, 0.0, 60.0, nullptr, 0,
                           [](std::size_t, const State<1>&) {}, opt, &st);
    REQUIRE(st.renormalizations >= 2);
    REQUIRE(std::abs(y1[0]) <= 1e10);
    const double recovered = st.log_scale + std::log(std::abs(y1[0]));
    REQUIRE(std::abs(recovered - 60.0) <= 60.0 * 1e-9);
}

TEST_CASE("rejections are counted under a tolerance drop") {
    auto rhs = [](double t, const State<1>& y, State<1>& dy) {
        dy[0] = cplx{0.0, 50.0 * std::cos(10.0 * t)} * y[0];
    };
    AdaptiveOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    IntegrationStats st;
    integrate_dense<1>(rhs, State<1>{cplx{1.0, 0.0}}, 0.0, 5.0, nullptr, 0,
                       [](std::size_t, const State<1>&) {}, opt, &st);
    REQUIRE(st.accepted > 10);
    REQUIRE(st.rhs_evals == 1 + 6 * (st.accepted + st.rejected));
}

TEST_CASE("integration domain and budget errors") {
    auto rhs = [](double, const State<1>& y, State<1>& dy) { dy[0] = y[0]; };
    REQUIRE_THROWS_AS(
        integrate_dense<1>(rhs, State<1>{cplx{1.0, 0.0}}, 1.0, 1.0, nullptr, 0,
                           [](std::size_t, const State<1>&) {}),
        invalid_params);
    AdaptiveOptions opt;
    opt.max_steps = 3;
    REQUIRE_THROWS_AS(
        integrate_dense<1>(rhs, State<1>{cplx{1.0, 0.0}}, 0.0, 50.0, nullptr, 0,
                           [](std::size_t, const State<1>&) {}, opt),
        std::runtime_error);
}
