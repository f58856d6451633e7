#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "nqa/analytic.hpp"
#include "nqa/spectrum.hpp"

using namespace nqa;

namespace {

double eigen_residual(const ModeHamiltonian& h, cplx e,
                      const std::array<cplx, 2>& u) {
    const cplx r0 = h.e11 * u[0] + h.e12 * u[1] - e * u[0];
    const cplx r1 = h.e21 * u[0] + h.e22 * u[1] - e * u[1];
    return std::max(std::abs(r0), std::abs(r1));
}

}  // namespace

TEST_CASE("eigensystem solves the mode Hamiltonian") {
    for (double delta : {0.0, 2.0, 10.0, 100.0}) {
        const ChainParams p = canonical_params(delta);
        for (int k : {1, 8, 100, 512}) {
            for (double s : {0.0, 0.3, 0.7, 0.95, 1.0}) {
                const double t = s * p.tau;
                const ModeHamiltonian h = hamiltonian(p, k, t);
                const ModeSpectrum m = eigensystem(p, k, t);
                const double scale = p.J * (1.0 + std::abs(schedule_g(p, t)));
                REQUIRE(eigen_residual(h, m.e_plus, m.u_plus) <= 1e-12 * scale);
                REQUIRE(eigen_residual(h, m.e_minus, m.u_minus) <= 1e-12 * scale);
                // biorthonormality (plain dot product, no conjugation)
                const cplx np = m.ut_plus[0] * m.u_plus[0] + m.ut_plus[1] * m.u_plus[1];
                const cplx nm = m.ut_minus[0] * m.u_minus[0] + m.ut_minus[1] * m.u_minus[1];
                const cplx x = m.ut_plus[0] * m.u_minus[0] + m.ut_plus[1] * m.u_minus[1];
                REQUIRE(std::abs(np - 1.0) <= 1e-12);
                REQUIRE(std::abs(nm - 1.0) <= 1e-12);
                REQUIRE(std::abs(x) <= 1e-12);
                // trace and determinant identities
                REQUIRE(std::abs(m.e_plus + m.e_minus - (h.e11 + h.e22)) <=
                        1e-12 * scale);
                REQUIRE(std::abs(m.e_plus * m.e_minus -
                                 (h.e11 * h.e22 - h.e12 * h.e21)) <=
                        1e-12 * scale * scale);
            }
        }
    }
}

TEST_CASE("mixing angle reproduces the Hamiltonian parametrization") {
    const ChainParams p = canonical_params(10.0);
    for (int k : {1, 64, 300}) {
        const double phi = mode_angle(p.N, k).phi;
        for (double s : {0.1, 0.5, 0.9}) {
            const ModeSpectrum m = eigensystem(p, k, s * p.tau);
            const cplx w = m.eps / p.J;
            const cplx cth = (schedule_g(p, s * p.tau) - std::cos(phi)) / w;
            const cplx sth = std::sin(phi) / w;
            REQUIRE(std::abs(std::cos(m.theta) - cth) <= 1e-11);
            REQUIRE(std::abs(std::sin(m.theta) - sth) <= 1e-11);
        }
    }
}

TEST_CASE("continuity branch is smooth where the principal root flips") {
    // k = 1 at delta = 10: the principal root switches sheets near s = 0.9
    const ChainParams p = canonical_params(10.0);
    const int k = 1;
    const int n = 2001;
    cplx prev_ct, prev_pt;
    bool flipped = false;
    for (int i = 0; i < n; ++i) {
        const double s = 0.88 + 0.04 * double(i) / double(n - 1);
        const cplx ect = eigensystem(p, k, s * p.tau, Branch::continuity).eps;
        const cplx ept = eigensystem(p, k, s * p.tau, Branch::pointwise).eps;
        // pointwise equals the continuity branch up to an overall sign
        REQUIRE(std::min(std::abs(ept - ect), std::abs(ept + ect)) <= 1e-12);
        if (i > 0) {
            REQUIRE(std::abs(ect - prev_ct) <= 2e-4);  // smooth
            if (std::abs(ept - prev_pt) > 0.5) flipped = true;
        }
        prev_ct = ect;
        prev_pt = ept;
    }
    REQUIRE(flipped);  // the pointwise labels do jump in this window
}

TEST_CASE("exceptional point location") {
    const ExceptionalPoint ep10 = exceptional_point(canonical_params(10.0));
    REQUIRE(ep10.phi_c == canonical_params(10.0).alpha);
    REQUIRE(std::abs(ep10.t_c_over_tau - 0.9292893) <= 1e-6);

    REQUIRE(exceptional_point(canonical_params(100.0)).k_nearest == 240);
    REQUIRE(exceptional_point(canonical_params(5.0)).k_nearest == 76);

    // no crossing inside the quench when |g + i delta| <= 1
    REQUIRE_THROWS_AS(exceptional_point(make_params(0.5, 0.9, 0.1, 500.0, 64)),
                      domain_error);
}

TEST_CASE("adiabaticity closed forms against a grid scan") {
    // Hermitian limit: min gap is exactly J |sin phi|
    const ChainParams p0 = make_params(0.5, 10.0, 0.0, 500.0, 64);
    for (int k : {1, 8, 16}) {
        const double phi = mode_angle(p0.N, k).phi;
        REQUIRE(std::abs(adiabaticity(p0, k).min_gap - p0.J * std::sin(phi)) <=
                1e-12);
    }
    // Hermitian leg: the closed form is the exact ray minimum
    {
        const ChainParams p = canonical_params(0.0);
        double grid_min = 1e300;
        for (int i = 0; i <= 4000; ++i) {
            const double t = p.tau * double(i) / 4000.0;
            grid_min = std::min(grid_min, std::abs(eigensystem(p, 8, t).eps));
        }
        REQUIRE(std::abs(adiabaticity(p, 8).min_gap - grid_min) <=
                1e-3 * grid_min);
    }
    // non-Hermitian leg: the rotated-ray estimate overstates the true
    // product minimum by at most a factor 1/cos(alpha) for modes inside
    // the EP angle
    {
        const ChainParams p = canonical_params(10.0);
        double grid_min = 1e300;
        for (int i = 0; i <= 4000; ++i) {
            const double t = p.tau * double(i) / 4000.0;
            grid_min = std::min(grid_min, std::abs(eigensystem(p, 8, t).eps));
        }
        const double closed = adiabaticity(p, 8).min_gap;
        REQUIRE(closed >= grid_min * (1.0 - 1e-3));
        REQUIRE(closed <= grid_min / std::cos(p.alpha) * (1.0 + 1e-2));
    }
    // eta diverges on the exceptional ring
    const ChainParams p10 = canonical_params(10.0);
    REQUIRE(adiabaticity_phi(p10, p10.alpha).eta ==
            std::numeric_limits<double>::infinity());
}

TEST_CASE("annealing-time scales") {
    const ChainParams p = canonical_params(10.0);
    REQUIRE(std::abs(nqa_time_estimate(p).tau_est - 231.4696767900021) <=
            1e-9);
    REQUIRE(nqa_time_estimate(p).delta_star == p.g);
    REQUIRE_THROWS_AS(nqa_time_estimate(canonical_params(0.0)), domain_error);

    REQUIRE(std::abs(hermitian_time_bound(p) - 1062429.6145894797) <= 1e-6);
    // the bound is tau0/4 for any parameters
    for (double delta : {0.0, 7.0}) {
        const ChainParams q = make_params(0.5, 10.0, delta, 300.0, 64);
        REQUIRE(std::abs(hermitian_time_bound(q) -
                         closed_form_inputs(q).tau0 / 4.0) <=
                1e-12 * hermitian_time_bound(q));
    }
}

TEST_CASE("resonance widths and their sum rule") {
    const ChainParams p = canonical_params(10.0);
    for (int k : {1, 100, 512}) {
        for (double s : {0.0, 0.4, 0.9}) {
            const auto [sup, sub] = resonance_widths(p, k, s * p.tau);
            REQUIRE(sup.width >= sub.width);
            REQUIRE(std::abs(sup.width + sub.width -
                             2.0 * p.J * p.delta * (1.0 - s)) <= 1e-12);
        }
        // after the quench the Hamiltonian is Hermitian: no widths
        const auto [sup, sub] = resonance_widths(p, k, p.tau);
        REQUIRE(sup.width == 0.0);
        REQUIRE(sub.width == 0.0);
    }
}

TEST_CASE("overlap diagnostic") {
    const ChainParams p = make_params(0.5, 10.0, 0.0, 500.0, 64);
    const std::vector<double> r = overlap_diagnostic(p, 0.25 * p.tau);
    REQUIRE(r.size() == std::size_t(p.N / 2 - 1));
    for (double v : r) REQUIRE(v == 0.0);  // Hermitian: zero widths

    const std::vector<double> r10 =
        overlap_diagnostic(canonical_params(10.0), 0.25 * 500.0);
    REQUIRE(r10.size() == 511);
    for (double v : r10) REQUIRE(v >= 0.0);
    // strong decay at mid-quench puts adjacent subradiant resonances in the
    // overlapping regime somewhere along the chain
    REQUIRE(*std::max_element(r10.begin(), r10.end()) >= 1.0);
}
