#pragma once

// Model parameters, quench schedule, and the momentum grid of the
// transverse-field Ising chain mapped to independent two-level modes.
//
// Conventions (hbar = 1): the chain has N spins, N divisible by 4, and the
// dynamics factorizes over N/2 positive momenta phi_k = pi(2k-1)/N. The
// driver amplitude is ramped linearly, g~(t) = (g + i*delta)(1 - t/tau) for
// t in [0, tau] and exactly zero afterwards. delta >= 0 is the decay
// parameter; alpha = arctan(delta/g) is the constant phase of the ramp.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace nqa {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};

// Thrown when constructing values from out-of-domain raw numbers.
struct invalid_params : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an operation is asked to evaluate outside its stated domain.
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct ChainParams {
    double J;      // Ising coupling, > 0
    double g;      // driver amplitude at t=0, > 0
    double delta;  // decay parameter, >= 0
    double tau;    // quench duration, > 0
    int N;         // number of spins, divisible by 4
    double alpha;  // arctan(delta/g), in [0, pi/2)
};

struct Mode {
    int k;       // 1 .. N/2
    double phi;  // pi(2k-1)/N, in (0, pi)
};

inline ChainParams make_params(double J, double g, double delta, double tau, int N) {
    if (!(J > 0.0)) throw invalid_params("J must be positive");
    if (!(g > 0.0)) throw invalid_params("g must be positive");
    if (!(delta >= 0.0)) throw invalid_params("delta must be non-negative");
    if (!(tau > 0.0)) throw invalid_params("tau must be positive");
    if (N < 4) throw invalid_params("N must be at least 4");
    if (N % 4 != 0) throw invalid_params("N must be divisible by 4");
    return ChainParams{J, g, delta, tau, N, std::atan2(delta, g)};
}

// Canonical parameter point shared by all the reproduced figures.
inline ChainParams canonical_params(double delta = 10.0) {
    return make_params(0.5, 10.0, delta, 500.0, 1024);
}

inline Mode mode_angle(int N, int k) {
    if (k < 1 || k > N / 2)
        throw invalid_params("mode index k must lie in 1..N/2");
    return Mode{k, M_PI * (2.0 * k - 1.0) / N};
}

// g~(t): clamped to exactly zero for t >= tau so the final Hamiltonian is
// the classical Ising chain with no residual driver.
inline cplx schedule_g(const ChainParams& p, double t) {
    if (t < 0.0) throw invalid_params("time t must be non-negative");
    if (t >= p.tau) return cplx{0.0, 0.0};
    const double ramp = 1.0 - t / p.tau;
    return cplx{p.g * ramp, p.delta * ramp};
}

}  // namespace nqa
