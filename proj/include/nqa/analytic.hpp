#pragma once

// Closed-form predictions: the exact single-mode solution in terms of
// parabolic cylinder functions, its long-wavelength asymptotics, the
// ground-state probability estimates, and the closed kink-density formula.
// Everything here is pure and serves as an independent oracle for the ODE
// engines.

#include <cmath>
#include <complex>

#include "core.hpp"
#include "special.hpp"
#include "spectrum.hpp"

namespace nqa {

// Order and argument of the exact mode solution at s = t/tau. Re nu > 0
// for every valid mode; |z(tau)|^2 = 2 tau J cos^2(phi)/|g + i delta|.
struct WeberParams {
    cplx nu;
    cplx z;
};

inline WeberParams weber_parameters_phi(const ChainParams& p, double phi, double s) {
    const cplx g0{p.g, p.delta};
    const double sp = std::sin(phi);
    const cplx nu = p.tau * p.J * sp * sp / (2.0 * g0);
    const cplx scale = std::exp(cplx{0.0, M_PI / 4.0}) *
                       std::sqrt(2.0 * p.tau * p.J / g0);
    const cplx z = scale * (g0 * (1.0 - s) - std::cos(phi));
    return {nu, z};
}

inline WeberParams weber_parameters(const ChainParams& p, int k, double s) {
    return weber_parameters_phi(p, mode_angle(p.N, k).phi, s);
}

// Diabatic amplitudes (u, v) of the decaying exact solution, up to one
// overall constant that cancels in every exported ratio. error_estimate is
// the relative special-function uncertainty of the pair.
struct WeberAmplitudes {
    cplx u;
    cplx v;
    double error_estimate;
};

inline WeberAmplitudes weber_amplitudes_phi(const ChainParams& p, double phi,
                                            double s) {
    const WeberParams wp = weber_parameters_phi(p, phi, s);
    const cplx order = -I * wp.nu;
    const DResult du = parabolic_cylinder_D(order, wp.z);
    const DResult dv = parabolic_cylinder_D(order - 1.0, wp.z);
    const cplx v = -std::sqrt(I * wp.nu) * dv.value;
    return {du.value, v, du.error_estimate + dv.error_estimate};
}

struct SurvivalEstimate {
    double p;
    double uncertainty;  // conservative bound from the D_p error model
};

// Ground-state survival P(s) = |alpha|^2/(|alpha|^2 + |beta|^2) with
// (alpha, beta) the projection of the exact amplitudes onto the
// instantaneous energy-ordered eigenvectors.
inline SurvivalEstimate weber_survival_phi(const ChainParams& p, double phi,
                                           double s) {
    const WeberAmplitudes w = weber_amplitudes_phi(p, phi, s);
    const ModeSpectrum sp = eigensystem_phi(p, phi, s * p.tau, Branch::pointwise);
    if (sp.degenerate)
        throw domain_error(
            "weber_survival: eigenbasis degenerate at an exceptional point");
    const cplx ch = sp.u_plus[0];
    const cplx sh = sp.u_plus[1];
    const cplx alpha = w.u * ch - w.v * sh;
    const cplx beta = w.v * ch + w.u * sh;
    const double a2 = std::norm(alpha);
    const double b2 = std::norm(beta);
    if (a2 + b2 == 0.0)
        throw domain_error("weber_survival: amplitudes vanished");
    return {a2 / (a2 + b2), std::min(1.0, w.error_estimate)};
}

inline SurvivalEstimate weber_survival(const ChainParams& p, int k,
                                       double s = 1.0) {
    return weber_survival_phi(p, mode_angle(p.N, k).phi, s);
}

struct AsymptoticSurvival {
    double p;
    bool warning_band;  // phi in (pi/16, pi/8): validity degrading
};

// Long-wavelength asymptotics of P_k(tau); requires phi_k < pi/8.
inline AsymptoticSurvival pk_asymptotic(const ChainParams& p, int k) {
    const double phi = mode_angle(p.N, k).phi;
    if (!(phi < M_PI / 8.0))
        throw invalid_params(
            "pk_asymptotic: mode angle outside long-wavelength validity");
    const cplx nu = weber_parameters_phi(p, phi, 1.0).nu;
    const double c = std::cos(phi);
    const double re_z2_tau =
        2.0 * p.tau * p.J * c * c * p.delta / (p.g * p.g + p.delta * p.delta);
    const double gamma2 = std::norm(complex_gamma(1.0 + I * nu));
    const double q = gamma2 / (2.0 * M_PI * std::abs(nu)) *
                     std::exp(-M_PI * nu.real() - re_z2_tau);
    return {1.0 / (1.0 + q), phi > M_PI / 16.0};
}

// Inputs shared by the ground-state estimates. At delta = 0: kappa = tau/tau0
// and nu_first = tau/tau0 real; kappa >= kappa0 for alpha in [0, pi/4].
struct ClosedFormInputs {
    double tau0;     // 2 g N^2 / (pi^2 J)
    cplx nu_first;   // cos(alpha) e^{-i alpha} tau/tau0
    double kappa;    // (tau/tau0) cos^2(alpha) + kappa0
    double kappa0;   // (tau J / pi g) sin(2 alpha)
};

inline ClosedFormInputs closed_form_inputs(const ChainParams& p) {
    const double tau0 =
        2.0 * p.g * double(p.N) * double(p.N) / (M_PI * M_PI * p.J);
    const double ca = std::cos(p.alpha);
    const cplx nu_first = ca * std::exp(-I * p.alpha) * (p.tau / tau0);
    const double kappa0 = p.tau * p.J / (M_PI * p.g) * std::sin(2.0 * p.alpha);
    const double kappa = (p.tau / tau0) * ca * ca + kappa0;
    return {tau0, nu_first, kappa, kappa0};
}

// Hermitian one-mode estimate P_gs = 1 - e^{-2 pi tau/tau0}; meaningful for
// delta = 0 but evaluated for any parameters.
inline double pgs_landau_zener(const ChainParams& p) {
    return -std::expm1(-2.0 * M_PI * p.tau / closed_form_inputs(p).tau0);
}

// First-mode estimate P_gs = 1/(1 + (tau |Gamma(i nu)|^2 / (2 pi tau0))
// e^{-pi kappa}). Equals pgs_landau_zener exactly at delta = 0.
inline double pgs_first_mode(const ChainParams& p) {
    const ClosedFormInputs in = closed_form_inputs(p);
    const double gamma2 = std::norm(complex_gamma(I * in.nu_first));
    const double q =
        p.tau * gamma2 / (2.0 * M_PI * in.tau0) * std::exp(-M_PI * in.kappa);
    return 1.0 / (1.0 + q);
}

struct FastQuenchEstimate {
    double p_gs;              // 1 - (tau0/2 pi tau) e^{-pi kappa}
    double condition_margin;  // (tau J/g) sin(2 alpha) - ln(tau0/(2 pi tau))
    bool condition_met;       // margin > 3
    bool invalid;             // correction >= 1; the 1/(1+x) form is required
    bool short_time_warning;  // tau >= tau0/10: expansion premise failing
};

// Fast-quench expansion of pgs_first_mode, intended for tau << tau0.
inline FastQuenchEstimate pgs_fast_quench(const ChainParams& p) {
    const ClosedFormInputs in = closed_form_inputs(p);
    const double ratio = in.tau0 / (2.0 * M_PI * p.tau);
    const double correction = ratio * std::exp(-M_PI * in.kappa);
    const double margin =
        p.tau * p.J / p.g * std::sin(2.0 * p.alpha) - std::log(ratio);
    return {1.0 - correction, margin, margin > 3.0, correction >= 1.0,
            !(p.tau < in.tau0 / 10.0)};
}

struct ClosedKinkDensity {
    double n;
    bool beyond_validity;  // delta > g: outside the stated regime
};

// Closed kink density n = n0 x Phi(1-x, 1/2, 1) with x = e^{-2 delta tau
// J/g^2} and n0 = (1/2 pi) sqrt(g/(J tau)). For x below 1e-4 the Lerch
// factor is evaluated by the expansion around argument 1, where the direct
// series is out of reach (the argument 1-x itself rounds to 1 once
// x < 2^-53).
inline ClosedKinkDensity kink_density_closed(const ChainParams& p) {
    const double n0 = std::sqrt(p.g / (p.J * p.tau)) / (2.0 * M_PI);
    const double xe = std::exp(-2.0 * p.delta * p.tau * p.J / (p.g * p.g));
    const double lerch = xe < 1e-4 ? detail::lerch_half_near_one(xe).value
                                   : lerch_phi(1.0 - xe, 0.5, 1.0).value;
    return {n0 * xe * lerch, p.delta > p.g};
}

}  // namespace nqa
