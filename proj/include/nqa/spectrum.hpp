#pragma once

// Instantaneous eigenstructure of the per-mode 2x2 Hamiltonian: complex
// eigenvalues, biorthonormal eigenvector pairs, the complex mixing angle,
// exceptional-point location, adiabaticity diagnostics, and resonance widths.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "core.hpp"

namespace nqa {

// Which square-root branch of eps_k labels the eigenvalue pair.
//   continuity: follows the t=0 labels (ordered by real part) continuously
//               along the quench; this is the default everywhere.
//   pointwise:  principal root with Re >= 0 at each instant, i.e. labels
//               ordered by real part of the energy at that instant.
enum class Branch { continuity, pointwise };

struct ModeHamiltonian {
    cplx e11, e12, e21, e22;
};

struct ModeSpectrum {
    cplx eps0;    // common complex shift eps_0k(t)
    cplx eps;     // gap half-width eps_k(t) on the selected branch
    cplx e_plus;  // -eps0 + eps
    cplx e_minus; // -eps0 - eps
    cplx theta;   // complex mixing angle
    std::array<cplx, 2> u_plus, u_minus;   // right eigenvectors
    std::array<cplx, 2> ut_plus, ut_minus; // left eigenvectors (no conjugation)
    bool degenerate; // |eps| < 1e-10 J: eigenvectors coalesce at/near an EP
};

struct ExceptionalPoint {
    double phi_c;        // critical angle, = alpha
    double t_c_over_tau; // dimensionless crossing time
    int k_nearest;       // nearest integer mode index, clamped to 1..N/2
};

struct Resonance {
    double E;     // real energy
    double width; // half-width, -Im of the eigenvalue
};

struct AdiabaticityReport {
    double eta;            // adiabaticity parameter, >= 0 or +inf at phi = alpha
    double max_theta_rate; // max_t |dtheta/dt| along the quench
    double min_gap;        // min_t |eps_k| along the quench
};

struct TimeEstimate {
    double tau_est;    // annealing-time estimate
    double delta_star; // decay rate minimizing tau_est at fixed g
};

namespace detail {

inline double quench_ramp(const ChainParams& p, double t) {
    return t >= p.tau ? 0.0 : 1.0 - t / p.tau;
}

inline cplx gtilde(const ChainParams& p, double t) {
    return schedule_g(p, t);
}

// Continuity of eps_k relative to the principal (Re >= 0) root, in closed
// form: Im w^2 = 2*delta*r*(g*r - cos phi) changes sign once, at
// r = cos(phi)/g, and the principal root flips there exactly when the
// crossing happens on the negative real axis, i.e. tan(phi) < delta/g.
inline double continuity_sign(const ChainParams& p, double phi, double t) {
    const double r = quench_ramp(p, t);
    const double c = std::cos(phi);
    return (phi < p.alpha && p.g * r < c && c < p.g) ? -1.0 : 1.0;
}

} // namespace detail

inline ModeHamiltonian hamiltonian_phi(const ChainParams& p, double phi, double t) {
    if (t < 0.0) throw invalid_params("time t must be non-negative");
    const cplx gt = detail::gtilde(p, t);
    const double c = std::cos(phi), s = std::sin(phi);
    const cplx eps0 = p.J * c + I * p.J * p.delta * detail::quench_ramp(p, t);
    return {-eps0 + p.J * (gt - c), p.J * s,
            p.J * s, -eps0 - p.J * (gt - c)};
}

inline ModeHamiltonian hamiltonian(const ChainParams& p, int k, double t) {
    return hamiltonian_phi(p, mode_angle(p.N, k).phi, t);
}

inline ModeSpectrum eigensystem_phi(const ChainParams& p, double phi, double t,
                                    Branch branch = Branch::continuity) {
    if (t < 0.0) throw invalid_params("time t must be non-negative");
    const cplx gt = detail::gtilde(p, t);
    const double c = std::cos(phi), s = std::sin(phi);

    cplx w = std::sqrt(gt * gt - 2.0 * gt * c + 1.0); // principal, Re >= 0
    if (branch == Branch::continuity) w *= detail::continuity_sign(p, phi, t);

    ModeSpectrum m;
    m.eps0 = p.J * c + I * p.J * p.delta * detail::quench_ramp(p, t);
    m.eps = p.J * w;
    m.e_plus = -m.eps0 + m.eps;
    m.e_minus = -m.eps0 - m.eps;
    m.degenerate = std::abs(m.eps) < 1e-10 * p.J;

    const cplx cth = (gt - c) / w;
    const cplx sth = s / w;
    // Half angles by the conjugate-pair construction: anchor the larger of
    // cos^2, sin^2 on the principal square root, derive the other from
    // sin(theta) = 2 ch sh. Keeps ch^2 + sh^2 = 1 exact and avoids the
    // cancellation at theta near pi (or near 0).
    const cplx c2 = 0.5 * (1.0 + cth), s2 = 0.5 * (1.0 - cth);
    cplx ch, sh;
    if (std::abs(c2) >= std::abs(s2)) {
        ch = std::sqrt(c2);
        sh = sth / (2.0 * ch);
    } else {
        sh = std::sqrt(s2);
        ch = sth / (2.0 * sh);
    }
    m.theta = -2.0 * I * std::log(ch + I * sh);
    m.u_plus = {ch, sh};
    m.u_minus = {-sh, ch};
    m.ut_plus = m.u_plus;
    m.ut_minus = m.u_minus;
    return m;
}

inline ModeSpectrum eigensystem(const ChainParams& p, int k, double t,
                                Branch branch = Branch::continuity) {
    return eigensystem_phi(p, mode_angle(p.N, k).phi, t, branch);
}

inline ExceptionalPoint exceptional_point(const ChainParams& p) {
    const double h2 = p.g * p.g + p.delta * p.delta;
    if (h2 <= 1.0)
        throw domain_error("exceptional_point: no EP within quench (g^2 + delta^2 <= 1)");
    ExceptionalPoint ep;
    ep.phi_c = p.alpha;
    ep.t_c_over_tau = 1.0 - 1.0 / std::sqrt(h2);
    // round half away from zero, clamp into 1..N/2
    long k = std::lround(p.N * ep.phi_c / (2.0 * M_PI) + 0.5);
    if (k < 1) k = 1;
    if (k > p.N / 2) k = p.N / 2;
    ep.k_nearest = static_cast<int>(k);
    return ep;
}

inline AdiabaticityReport adiabaticity_phi(const ChainParams& p, double phi) {
    // Closed forms at the gap minimum along the quench ray:
    //   min |w|^2 = |sin(alpha-phi) sin(alpha+phi)| / cos^2(alpha)
    //   max |dtheta/dt| = |g0| |sin phi| / (tau min|w|^2)
    const double ca = std::cos(p.alpha);
    const double sxy = std::abs(std::sin(p.alpha - phi) * std::sin(p.alpha + phi));
    AdiabaticityReport r;
    r.min_gap = p.J * std::sqrt(sxy) / ca;
    r.max_theta_rate =
        std::hypot(p.g, p.delta) * std::abs(std::sin(phi)) * ca * ca / (p.tau * sxy);
    r.eta = r.max_theta_rate / (2.0 * r.min_gap);
    return r;
}

inline AdiabaticityReport adiabaticity(const ChainParams& p, int k) {
    return adiabaticity_phi(p, mode_angle(p.N, k).phi);
}

inline double hermitian_time_bound(const ChainParams& p) {
    return p.g * double(p.N) * double(p.N) / (2.0 * p.J * M_PI * M_PI);
}

inline TimeEstimate nqa_time_estimate(const ChainParams& p) {
    if (p.delta == 0.0)
        throw domain_error("nqa_time_estimate: estimate undefined at delta = 0; "
                           "use hermitian_time_bound");
    TimeEstimate e;
    e.tau_est = (p.g * p.g + p.delta * p.delta) * std::log(p.N / M_PI) / (p.delta * p.J);
    e.delta_star = p.g;
    return e;
}

// Eigenvalue pair as resonances, superradiant (wider) first.
inline std::pair<Resonance, Resonance> resonance_widths(const ChainParams& p, int k,
                                                        double t) {
    const ModeSpectrum m = eigensystem(p, k, t);
    Resonance a{m.e_plus.real(), -m.e_plus.imag()};
    Resonance b{m.e_minus.real(), -m.e_minus.imag()};
    if (b.width > a.width) std::swap(a, b);
    return {a, b};
}

// Overlap ratio (half-width sum over twice the level spacing) between the
// subradiant resonances of each adjacent mode pair (k, k+1). A ratio >= 1
// flags the overlapping (superradiance) regime.
inline std::vector<double> overlap_diagnostic(const ChainParams& p, double t) {
    std::vector<double> out;
    out.reserve(p.N / 2 - 1);
    Resonance prev = resonance_widths(p, 1, t).second;
    for (int k = 2; k <= p.N / 2; ++k) {
        const Resonance cur = resonance_widths(p, k, t).second;
        const double spacing = std::abs(prev.E - cur.E);
        out.push_back(spacing < 1e-14
                          ? std::numeric_limits<double>::infinity()
                          : (prev.width + cur.width) / (2.0 * spacing));
        prev = cur;
    }
    return out;
}

} // namespace nqa
