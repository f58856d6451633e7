#pragma once

// Time evolution of each momentum mode through the quench: a diabatic
// integrator for the raw amplitudes (u, v), an adiabatic-frame integrator
// for (alpha, beta), a common survival-probability readout, excitation
// surfaces, and kink statistics. The global phase stripped from the
// Hamiltonian's trace part is never materialized; every exported quantity
// is a ratio in which it cancels.

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "analytic.hpp"
#include "core.hpp"
#include "ode.hpp"
#include "runner.hpp"
#include "spectrum.hpp"

namespace nqa {

// Diabatic amplitudes of one momentum mode; never both exactly zero. At
// delta = 0 the joint norm is conserved along the evolution.
struct ModeState {
    cplx u;
    cplx v;
};

// Amplitudes in the instantaneous eigenbasis: alpha_amp on the ground
// branch, beta_amp on the excited branch.
struct AdiabaticState {
    cplx alpha_amp;
    cplx beta_amp;
};

struct Trajectory {
    std::vector<double> s;              // strictly increasing, 0 to 1
    std::vector<ModeState> states;      // diabatic amplitudes at the samples
    std::vector<AdiabaticState> frame;  // energy-ordered eigenbasis amplitudes
    std::vector<double> P;              // ground-state survival at the samples
    IntegrationStats stats;
};

// The engine computing P(s): forward integration of (u, v), integration in
// the adiabatic frame, or the closed-form solution.
enum class Engine { diabatic, adiabatic, weber };

// Initial condition of the quench. `asymptotic` matches (u, v) at t=0 to
// the decaying solution an anneal started in the far past relaxes into;
// `instantaneous` takes the exact eigenstate of H(0). They differ by
// O(1/(tau J)) mixing, which decides whether the small-delta kink density
// follows the closed form.
enum class Preparation { asymptotic, instantaneous };

inline std::vector<double> default_sample_grid(int n = 1001) {
    if (n < 2) throw invalid_params("sample grid needs at least 2 points");
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) s[i] = double(i) / double(n - 1);
    s.back() = 1.0;
    return s;
}

// Tolerances are set so the Hermitian-limit norm drift over a full N = 64
// sweep stays below 1e-9 (measured drift scales linearly with rtol).
inline AdaptiveOptions dynamics_options() {
    AdaptiveOptions opt;
    opt.rtol = 1e-12;
    opt.atol = 1e-14;
    opt.renorm_threshold = 1e100;
    return opt;
}

// Modes within this angle of the exceptional ring are refused by the
// adiabatic engine (the frame rotation rate diverges on the ring).
inline double ep_exclusion_radius() {
    return 1e3 * std::cbrt(std::numeric_limits<double>::epsilon());
}

inline double survival_probability(const AdiabaticState& st) {
    const double a2 = std::norm(st.alpha_amp);
    const double b2 = std::norm(st.beta_amp);
    if (a2 + b2 == 0.0)
        throw domain_error("survival_probability: zero-norm state");
    return a2 / (a2 + b2);
}

// Rotation into the instantaneous eigenbasis of the given spectrum. The
// (u, v) component order is the row-reverse of the spectrum matrix, hence
// the ground amplitude is u cos(theta/2) - v sin(theta/2).
inline AdiabaticState frame_transform(const ModeState& st,
                                      const ModeSpectrum& sp) {
    if (sp.degenerate)
        throw domain_error("frame_transform: eigenbasis degenerate");
    const cplx ch = sp.u_plus[0];
    const cplx sh = sp.u_plus[1];
    return {st.u * ch - st.v * sh, st.v * ch + st.u * sh};
}

inline ModeState inverse_frame_transform(const AdiabaticState& st,
                                         const ModeSpectrum& sp) {
    if (sp.degenerate)
        throw domain_error("inverse_frame_transform: eigenbasis degenerate");
    const cplx ch = sp.u_plus[0];
    const cplx sh = sp.u_plus[1];
    return {st.alpha_amp * ch + st.beta_amp * sh,
            st.beta_amp * ch - st.alpha_amp * sh};
}

namespace detail {

inline void check_sample_grid(const std::vector<double>& s) {
    if (s.size() < 2 || s.front() != 0.0 || s.back() != 1.0)
        throw invalid_params("sample grid must run from 0 to 1");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1]))
            throw invalid_params("sample grid must be strictly increasing");
}

// v/u at t=0 on the decaying branch: ratio of the two asymptotic series
// S_{p-1}(z0)/S_p(z0), each truncated at the jointly smallest term (the
// series are asymptotic, not convergent; at most 9 terms enter).
inline cplx asymptotic_initial_ratio(const ChainParams& p, double phi) {
    const cplx g0{p.g, p.delta};
    const double c = std::cos(phi);
    const double sn = std::sin(phi);
    const cplx dgc = g0 - c;
    const cplx inv2z2 = g0 / (4.0 * I * p.tau * p.J * dgc * dgc);
    const cplx nu = p.tau * p.J * sn * sn / (2.0 * g0);
    const cplx order = -I * nu;
    cplx sum_p{1.0, 0.0}, sum_q{1.0, 0.0};  // q = order - 1
    cplx tp{1.0, 0.0}, tq{1.0, 0.0};
    double best = 2.0;
    for (int m = 1; m <= 9; ++m) {
        tp *= -(-order + (2.0 * m - 2.0)) * (-order + (2.0 * m - 1.0)) /
              double(m) * inv2z2;
        tq *= -(-(order - 1.0) + (2.0 * m - 2.0)) *
              (-(order - 1.0) + (2.0 * m - 1.0)) / double(m) * inv2z2;
        const double size = std::abs(tp) + std::abs(tq);
        if (size >= best) break;
        sum_p += tp;
        sum_q += tq;
        best = size;
    }
    return -(sn / (2.0 * dgc)) * sum_q / sum_p;
}

inline ModeState initial_state(const ChainParams& p, double phi,
                               Preparation prep) {
    if (prep == Preparation::instantaneous) {
        const ModeSpectrum sp = eigensystem_phi(p, phi, 0.0, Branch::pointwise);
        return {sp.u_plus[0], -sp.u_plus[1]};  // ground eigenvector
    }
    const cplx ratio = asymptotic_initial_ratio(p, phi);
    const double nrm = std::sqrt(1.0 + std::norm(ratio));
    return {1.0 / nrm, ratio / nrm};
}

struct DiabaticRhs {
    const ChainParams* p;
    double c, sn;
    void operator()(double t, const State<2>& y, State<2>& dy) const {
        const cplx d = gtilde(*p, t) - c;
        dy[0] = I * p->J * (d * y[0] - sn * y[1]);
        dy[1] = -I * p->J * (sn * y[0] + d * y[1]);
    }
};

// Frame equations on the continuity branch: the eigenvalue stays smooth
// across the line where the principal root switches sheets.
struct AdiabaticRhs {
    const ChainParams* p;
    double phi, c, sn;
    void operator()(double t, const State<2>& y, State<2>& dy) const {
        const cplx dgc = gtilde(*p, t) - c;
        const cplx w2 = dgc * dgc + sn * sn;
        const cplx eps =
            p->J * std::sqrt(w2) * continuity_sign(*p, phi, t);
        const cplx half_rate =
            cplx{p->g, p->delta} * sn / (2.0 * p->tau * w2);
        dy[0] = I * eps * y[0] - half_rate * y[1];
        dy[1] = -I * eps * y[1] + half_rate * y[0];
    }
};

template <std::size_t D>
inline void require_finite(const State<D>& y, double s) {
    for (const cplx& c : y)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::runtime_error(
                "integration produced non-finite amplitudes at s = " +
                std::to_string(s));
}

// Integrates the diabatic system over t in [0, s_grid.back()*tau] and
// returns the (possibly jointly rescaled) amplitudes at the samples.
inline std::vector<ModeState> diabatic_states(const ChainParams& p, double phi,
                                              const std::vector<double>& s_grid,
                                              Preparation prep,
                                              const AdaptiveOptions& opt,
                                              IntegrationStats& stats) {
    const ModeState init = initial_state(p, phi, prep);
    State<2> y{init.u, init.v};
    std::vector<double> times(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) times[i] = s_grid[i] * p.tau;
    std::vector<ModeState> out(s_grid.size());
    DiabaticRhs rhs{&p, std::cos(phi), std::sin(phi)};
    integrate_dense<2>(
        rhs, y, 0.0, times.back(), times.data(), times.size(),
        [&](std::size_t i, const State<2>& v) {
            require_finite(v, s_grid[i]);
            out[i] = {v[0], v[1]};
        },
        opt, &stats);
    return out;
}

// Same for the adiabatic frame; returns continuity-branch (alpha, beta).
inline std::vector<AdiabaticState> adiabatic_states(
    const ChainParams& p, double phi, const std::vector<double>& s_grid,
    Preparation prep, const AdaptiveOptions& opt, IntegrationStats& stats) {
    if (std::abs(phi - p.alpha) < ep_exclusion_radius())
        throw domain_error(
            "integrate_adiabatic: mode inside the exceptional-point exclusion "
            "radius; use the diabatic engine");
    AdiabaticState a0{cplx{1.0, 0.0}, cplx{0.0, 0.0}};
    if (prep == Preparation::asymptotic)
        a0 = frame_transform(initial_state(p, phi, prep),
                             eigensystem_phi(p, phi, 0.0, Branch::continuity));
    State<2> y{a0.alpha_amp, a0.beta_amp};
    std::vector<double> times(s_grid.size());
    for (std::size_t i = 0; i < s_grid.size(); ++i) times[i] = s_grid[i] * p.tau;
    std::vector<AdiabaticState> out(s_grid.size());
    AdiabaticRhs rhs{&p, phi, std::cos(phi), std::sin(phi)};
    integrate_dense<2>(
        rhs, y, 0.0, times.back(), times.data(), times.size(),
        [&](std::size_t i, const State<2>& v) {
            require_finite(v, s_grid[i]);
            out[i] = {v[0], v[1]};
        },
        opt, &stats);
    return out;
}

// P(s_end) for one continuous-angle mode under the chosen engine.
inline double survival_at(const ChainParams& p, double phi, double s_end,
                          Engine engine, Preparation prep,
                          const AdaptiveOptions& opt) {
    if (!(phi > 0.0 && phi < M_PI))
        throw invalid_params("mode angle must lie in (0, pi)");
    if (!(s_end > 0.0 && s_end <= 1.0))
        throw invalid_params("evaluation time must lie in (0, 1]");
    if (engine == Engine::weber) return weber_survival_phi(p, phi, s_end).p;
    IntegrationStats stats;
    const std::vector<double> grid{s_end};
    const ModeSpectrum sp =
        eigensystem_phi(p, phi, s_end * p.tau, Branch::pointwise);
    if (engine == Engine::diabatic) {
        const auto states = diabatic_states(p, phi, grid, prep, opt, stats);
        return survival_probability(frame_transform(states.back(), sp));
    }
    const auto amps = adiabatic_states(p, phi, grid, prep, opt, stats);
    const ModeState uv = inverse_frame_transform(
        amps.back(), eigensystem_phi(p, phi, s_end * p.tau, Branch::continuity));
    return survival_probability(frame_transform(uv, sp));
}

}  // namespace detail

// Forward integration of the mode amplitudes with adaptive step control and
// dense output on the sample grid. P is read out against the energy-ordered
// instantaneous eigenbasis at each sample. When the non-Hermitian growth
// overflows the renormalization threshold the stored amplitudes are jointly
// rescaled (stats.log_scale); every probability is unaffected.
inline Trajectory integrate_diabatic(
    const ChainParams& p, int k,
    const std::vector<double>& sample_grid = default_sample_grid(),
    Preparation prep = Preparation::asymptotic,
    const AdaptiveOptions& opt = dynamics_options()) {
    const double phi = mode_angle(p.N, k).phi;
    detail::check_sample_grid(sample_grid);
    Trajectory tr;
    tr.s = sample_grid;
    tr.states = detail::diabatic_states(p, phi, sample_grid, prep, opt, tr.stats);
    tr.frame.reserve(tr.s.size());
    tr.P.reserve(tr.s.size());
    for (std::size_t i = 0; i < tr.s.size(); ++i) {
        const ModeSpectrum sp =
            eigensystem_phi(p, phi, tr.s[i] * p.tau, Branch::pointwise);
        tr.frame.push_back(frame_transform(tr.states[i], sp));
        tr.P.push_back(survival_probability(tr.frame[i]));
    }
    return tr;
}

// Integration of (alpha, beta) on the smooth eigenvalue branch, remapped to
// energy-ordered labels at the samples. Refuses modes inside the
// exceptional-point exclusion radius; the diabatic engine covers those.
inline Trajectory integrate_adiabatic(
    const ChainParams& p, int k,
    const std::vector<double>& sample_grid = default_sample_grid(),
    Preparation prep = Preparation::asymptotic,
    const AdaptiveOptions& opt = dynamics_options()) {
    const double phi = mode_angle(p.N, k).phi;
    detail::check_sample_grid(sample_grid);
    Trajectory tr;
    tr.s = sample_grid;
    const auto amps =
        detail::adiabatic_states(p, phi, sample_grid, prep, opt, tr.stats);
    tr.states.reserve(tr.s.size());
    tr.frame.reserve(tr.s.size());
    tr.P.reserve(tr.s.size());
    for (std::size_t i = 0; i < tr.s.size(); ++i) {
        const double t = tr.s[i] * p.tau;
        const ModeState uv = inverse_frame_transform(
            amps[i], eigensystem_phi(p, phi, t, Branch::continuity));
        tr.states.push_back(uv);
        tr.frame.push_back(
            frame_transform(uv, eigensystem_phi(p, phi, t, Branch::pointwise)));
        tr.P.push_back(survival_probability(tr.frame[i]));
    }
    return tr;
}

struct GroundStateResult {
    double p_gs;                   // product of the per-mode survivals
    std::vector<double> per_mode;  // P_k(tau), k ascending
};

// P_gs = prod_k P_k(tau), accumulated as exp(sum log P_k) in ascending k.
// Mode integrations are independent and may run on any worker count; the
// reduction order is fixed, so the result is bit-identical regardless.
inline GroundStateResult ground_state_probability(
    const ChainParams& p, Engine engine = Engine::diabatic,
    Preparation prep = Preparation::asymptotic, int workers = 1,
    const AdaptiveOptions& opt = dynamics_options()) {
    const std::size_t modes = std::size_t(p.N) / 2;
    std::vector<double> per = parallel_map<double>(
        modes, workers, [&](std::size_t i) {
            const int k = int(i) + 1;
            try {
                return detail::survival_at(p, mode_angle(p.N, k).phi, 1.0,
                                           engine, prep, opt);
            } catch (const std::exception& e) {
                throw std::runtime_error("mode k=" + std::to_string(k) + ": " +
                                         e.what());
            }
        });
    double log_sum = 0.0;
    for (double q : per) log_sum += std::log(q);
    return {std::exp(log_sum), std::move(per)};
}

enum class SurfaceTime { at_tc, at_tau };
enum class SurfaceAxis { alpha_axis, delta_axis };

struct ExcitationSurface {
    SurfaceAxis axis;
    std::vector<double> rows;  // alpha or delta values
    std::vector<double> phi;   // continuous mode angles
    // p_ex[row][col] = 1 - P at the selected time; NaN marks a failed cell.
    std::vector<std::vector<double>> p_ex;
};

// Excitation probability over a (row, phi) grid, evaluated either at the
// exceptional-point time of each row's parameters or at the quench end.
// Failed cells (integrator failure, out-of-domain closed form, no
// exceptional point for the row) are marked NaN and the scan continues.
inline ExcitationSurface excitation_surface(
    const ChainParams& base, SurfaceTime when, SurfaceAxis axis,
    const std::vector<double>& rows, const std::vector<double>& phis,
    Engine engine = Engine::diabatic,
    Preparation prep = Preparation::asymptotic, int workers = 1,
    const AdaptiveOptions& opt = dynamics_options()) {
    if (rows.empty() || phis.empty())
        throw invalid_params("excitation_surface: empty grid");
    for (double v : rows) {
        if (axis == SurfaceAxis::alpha_axis && !(v >= 0.0 && v < M_PI / 2.0))
            throw invalid_params("alpha rows must lie in [0, pi/2)");
        if (axis == SurfaceAxis::delta_axis && !(v >= 0.0))
            throw invalid_params("delta rows must be non-negative");
    }
    for (double f : phis)
        if (!(f > 0.0 && f < M_PI))
            throw invalid_params("phi columns must lie in (0, pi)");

    const std::size_t nr = rows.size(), nc = phis.size();
    std::vector<double> flat = parallel_map<double>(
        nr * nc, workers, [&](std::size_t idx) {
            const double row = rows[idx / nc];
            const double phi = phis[idx % nc];
            try {
                const double delta =
                    axis == SurfaceAxis::alpha_axis ? base.g * std::tan(row)
                                                    : row;
                const ChainParams cell =
                    make_params(base.J, base.g, delta, base.tau, base.N);
                double s_end = 1.0;
                if (when == SurfaceTime::at_tc)
                    s_end = exceptional_point(cell).t_c_over_tau;
                return 1.0 -
                       detail::survival_at(cell, phi, s_end, engine, prep, opt);
            } catch (const std::exception&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        });
    ExcitationSurface surf;
    surf.axis = axis;
    surf.rows = rows;
    surf.phi = phis;
    surf.p_ex.resize(nr);
    for (std::size_t r = 0; r < nr; ++r)
        surf.p_ex[r] = std::vector<double>(flat.begin() + r * nc,
                                           flat.begin() + (r + 1) * nc);
    return surf;
}

struct KinkReport {
    double number;                   // expected kink count of the whole chain
    double density;                  // number / N
    std::vector<double> excitation;  // per-mode 1 - P_k(tau), ascending k
};

// Expected kinks from the per-mode survivals. Each positive-k mode shares
// its excitation with its -k partner, so the pair contributes twice.
inline KinkReport kink_number(const std::vector<double>& p_final) {
    if (p_final.empty()) throw invalid_params("kink_number: empty mode list");
    std::vector<double> excitation;
    excitation.reserve(p_final.size());
    double sum = 0.0;
    for (double q : p_final) {
        if (!(q >= 0.0 && q <= 1.0))
            throw invalid_params("kink_number: probability outside [0, 1]");
        excitation.push_back(1.0 - q);
        sum += 1.0 - q;
    }
    const double n_sites = 2.0 * double(p_final.size());
    return {2.0 * sum, 2.0 * sum / n_sites, std::move(excitation)};
}

struct TdlKinkDensity {
    double n;                 // midpoint rule with M panels
    double n_refined;         // with 2M panels
    double refinement_delta;  // |n - n_refined|, the convergence report
};

// Thermodynamic-limit kink density (1/pi) int_0^pi (1 - P(phi, tau)) dphi by
// the midpoint rule over continuous-angle modes; the M vs 2M difference is
// returned as the quadrature error report.
inline TdlKinkDensity kink_density_tdl(
    const ChainParams& p, int m_samples, Engine engine = Engine::diabatic,
    Preparation prep = Preparation::asymptotic, int workers = 1,
    const AdaptiveOptions& opt = dynamics_options()) {
    if (m_samples < 64)
        throw invalid_params("kink_density_tdl: need at least 64 samples");
    auto density = [&](int m) {
        std::vector<double> vals = parallel_map<double>(
            std::size_t(m), workers, [&](std::size_t j) {
                const double phi = M_PI * (double(j) + 0.5) / double(m);
                return detail::survival_at(p, phi, 1.0, engine, prep, opt);
            });
        double acc = 0.0;
        for (double q : vals) acc += 1.0 - q;
        return acc / double(m);
    };
    const double n1 = density(m_samples);
    const double n2 = density(2 * m_samples);
    return {n1, n2, std::abs(n1 - n2)};
}

}  // namespace nqa
