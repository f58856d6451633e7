#pragma once

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "nqa/experiments.hpp"

namespace nqa {

// Release gate: each check pins one published property of the model. A
// failing check is a finding about the method, not necessarily a code bug;
// the measured field always carries the observed value.

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string measured;
    std::string bound;
};

namespace detail {

inline std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

inline double wall_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace detail

// Slow-quench limit of the Hermitian chain against the two-level transition
// formula for the softest mode.
inline CriterionResult criterion_1(int workers = 1,
                                   const AdaptiveOptions& opt = dynamics_options()) {
    CriterionResult r{1, "hermitian slow-quench limit", false, "", ""};
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string parts;
    for (double tau : {4000.0, 8000.0, 16000.0}) {
        const ChainParams p = make_params(0.5, 10.0, 0.0, tau, 64);
        const double sim =
            ground_state_probability(p, Engine::diabatic,
                                     Preparation::asymptotic, workers, opt)
                .p_gs;
        const double lz = pgs_landau_zener(p);
        worst = std::max(worst, std::abs(sim - lz));
        parts += detail::fmt(" tau=%g:sim=%.6f,ref=%.6f", tau, sim, lz);
    }
    const double secs = detail::wall_since(t0);
    r.measured = detail::fmt("max_abs_dev=%.3e elapsed=%.1fs%s", worst, secs,
                             parts.c_str());
    r.bound = "abs dev <= 0.03 at each tau, elapsed < 60 s";
    r.pass = worst <= 0.03 && secs < 60.0;
    return r;
}

// Ground-state survival versus decay strength at N = 1024, evaluated with
// the exact per-mode solution (forward integration loses the decaying
// branch over most of this delta range).
inline CriterionResult criterion_2(int workers = 1) {
    CriterionResult r{2, "survival peak versus decay strength", false, "", ""};
    const std::vector<double> grid{0.5, 1.0, 1.5, 2.0,  2.5,  3.0,  3.5,
                                   4.0, 4.5, 5.0, 6.0,  7.0,  8.0,  10.0,
                                   12.0, 14.0, 17.0, 20.0, 24.0, 28.0, 34.0,
                                   40.0, 50.0, 60.0, 80.0, 100.0};
    auto pgs = [&](double delta) {
        const ChainParams p = make_params(0.5, 10.0, delta, 500.0, 1024);
        return ground_state_probability(p, Engine::weber,
                                        Preparation::asymptotic, workers)
            .p_gs;
    };
    const double p0 = pgs(0.0), p10 = pgs(10.0), p100 = pgs(100.0);
    double best = -1.0, best_delta = 0.0;
    for (double d : grid) {
        const double v = pgs(d);
        if (v > best) {
            best = v;
            best_delta = d;
        }
    }
    r.measured = detail::fmt(
        "P(0)=%.3e P(10)=%.6f P(100)=%.3e argmax_delta=%.2f peak=%.6f", p0,
        p10, p100, best_delta, best);
    r.bound = "P(10)>=0.9, P(0)<=0.05, P(100)<P(10), argmax in [3,40]";
    r.pass = p10 >= 0.9 && p0 <= 0.05 && p100 < p10 && best_delta >= 3.0 &&
             best_delta <= 40.0;
    return r;
}

// Kink density of the Hermitian chain against its closed form.
inline CriterionResult criterion_3(int workers = 1,
                                   const AdaptiveOptions& opt = dynamics_options()) {
    CriterionResult r{3, "hermitian kink density", false, "", ""};
    const ChainParams p = canonical_params(0.0);
    const double n = kink_number(ground_state_probability(
                                     p, Engine::diabatic,
                                     Preparation::asymptotic, workers, opt)
                                     .per_mode)
                         .density;
    const double n0 = 0.031831;
    const double rel = std::abs(n - n0) / n0;
    r.measured = detail::fmt("n=%.6e n_ref=%.6e rel_dev=%.4f", n, n0, rel);
    r.bound = "relative deviation <= 0.15";
    r.pass = rel <= 0.15;
    return r;
}

// Simulated kink density against the Lerch-transcendent closed form. The
// delta = 10 leg measures the breakdown of that closed form: the exact
// per-mode solution gives n ~ 1e-4 while the closed form collapses to
// ~8e-13, so the comparison fails by eight orders and is reported as such.
inline CriterionResult criterion_4(int workers = 1,
                                   const AdaptiveOptions& opt = dynamics_options()) {
    CriterionResult r{4, "kink density closed form", false, "", ""};
    std::string parts;
    bool ok = true;
    for (double delta : {0.1, 1.0, 10.0}) {
        const ChainParams p = canonical_params(delta);
        // forward integration is only trustworthy below the branch-loss
        // threshold; above it the exact solution stands in
        const Engine eng = forward_integration_faithful(p.J, p.delta, p.tau)
                               ? Engine::diabatic
                               : Engine::weber;
        const double n =
            kink_number(ground_state_probability(p, eng,
                                                 Preparation::asymptotic,
                                                 workers, opt)
                            .per_mode)
                .density;
        const ClosedKinkDensity c = kink_density_closed(p);
        const double rel = std::abs(n - c.n) / std::abs(c.n);
        ok = ok && rel <= 0.20;
        parts += detail::fmt(" delta=%g:n=%.4e,closed=%.4e,rel=%.2e", delta, n,
                             c.n, rel);
    }
    r.measured = parts.empty() ? "" : parts.substr(1);
    r.bound = "relative deviation <= 0.20 at delta in {0.1, 1, 10}";
    r.pass = ok;
    return r;
}

// Cross-engine agreement on random draws. Wherever the surviving branch
// stays dominant the two integrators agree to solver precision; once the
// accumulated amplification J*delta*tau crosses ~30 the decaying branch is
// lost to rounding at an engine-dependent instant, and the survival curves
// disagree by O(1) inside that handoff window. The draw box includes delta
// up to 2g, so that regime dominates and the bound cannot be met in double
// precision; the report carries the split between the two regimes.
inline CriterionResult criterion_5(int workers = 1,
                                   const AdaptiveOptions& opt = dynamics_options()) {
    CriterionResult r{5, "cross-engine agreement", false, "", ""};
    struct Draw {
        ChainParams p;
        int k;
    };
    std::mt19937 rng(12345u);
    std::uniform_real_distribution<double> ug(2.0, 20.0), u01(0.0, 1.0),
        utau(100.0, 1000.0);
    std::vector<Draw> draws;
    while (draws.size() < 100) {
        const double g = ug(rng);
        const double delta = 2.0 * g * u01(rng);
        const double tau = utau(rng);
        const int N = u01(rng) < 0.5 ? 64 : 256;
        const ChainParams p = make_params(0.5, g, delta, tau, N);
        std::uniform_int_distribution<int> uk(1, N / 2);
        const int k = uk(rng);
        if (std::abs(mode_angle(N, k).phi - p.alpha) <= ep_exclusion_radius())
            continue;  // redraw: mode sits on the exceptional ring
        draws.push_back({p, k});
    }
    const std::vector<double> grid = default_sample_grid(1001);
    struct Outcome {
        double maxdiff;
        bool faithful;
        std::string error;
    };
    std::vector<Outcome> res = parallel_map<Outcome>(
        draws.size(), workers, [&](std::size_t i) -> Outcome {
            const Draw& d = draws[i];
            const bool faithful = forward_integration_faithful(
                d.p.J, d.p.delta, d.p.tau);
            try {
                const Trajectory td =
                    integrate_diabatic(d.p, d.k, grid,
                                       Preparation::asymptotic, opt);
                const Trajectory ta =
                    integrate_adiabatic(d.p, d.k, grid,
                                        Preparation::asymptotic, opt);
                double m = 0.0;
                for (std::size_t j = 0; j < grid.size(); ++j)
                    m = std::max(m, std::abs(td.P[j] - ta.P[j]));
                return {m, faithful, ""};
            } catch (const std::exception& e) {
                return {std::nan(""), faithful, e.what()};
            }
        });
    double global_max = 0.0, faithful_max = 0.0;
    int pass_count = 0, faithful_count = 0, errors = 0;
    for (const Outcome& o : res) {
        if (!o.error.empty()) {
            ++errors;
            continue;
        }
        global_max = std::max(global_max, o.maxdiff);
        if (o.maxdiff <= 1e-6) ++pass_count;
        if (o.faithful) {
            ++faithful_count;
            faithful_max = std::max(faithful_max, o.maxdiff);
        }
    }
    r.measured = detail::fmt(
        "max=%.3e draws_within_bound=%d/100 errors=%d "
        "draws_below_branch_loss_threshold=%d their_max=%.3e",
        global_max, pass_count, errors, faithful_count, faithful_max);
    r.bound = "max_s |P_diabatic - P_adiabatic| <= 1e-6 on all 100 draws";
    r.pass = errors == 0 && pass_count == 100;
    return r;
}

// Exact solution, large-argument asymptotics, and the integrator agree on
// the final survival of representative modes.
inline CriterionResult criterion_6(int workers = 1,
                                   const AdaptiveOptions& opt = dynamics_options()) {
    (void)workers;
    CriterionResult r{6, "closed-form triple check", false, "", ""};
    double worst = 0.0;
    std::string parts;
    for (double delta : {0.0, 10.0}) {
        const ChainParams p = canonical_params(delta);
        for (int k : {1, 8, 64}) {
            const double pw = weber_survival(p, k).p;
            const double pa = pk_asymptotic(p, k).p;
            const std::vector<double> g{0.0, 1.0};
            const double ps =
                integrate_diabatic(p, k, g, Preparation::asymptotic, opt).P[1];
            const double m = std::max({std::abs(pw - pa), std::abs(pw - ps),
                                       std::abs(pa - ps)});
            worst = std::max(worst, m);
            parts += detail::fmt(" d=%g,k=%d:%.1e", delta, k, m);
        }
    }
    r.measured = detail::fmt("max_pairwise=%.3e (%s)", worst,
                             parts.substr(1).c_str());
    r.bound = "pairwise <= 1e-3 on P_k(tau)";
    r.pass = worst <= 1e-3;
    return r;
}

// Spectral identities on random draws plus norm conservation of the
// Hermitian-limit integrator.
inline CriterionResult criterion_7(int workers = 1,
                                   const AdaptiveOptions& opt = dynamics_options()) {
    CriterionResult r{7, "spectrum invariant suite", false, "", ""};
    std::mt19937 rng(777u);
    std::uniform_real_distribution<double> ug(2.0, 20.0), u01(0.0, 1.0);
    double worst_res = 0.0, worst_bi = 0.0, worst_tr = 0.0, worst_sum = 0.0;
    int done = 0;
    while (done < 10000) {
        const double g = ug(rng);
        const double delta = 2.0 * g * u01(rng);
        const double tau = 100.0 + 900.0 * u01(rng);
        const int N = u01(rng) < 0.5 ? 64 : 256;
        const ChainParams p = make_params(0.5, g, delta, tau, N);
        std::uniform_int_distribution<int> uk(1, N / 2);
        const int k = uk(rng);
        if (std::abs(mode_angle(N, k).phi - p.alpha) <= ep_exclusion_radius())
            continue;
        const double s = u01(rng);
        const double t = s * tau;
        const ModeHamiltonian H = hamiltonian(p, k, t);
        const ModeSpectrum m = eigensystem(p, k, t, Branch::pointwise);
        auto resid = [&](cplx e, const std::array<cplx, 2>& u) {
            const cplx r0 = H.e11 * u[0] + H.e12 * u[1] - e * u[0];
            const cplx r1 = H.e21 * u[0] + H.e22 * u[1] - e * u[1];
            return std::sqrt(std::norm(r0) + std::norm(r1));
        };
        worst_res = std::max({worst_res, resid(m.e_plus, m.u_plus),
                              resid(m.e_minus, m.u_minus)});
        auto dot = [](const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
            return a[0] * b[0] + a[1] * b[1];
        };
        worst_bi = std::max(
            {worst_bi, std::abs(dot(m.ut_plus, m.u_plus) - 1.0),
             std::abs(dot(m.ut_minus, m.u_minus) - 1.0),
             std::abs(dot(m.ut_plus, m.u_minus)),
             std::abs(dot(m.ut_minus, m.u_plus))});
        worst_tr = std::max(worst_tr, std::abs(m.e_plus + m.e_minus -
                                               (H.e11 + H.e22)));
        const auto [sup, sub] = resonance_widths(p, k, t);
        worst_sum = std::max(worst_sum,
                             std::abs(sup.width + sub.width -
                                      2.0 * p.J * p.delta * (1.0 - s)));
        ++done;
    }
    // Hermitian norm conservation across a full chain sweep
    const ChainParams ph = make_params(0.5, 10.0, 0.0, 500.0, 64);
    const std::vector<double> grid = default_sample_grid(101);
    std::vector<double> drifts = parallel_map<double>(
        std::size_t(ph.N / 2), workers, [&](std::size_t i) {
            const Trajectory tr = integrate_diabatic(
                ph, int(i) + 1, grid, Preparation::asymptotic, opt);
            double worst = 0.0;
            for (const ModeState& st : tr.states)
                worst = std::max(worst, std::abs(std::norm(st.u) +
                                                 std::norm(st.v) - 1.0));
            return worst;
        });
    double worst_norm = 0.0;
    for (double d : drifts) worst_norm = std::max(worst_norm, d);
    r.measured = detail::fmt(
        "residual=%.2e biorth=%.2e trace=%.2e width_sum=%.2e norm_drift=%.2e",
        worst_res, worst_bi, worst_tr, worst_sum, worst_norm);
    r.bound = "identities <= 1e-12 on 1e4 draws; norm drift <= 1e-8";
    r.pass = worst_res <= 1e-12 && worst_bi <= 1e-12 && worst_tr <= 1e-12 &&
             worst_sum <= 1e-12 && worst_norm <= 1e-8;
    return r;
}

// Short-wavelength shift of the minimal gap at strong decay, and transient
// relaxation near the ring crossing for delta <= g. The criterion keys on
// the spectral gap itself; the survival-dip location is reported alongside
// for reference.
inline CriterionResult criterion_8(int workers = 1) {
    (void)workers;
    CriterionResult r{8, "exceptional-ring phenomenology", false, "", ""};
    const ChainParams p100 = make_params(0.5, 10.0, 100.0, 500.0, 1024);
    int argmin_k = 1;
    double min_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= p100.N / 2; ++k) {
        // gap minimum inside the physical window s in [0,1] (the ray
        // infimum of the closed form can land beyond the quench end)
        double gap = std::numeric_limits<double>::infinity();
        for (int j = 0; j <= 200; ++j) {
            const double t = p100.tau * double(j) / 200.0;
            gap = std::min(gap, std::abs(eigensystem(p100, k, t).eps));
        }
        if (gap < min_gap) {
            min_gap = gap;
            argmin_k = k;
        }
    }
    // reference: where the exact survival dips deepest inside its
    // late-quench window
    int dip_k = 0;
    double dip_p = std::numeric_limits<double>::infinity();
    for (int k = 16; k <= 512; k += 16) {
        double lo = 1.0;
        for (int j = 0; j <= 40; ++j) {
            const double s = 0.96 + 0.04 * double(j) / 40.0;
            try {
                lo = std::min(lo, weber_survival(p100, k, s).p);
            } catch (const std::exception&) {
            }
        }
        if (lo < dip_p) {
            dip_p = lo;
            dip_k = k;
        }
    }
    const ChainParams p10 = canonical_params(10.0);
    const double s_c = exceptional_point(p10).t_c_over_tau;
    bool relaxes = true;
    std::string parts;
    for (int k : {118, 124, 128, 132, 136, 150}) {
        const double at_c = weber_survival(p10, k, s_c).p;
        const double at_end = weber_survival(p10, k).p;
        relaxes = relaxes && at_end > at_c;
        parts += detail::fmt(" k=%d:%.3f->%.5f", k, at_c, at_end);
    }
    r.measured = detail::fmt(
        "gap_argmin_k=%d (min_gap=%.4e J) survival_dip_argmin_k=%d "
        "(P_min=%.2e); relaxation%s",
        argmin_k, min_gap, dip_k, dip_p, parts.c_str());
    r.bound = "gap argmin in [200,280]; P_k(1) > P_k(t_c/tau) near ring";
    r.pass = argmin_k >= 200 && argmin_k <= 280 && relaxes;
    return r;
}

// Special-function spot checks against independent references.
inline CriterionResult criterion_9(int workers = 1) {
    (void)workers;
    CriterionResult r{9, "special-function oracles", false, "", ""};
    const double d0 = std::abs(parabolic_cylinder_D(0.0, cplx(1.0, 0.0)).value.real() -
                               std::exp(-0.25));
    double gmax = 0.0;
    for (double y : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const cplx gv = complex_gamma(cplx(1.0, y));
        const double lhs = std::norm(gv);
        const double rhs = M_PI * y / std::sinh(M_PI * y);
        gmax = std::max(gmax, std::abs(lhs - rhs) / rhs);
    }
    // brute-force partial sum of sum_j x^j / sqrt(1 + j)
    double brute = 0.0, xp = 1.0;
    for (int j = 0; j < 200; ++j) {
        brute += xp / std::sqrt(1.0 + j);
        xp *= 0.3935;
    }
    const double lv = lerch_phi(0.3935, 0.5, 1.0).value;
    const double ldev = std::abs(lv - brute);
    const ChainParams ph = make_params(0.5, 10.0, 0.0, 500.0, 1024);
    const double pdev = std::abs(pgs_first_mode(ph) - pgs_landau_zener(ph));
    r.measured = detail::fmt(
        "D0(1)dev=%.1e gamma_id=%.1e lerch_dev=%.1e (value=%.6f) "
        "first_mode_vs_lz=%.1e",
        d0, gmax, ldev, lv, pdev);
    r.bound = "1e-12; 1e-10; 5e-4; 1e-10";
    r.pass = d0 <= 1e-12 && gmax <= 1e-10 && ldev <= 5e-4 && pdev <= 1e-10;
    return r;
}

// Byte-identical table bodies across worker counts.
inline CriterionResult criterion_10(int workers = 1) {
    (void)workers;
    CriterionResult r{10, "worker-count determinism", false, "", ""};
    ExperimentConfig cfg;
    cfg.command = "sweep-delta";
    cfg.N = 64;
    cfg.n_list = {64};
    cfg.engine = "weber";
    cfg.sweep = {"delta", 0.0, 20.0, 6, false};
    ExperimentConfig kcfg;
    kcfg.command = "kinks";
    kcfg.N = 64;
    kcfg.delta = 0.05;
    kcfg.engine = "diabatic";
    kcfg.sweep = {"tau", 100.0, 300.0, 3, false};
    bool ok = true;
    std::string note;
    for (ExperimentConfig* c : {&cfg, &kcfg}) {
        c->workers = 1;
        const std::string one = csv_body(run_experiment(*c).tables.at(0));
        c->workers = 4;
        const std::string four = csv_body(run_experiment(*c).tables.at(0));
        ok = ok && one == four;
        note += detail::fmt(" %s:%s", c->command.c_str(),
                            one == four ? "identical" : "DIFFERS");
    }
    r.measured = note.substr(1);
    r.bound = "CSV bodies byte-identical for workers 1 vs 4";
    r.pass = ok;
    return r;
}

inline std::vector<CriterionResult> run_validation(
    int workers = 1, const AdaptiveOptions& opt = dynamics_options()) {
    std::vector<CriterionResult> out;
    out.push_back(criterion_1(workers, opt));
    out.push_back(criterion_2(workers));
    out.push_back(criterion_3(workers, opt));
    out.push_back(criterion_4(workers, opt));
    out.push_back(criterion_5(workers, opt));
    out.push_back(criterion_6(workers, opt));
    out.push_back(criterion_7(workers, opt));
    out.push_back(criterion_8(workers));
    out.push_back(criterion_9(workers));
    out.push_back(criterion_10(workers));
    return out;
}

inline std::string report_line(const CriterionResult& c) {
    return detail::fmt("criterion=%d [%s] %s | measured: %s | bound: %s",
                       c.id, c.pass ? "PASS" : "FAIL", c.name.c_str(),
                       c.measured.c_str(), c.bound.c_str());
}

}  // namespace nqa
