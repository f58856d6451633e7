#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nqa/analytic.hpp"
#include "nqa/dynamics.hpp"
#include "nqa/spectrum.hpp"
#include "nqa/table.hpp"

namespace nqa {

// Command implementations shared by the command-line tool and the
// validation suite: one resolved config in, a set of tables out.

struct SweepSpec {
    std::string variable;  // resolved per command when empty
    double start = 0.0;
    double stop = 100.0;
    int count = 51;
    bool log_scale = false;
};

struct ExperimentConfig {
    std::string command;
    double J = 0.5;
    double g = 10.0;
    double delta = 10.0;
    double tau = 500.0;
    int N = 1024;
    SweepSpec sweep;
    std::vector<int> n_list{64, 256, 512, 1024};  // sweep-delta emits one table per N
    std::vector<int> modes;                       // empty + modes_all=false is a config error
    bool modes_all = false;
    bool modes_set = false;  // false: command-specific default applies
    std::string engine = "auto";
    std::string preparation = "asymptotic";
    int samples = 1001;
    std::string surface_axis = "alpha";  // alpha | delta
    std::string surface_time = "tc";     // tc | tau
    std::string out_dir = "out";
    int workers = 0;  // 0: available parallelism
    double rtol = 1e-12;
    double atol = 1e-14;
};

inline const std::vector<std::string>& experiment_commands() {
    static const std::vector<std::string> cmds{
        "sweep-delta", "mode-dynamics", "kinks",         "widths",
        "adiabaticity", "excitation-surface", "estimate-time", "validate"};
    return cmds;
}

// Forward integration silently hops off the decaying branch once the
// accumulated amplification exceeds ln(1/eps); J*delta*tau bounds the
// exponent, so below this product the diabatic/adiabatic engines are
// trustworthy and above it only the exact per-mode solution is.
inline bool forward_integration_faithful(double J, double delta, double tau) {
    return J * delta * tau <= 30.0;
}

namespace detail {

inline Engine resolve_engine(const std::string& name, const ChainParams& p) {
    if (name == "diabatic") return Engine::diabatic;
    if (name == "adiabatic") return Engine::adiabatic;
    if (name == "weber") return Engine::weber;
    if (name == "auto")
        return forward_integration_faithful(p.J, p.delta, p.tau) ? Engine::diabatic
                                                                 : Engine::weber;
    throw invalid_params("unknown engine: " + name);
}

inline double engine_code(Engine e) {
    switch (e) {
        case Engine::diabatic: return 0.0;
        case Engine::adiabatic: return 1.0;
        default: return 2.0;
    }
}

inline Preparation resolve_preparation(const std::string& name) {
    if (name == "asymptotic") return Preparation::asymptotic;
    if (name == "instantaneous") return Preparation::instantaneous;
    throw invalid_params("unknown preparation: " + name);
}

inline std::vector<double> sweep_grid(const SweepSpec& s) {
    if (s.count < 2) throw invalid_params("sweep count must be >= 2");
    if (s.log_scale && !(s.start > 0.0))
        throw invalid_params("log sweep needs start > 0");
    if (!(s.stop > s.start)) throw invalid_params("sweep needs stop > start");
    std::vector<double> g(s.count);
    for (int i = 0; i < s.count; ++i) {
        const double f = double(i) / double(s.count - 1);
        g[i] = s.log_scale
                   ? s.start * std::pow(s.stop / s.start, f)
                   : s.start + (s.stop - s.start) * f;
    }
    return g;
}

inline SweepSpec resolved_sweep(const ExperimentConfig& cfg,
                                const std::string& variable) {
    SweepSpec s = cfg.sweep;
    if (s.variable.empty()) {
        s.variable = variable;
        if (variable == "tau") {
            s.start = 100.0;
            s.stop = 1000.0;
            s.count = 10;
            s.log_scale = true;
        }
    } else if (s.variable != variable) {
        throw invalid_params("command sweeps '" + variable + "', config says '" +
                             s.variable + "'");
    }
    return s;
}

// Empty command_default means "all modes". A command default list is
// trimmed to the chain size; an explicit list out of range is an error.
inline std::vector<int> resolved_modes(const ExperimentConfig& cfg,
                                       std::vector<int> command_default) {
    std::vector<int> ks;
    if (cfg.modes_all) {
        // all modes
    } else if (cfg.modes_set) {
        ks = cfg.modes;
        if (ks.empty()) throw invalid_params("mode list is empty");
    } else {
        for (int k : command_default)
            if (k <= cfg.N / 2) ks.push_back(k);
    }
    if (ks.empty() && !cfg.modes_set && !command_default.empty())
        throw invalid_params("no default mode fits N/2");
    if (ks.empty()) {
        ks.resize(std::size_t(cfg.N / 2));
        for (int k = 1; k <= cfg.N / 2; ++k) ks[std::size_t(k - 1)] = k;
    }
    for (int k : ks)
        if (k < 1 || k > cfg.N / 2)
            throw invalid_params("mode index " + std::to_string(k) +
                                 " outside 1..N/2");
    return ks;
}

inline std::string json_int_list(const std::vector<int>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out + "]";
}

}  // namespace detail

inline AdaptiveOptions experiment_options(const ExperimentConfig& cfg) {
    AdaptiveOptions opt = dynamics_options();
    opt.rtol = cfg.rtol;
    opt.atol = cfg.atol;
    return opt;
}

// Full resolved config, fixed key order; embedded verbatim in sidecars.
inline std::string resolved_config_json(const ExperimentConfig& cfg) {
    std::string j = "{";
    j += "\"command\": " + detail::json_quote(cfg.command);
    j += ", \"params\": {\"J\": " + format_cell(cfg.J) +
         ", \"g\": " + format_cell(cfg.g) +
         ", \"delta\": " + format_cell(cfg.delta) +
         ", \"tau\": " + format_cell(cfg.tau) +
         ", \"N\": " + std::to_string(cfg.N) + "}";
    j += ", \"sweep\": {\"variable\": " +
         detail::json_quote(cfg.sweep.variable.empty() ? "default"
                                                       : cfg.sweep.variable) +
         ", \"start\": " + format_cell(cfg.sweep.start) +
         ", \"stop\": " + format_cell(cfg.sweep.stop) +
         ", \"count\": " + std::to_string(cfg.sweep.count) +
         ", \"scale\": " +
         detail::json_quote(cfg.sweep.log_scale ? "log" : "linear") + "}";
    j += ", \"n_list\": " + detail::json_int_list(cfg.n_list);
    j += ", \"modes\": ";
    if (!cfg.modes_set)
        j += "\"default\"";
    else if (cfg.modes_all)
        j += "\"all\"";
    else
        j += detail::json_int_list(cfg.modes);
    j += ", \"engine\": " + detail::json_quote(cfg.engine);
    j += ", \"preparation\": " + detail::json_quote(cfg.preparation);
    j += ", \"samples\": " + std::to_string(cfg.samples);
    j += ", \"surface_axis\": " + detail::json_quote(cfg.surface_axis);
    j += ", \"surface_time\": " + detail::json_quote(cfg.surface_time);
    j += ", \"out\": " + detail::json_quote(cfg.out_dir);
    j += ", \"workers\": " + std::to_string(cfg.workers);
    j += ", \"tolerances\": {\"rtol\": " + format_cell(cfg.rtol) +
         ", \"atol\": " + format_cell(cfg.atol) + "}";
    return j + "}";
}

struct ExperimentOutput {
    std::vector<ResultTable> tables;
    IntegrationStats stats;
};

namespace detail {

inline void gs_row(const ExperimentConfig& cfg, const ChainParams& p,
                   double x, ResultTable& t, const Preparation prep,
                   const AdaptiveOptions& opt) {
    if (cfg.engine == "both") {
        std::vector<double> v{x, std::nan(""), std::nan("")};
        std::string err;
        try {
            v[1] = ground_state_probability(p, Engine::diabatic, prep,
                                            cfg.workers, opt).p_gs;
            v[2] = ground_state_probability(p, Engine::adiabatic, prep,
                                            cfg.workers, opt).p_gs;
        } catch (const std::exception& e) {
            err = e.what();
        }
        t.push(std::move(v), std::move(err));
        return;
    }
    const Engine eng = resolve_engine(cfg.engine, p);
    std::vector<double> v{x, std::nan(""), engine_code(eng)};
    std::string err;
    try {
        v[1] = ground_state_probability(p, eng, prep, cfg.workers, opt).p_gs;
    } catch (const std::exception& e) {
        err = e.what();
    }
    t.push(std::move(v), std::move(err));
}

inline ExperimentOutput run_sweep_delta(const ExperimentConfig& cfg) {
    const SweepSpec sw = resolved_sweep(cfg, "delta");
    const std::vector<double> deltas = sweep_grid(sw);
    const Preparation prep = resolve_preparation(cfg.preparation);
    const AdaptiveOptions opt = experiment_options(cfg);
    ExperimentOutput out;
    for (int n : cfg.n_list) {
        ResultTable t;
        t.name = "sweep_delta_N" + std::to_string(n);
        if (cfg.engine == "both")
            t.columns = {{"delta", ""}, {"P_gs_diabatic", ""}, {"P_gs_adiabatic", ""}};
        else
            t.columns = {{"delta", ""}, {"P_gs", ""}, {"engine_code", ""}};
        for (double d : deltas) {
            try {
                const ChainParams p = make_params(cfg.J, cfg.g, d, cfg.tau, n);
                gs_row(cfg, p, d, t, prep, opt);
            } catch (const std::exception& e) {
                t.push({d, std::nan(""), std::nan("")}, e.what());
            }
        }
        out.tables.push_back(std::move(t));
    }
    return out;
}

inline ExperimentOutput run_kinks(const ExperimentConfig& cfg) {
    const SweepSpec sw = resolved_sweep(cfg, "tau");
    const std::vector<double> taus = sweep_grid(sw);
    const Preparation prep = resolve_preparation(cfg.preparation);
    const AdaptiveOptions opt = experiment_options(cfg);
    ExperimentOutput out;
    ResultTable t;
    t.name = "kinks";
    const bool both = cfg.engine == "both";
    if (both)
        t.columns = {{"tau", "1/J"}, {"n_diabatic", ""}, {"n_adiabatic", ""},
                     {"n_closed_form", ""}, {"closed_form_valid", ""}};
    else
        t.columns = {{"tau", "1/J"}, {"n", ""}, {"n_closed_form", ""},
                     {"closed_form_valid", ""}, {"engine_code", ""}};
    for (double tau : taus) {
        std::vector<double> v(t.columns.size(), std::nan(""));
        v[0] = tau;
        std::string err;
        try {
            const ChainParams p = make_params(cfg.J, cfg.g, cfg.delta, tau, cfg.N);
            const ClosedKinkDensity closed = kink_density_closed(p);
            if (both) {
                v[1] = kink_number(ground_state_probability(p, Engine::diabatic,
                                                            prep, cfg.workers, opt)
                                       .per_mode)
                           .density;
                v[2] = kink_number(ground_state_probability(p, Engine::adiabatic,
                                                            prep, cfg.workers, opt)
                                       .per_mode)
                           .density;
                v[3] = closed.n;
                v[4] = closed.beyond_validity ? 0.0 : 1.0;
            } else {
                const Engine eng = resolve_engine(cfg.engine, p);
                v[1] = kink_number(ground_state_probability(p, eng, prep,
                                                            cfg.workers, opt)
                                       .per_mode)
                           .density;
                v[2] = closed.n;
                v[3] = closed.beyond_validity ? 0.0 : 1.0;
                v[4] = engine_code(eng);
            }
        } catch (const std::exception& e) {
            err = e.what();
        }
        t.push(std::move(v), std::move(err));
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline ExperimentOutput run_mode_dynamics(const ExperimentConfig& cfg) {
    const std::vector<int> ks = resolved_modes(cfg, {1, 8, 16, 32, 48, 64});
    const Preparation prep = resolve_preparation(cfg.preparation);
    const AdaptiveOptions opt = experiment_options(cfg);
    const ChainParams p = make_params(cfg.J, cfg.g, cfg.delta, cfg.tau, cfg.N);
    const std::vector<double> grid = default_sample_grid(cfg.samples);
    ExperimentOutput out;
    for (int k : ks) {
        ResultTable t;
        t.name = "mode_dynamics_k" + std::to_string(k);
        const bool both = cfg.engine == "both";
        if (both)
            t.columns = {{"s", ""}, {"P_diabatic", ""}, {"P_adiabatic", ""}};
        else
            t.columns = {{"s", ""}, {"P", ""}, {"engine_code", ""}};
        try {
            if (both) {
                const Trajectory td = integrate_diabatic(p, k, grid, prep, opt);
                const Trajectory ta = integrate_adiabatic(p, k, grid, prep, opt);
                out.stats.accepted += td.stats.accepted + ta.stats.accepted;
                out.stats.rejected += td.stats.rejected + ta.stats.rejected;
                out.stats.rhs_evals += td.stats.rhs_evals + ta.stats.rhs_evals;
                out.stats.renormalizations +=
                    td.stats.renormalizations + ta.stats.renormalizations;
                for (std::size_t i = 0; i < grid.size(); ++i)
                    t.push({grid[i], td.P[i], ta.P[i]});
            } else {
                const Engine eng = resolve_engine(cfg.engine, p);
                if (eng == Engine::weber) {
                    for (double s : grid) {
                        try {
                            t.push({s, weber_survival(p, k, s).p,
                                    engine_code(eng)});
                        } catch (const std::exception& e) {
                            t.push({s, std::nan(""), engine_code(eng)}, e.what());
                        }
                    }
                } else {
                    const Trajectory tr =
                        eng == Engine::diabatic
                            ? integrate_diabatic(p, k, grid, prep, opt)
                            : integrate_adiabatic(p, k, grid, prep, opt);
                    out.stats.accepted += tr.stats.accepted;
                    out.stats.rejected += tr.stats.rejected;
                    out.stats.rhs_evals += tr.stats.rhs_evals;
                    out.stats.renormalizations += tr.stats.renormalizations;
                    for (std::size_t i = 0; i < grid.size(); ++i)
                        t.push({grid[i], tr.P[i], engine_code(eng)});
                }
            }
        } catch (const std::exception& e) {
            // engine refused the whole mode (EP exclusion): one error row
            t.push(std::vector<double>(t.columns.size(), std::nan("")), e.what());
        }
        out.tables.push_back(std::move(t));
    }
    return out;
}

inline ExperimentOutput run_widths(const ExperimentConfig& cfg) {
    const ChainParams p = make_params(cfg.J, cfg.g, cfg.delta, cfg.tau, cfg.N);
    const std::vector<int> ks = resolved_modes(cfg, {});
    const std::vector<double> grid = default_sample_grid(101);
    ExperimentOutput out;
    ResultTable t;
    t.name = "widths";
    t.columns = {{"k", ""},
                 {"phi", "rad"},
                 {"s", ""},
                 {"E_superradiant", "J"},
                 {"width_superradiant", "J"},
                 {"E_subradiant", "J"},
                 {"width_subradiant", "J"},
                 {"sum_rule_residual", "J"}};
    for (int k : ks) {
        const double phi = mode_angle(p.N, k).phi;
        for (double s : grid) {
            const auto [sup, sub] = resonance_widths(p, k, s * p.tau);
            const double residual =
                std::abs(sup.width + sub.width - 2.0 * p.J * p.delta * (1.0 - s));
            t.push({double(k), phi, s, sup.E, sup.width, sub.E, sub.width,
                    residual});
        }
    }
    out.tables.push_back(std::move(t));
    return out;
}

inline ExperimentOutput run_adiabaticity(const ExperimentConfig& cfg) {
    ExperimentOutput out;
    {
        const std::vector<int> ks = resolved_modes(cfg, {});
        const ChainParams p = make_params(cfg.J, cfg.g, cfg.delta, cfg.tau, cfg.N);
        ResultTable t;
        t.name = "adiabaticity_modes";
        t.columns = {{"k", ""}, {"phi", "rad"}, {"eta", ""},
                     {"max_theta_rate", "J"}, {"min_gap", "J"}};
        for (int k : ks) {
            const AdiabaticityReport r = adiabaticity(p, k);
            t.push({double(k), mode_angle(p.N, k).phi, r.eta, r.max_theta_rate,
                    r.min_gap});
        }
        out.tables.push_back(std::move(t));
    }
    {
        const SweepSpec sw = resolved_sweep(cfg, "delta");
        ResultTable t;
        t.name = "adiabaticity_delta";
        t.columns = {{"delta", ""}, {"eta_first_mode", ""}, {"tau_required", "1/J"}};
        for (double d : sweep_grid(sw)) {
            std::vector<double> v{d, std::nan(""), std::nan("")};
            std::string err;
            try {
                const ChainParams p = make_params(cfg.J, cfg.g, d, cfg.tau, cfg.N);
                v[1] = adiabaticity(p, 1).eta;
                v[2] = d > 0.0 ? nqa_time_estimate(p).tau_est
                               : hermitian_time_bound(p);
            } catch (const std::exception& e) {
                err = e.what();
            }
            t.push(std::move(v), std::move(err));
        }
        out.tables.push_back(std::move(t));
    }
    return out;
}

inline ExperimentOutput run_excitation_surface(const ExperimentConfig& cfg) {
    SurfaceAxis axis;
    if (cfg.surface_axis == "alpha")
        axis = SurfaceAxis::alpha_axis;
    else if (cfg.surface_axis == "delta")
        axis = SurfaceAxis::delta_axis;
    else
        throw invalid_params("surface_axis must be alpha or delta");
    SurfaceTime when;
    if (cfg.surface_time == "tc")
        when = SurfaceTime::at_tc;
    else if (cfg.surface_time == "tau")
        when = SurfaceTime::at_tau;
    else
        throw invalid_params("surface_time must be tc or tau");

    const ChainParams base = make_params(cfg.J, cfg.g, cfg.delta, cfg.tau, cfg.N);
    const Preparation prep = resolve_preparation(cfg.preparation);
    const AdaptiveOptions opt = experiment_options(cfg);

    std::vector<double> rows(25);
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = axis == SurfaceAxis::alpha_axis
                      ? 0.02 + (1.45 - 0.02) * double(i) / double(rows.size() - 1)
                      : 0.5 + (100.0 - 0.5) * double(i) / double(rows.size() - 1);
    std::vector<double> phis(64);
    for (std::size_t j = 0; j < phis.size(); ++j)
        phis[j] = M_PI * (double(j) + 0.5) / double(phis.size());

    const std::size_t nc = phis.size();
    std::vector<double> flat = parallel_map<double>(
        rows.size() * nc, cfg.workers, [&](std::size_t idx) {
            const double row = rows[idx / nc];
            const double phi = phis[idx % nc];
            try {
                const double d =
                    axis == SurfaceAxis::alpha_axis ? base.g * std::tan(row) : row;
                const ChainParams cell =
                    make_params(base.J, base.g, d, base.tau, base.N);
                double s_end = 1.0;
                if (when == SurfaceTime::at_tc)
                    s_end = exceptional_point(cell).t_c_over_tau;
                const Engine eng = cfg.engine == "both"
                                       ? Engine::diabatic
                                       : resolve_engine(cfg.engine, cell);
                return 1.0 - detail::survival_at(cell, phi, s_end, eng, prep, opt);
            } catch (const std::exception&) {
                return std::numeric_limits<double>::quiet_NaN();
            }
        });

    ExperimentOutput out;
    ResultTable t;
    t.name = "excitation_surface_" + cfg.surface_axis + "_" + cfg.surface_time;
    t.columns = {{cfg.surface_axis == "alpha" ? "alpha" : "delta",
                  cfg.surface_axis == "alpha" ? "rad" : ""},
                 {"phi", "rad"},
                 {"p_excited", ""}};
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < nc; ++c) {
            const double val = flat[r * nc + c];
            t.push({rows[r], phis[c], val},
                   std::isnan(val) ? "cell computation failed" : "");
        }
    out.tables.push_back(std::move(t));
    return out;
}

inline ExperimentOutput run_estimate_time(const ExperimentConfig& cfg) {
    const ChainParams p = make_params(cfg.J, cfg.g, cfg.delta, cfg.tau, cfg.N);
    ExperimentOutput out;
    ResultTable t;
    t.name = "estimate_time";
    t.columns = {{"tau_est", "1/J"},     {"delta_star", ""},
                 {"tau0", "1/J"},        {"kappa", ""},
                 {"kappa0", ""},         {"tau_hermitian_bound", "1/J"}};
    std::vector<double> v(t.columns.size(), std::nan(""));
    std::string err;
    try {
        const ClosedFormInputs c = closed_form_inputs(p);
        v[2] = c.tau0;
        v[3] = c.kappa;
        v[4] = c.kappa0;
        v[5] = hermitian_time_bound(p);
        if (p.delta > 0.0) {
            const TimeEstimate e = nqa_time_estimate(p);
            v[0] = e.tau_est;
            v[1] = e.delta_star;
        } else {
            err = "tau_est undefined at delta = 0 (Hermitian bound applies)";
        }
    } catch (const std::exception& e) {
        err = e.what();
    }
    t.push(std::move(v), std::move(err));
    out.tables.push_back(std::move(t));
    return out;
}

}  // namespace detail

// Runs one table-producing command. The validate command is a separate
// entry point (it emits a report, not tables).
inline ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    if (cfg.command == "sweep-delta") return detail::run_sweep_delta(cfg);
    if (cfg.command == "mode-dynamics") return detail::run_mode_dynamics(cfg);
    if (cfg.command == "kinks") return detail::run_kinks(cfg);
    if (cfg.command == "widths") return detail::run_widths(cfg);
    if (cfg.command == "adiabaticity") return detail::run_adiabaticity(cfg);
    if (cfg.command == "excitation-surface")
        return detail::run_excitation_surface(cfg);
    if (cfg.command == "estimate-time") return detail::run_estimate_time(cfg);
    throw invalid_params("unknown command: " + cfg.command);
}

}  // namespace nqa
