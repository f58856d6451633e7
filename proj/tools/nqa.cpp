#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nqa/experiments.hpp"
#include "nqa/validate.hpp"

namespace {

using njson = nlohmann::json;
using nqa::invalid_params;

std::string timestamp_utc() {
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm g{};
    gmtime_r(&t, &g);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &g);
    return buf;
}

double want_number(const njson& j, const std::string& path) {
    if (!j.is_number()) throw invalid_params(path + " must be a number");
    return j.get<double>();
}

int want_int(const njson& j, const std::string& path) {
    const double v = want_number(j, path);
    const int i = static_cast<int>(v);
    if (double(i) != v) throw invalid_params(path + " must be an integer");
    return i;
}

std::string want_string(const njson& j, const std::string& path) {
    if (!j.is_string()) throw invalid_params(path + " must be a string");
    return j.get<std::string>();
}

std::vector<int> want_int_list(const njson& j, const std::string& path) {
    if (!j.is_array()) throw invalid_params(path + " must be a list");
    std::vector<int> out;
    for (const auto& e : j) out.push_back(want_int(e, path + " entry"));
    return out;
}

void decode_params(const njson& j, nqa::ExperimentConfig& cfg) {
    for (const auto& [key, val] : j.items()) {
        if (key == "J")
            cfg.J = want_number(val, "params.J");
        else if (key == "g")
            cfg.g = want_number(val, "params.g");
        else if (key == "delta")
            cfg.delta = want_number(val, "params.delta");
        else if (key == "tau")
            cfg.tau = want_number(val, "params.tau");
        else if (key == "N")
            cfg.N = want_int(val, "params.N");
        else
            throw invalid_params("unknown key params." + key);
    }
}

void decode_sweep(const njson& j, nqa::SweepSpec& s) {
    for (const auto& [key, val] : j.items()) {
        if (key == "variable") {
            s.variable = want_string(val, "sweep.variable");
            if (s.variable != "delta" && s.variable != "tau")
                throw invalid_params("sweep.variable must be delta or tau");
        } else if (key == "start")
            s.start = want_number(val, "sweep.start");
        else if (key == "stop")
            s.stop = want_number(val, "sweep.stop");
        else if (key == "count")
            s.count = want_int(val, "sweep.count");
        else if (key == "scale") {
            const std::string v = want_string(val, "sweep.scale");
            if (v == "log")
                s.log_scale = true;
            else if (v == "linear")
                s.log_scale = false;
            else
                throw invalid_params("sweep.scale must be linear or log");
        } else
            throw invalid_params("unknown key sweep." + key);
    }
    // a partial block would silently fall back to the command's default grid
    for (const char* req : {"variable", "start", "stop", "count"})
        if (!j.contains(req))
            throw invalid_params(std::string("sweep.") + req + " is required");
}

void decode_tolerances(const njson& j, nqa::ExperimentConfig& cfg) {
    for (const auto& [key, val] : j.items()) {
        if (key == "rtol")
            cfg.rtol = want_number(val, "tolerances.rtol");
        else if (key == "atol")
            cfg.atol = want_number(val, "tolerances.atol");
        else
            throw invalid_params("unknown key tolerances." + key);
    }
    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
        throw invalid_params("tolerances must be positive");
}

nqa::ExperimentConfig decode_config(const njson& j, const std::string& command) {
    if (!j.is_object()) throw invalid_params("config root must be an object");
    nqa::ExperimentConfig cfg;
    cfg.command = command;
    for (const auto& [key, val] : j.items()) {
        if (key == "command") {
            const std::string c = want_string(val, "command");
            if (c != command)
                throw invalid_params("config command '" + c +
                                     "' does not match invoked command '" +
                                     command + "'");
        } else if (key == "params") {
            decode_params(val, cfg);
        } else if (key == "sweep") {
            decode_sweep(val, cfg.sweep);
        } else if (key == "n_list") {
            cfg.n_list = want_int_list(val, "n_list");
            if (cfg.n_list.empty()) throw invalid_params("n_list is empty");
        } else if (key == "modes") {
            cfg.modes_set = true;
            if (val.is_string() && val.get<std::string>() == "all") {
                cfg.modes_all = true;
            } else {
                cfg.modes = want_int_list(val, "modes");
                if (cfg.modes.empty()) throw invalid_params("mode list is empty");
            }
        } else if (key == "engine") {
            cfg.engine = want_string(val, "engine");
            if (cfg.engine != "auto" && cfg.engine != "diabatic" &&
                cfg.engine != "adiabatic" && cfg.engine != "weber" &&
                cfg.engine != "both")
                throw invalid_params(
                    "engine must be auto, diabatic, adiabatic, weber, or both");
        } else if (key == "preparation") {
            cfg.preparation = want_string(val, "preparation");
            if (cfg.preparation != "asymptotic" &&
                cfg.preparation != "instantaneous")
                throw invalid_params(
                    "preparation must be asymptotic or instantaneous");
        } else if (key == "samples") {
            cfg.samples = want_int(val, "samples");
            if (cfg.samples < 2) throw invalid_params("samples must be >= 2");
        } else if (key == "surface_axis") {
            cfg.surface_axis = want_string(val, "surface_axis");
        } else if (key == "surface_time") {
            cfg.surface_time = want_string(val, "surface_time");
        } else if (key == "out") {
            cfg.out_dir = want_string(val, "out");
        } else if (key == "workers") {
            cfg.workers = want_int(val, "workers");
        } else if (key == "tolerances") {
            decode_tolerances(val, cfg);
        } else {
            throw invalid_params("unknown config key: " + key);
        }
    }
    return cfg;
}

njson infer_value(const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    if (v.find(',') != std::string::npos) {
        njson arr = njson::array();
        std::stringstream ss(v);
        std::string part;
        while (std::getline(ss, part, ','))
            arr.push_back(infer_value(part));
        return arr;
    }
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos == v.size()) return i;
    } catch (...) {
    }
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (...) {
    }
    return v;
}

void apply_override(njson& doc, const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw invalid_params("--set expects key=value, got: " + kv);
    const std::string path = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    njson* cur = &doc;
    std::stringstream ss(path);
    std::string tok;
    std::vector<std::string> toks;
    while (std::getline(ss, tok, '.')) {
        if (tok.empty()) throw invalid_params("bad --set path: " + path);
        toks.push_back(tok);
    }
    for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
        if (!cur->is_object()) throw invalid_params("bad --set path: " + path);
        cur = &(*cur)[toks[i]];
        if (cur->is_null()) *cur = njson::object();
    }
    (*cur)[toks.back()] = infer_value(value);
}

int run_validate(const nqa::ExperimentConfig& cfg) {
    const nqa::AdaptiveOptions opt = nqa::experiment_options(cfg);
    const std::vector<nqa::CriterionResult> results =
        nqa::run_validation(cfg.workers, opt);
    std::string report;
    bool all_pass = true;
    for (const auto& c : results) {
        const std::string line = nqa::report_line(c);
        std::printf("%s\n", line.c_str());
        report += line + "\n";
        all_pass = all_pass && c.pass;
    }
    std::filesystem::create_directories(cfg.out_dir);
    nqa::detail::write_atomic(
        std::filesystem::path(cfg.out_dir) / "validation_report.txt", report);
    std::printf("%s (report: %s/validation_report.txt)\n",
                all_pass ? "all criteria passed" : "some criteria failed",
                cfg.out_dir.c_str());
    return all_pass ? 0 : 1;
}

int run_tables(nqa::ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    nqa::ExperimentOutput out = nqa::run_experiment(cfg);
    nqa::TableMeta meta;
    meta.command = cfg.command;
    meta.resolved_config_json = nqa::resolved_config_json(cfg);
    meta.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    meta.stats = out.stats;
    meta.timestamp_utc = timestamp_utc();
    meta.workers = cfg.workers;
    for (const auto& t : out.tables) {
        const auto path = nqa::write_table(cfg.out_dir, t, meta);
        std::size_t failed = 0;
        for (const auto& r : t.rows)
            if (!r.error.empty()) ++failed;
        if (failed)
            std::printf("wrote %s (%zu rows, %zu with errors)\n",
                        path.c_str(), t.rows.size(), failed);
        else
            std::printf("wrote %s (%zu rows)\n", path.c_str(), t.rows.size());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Momentum-space simulator and analytic toolkit for non-Hermitian "
        "quantum annealing of the transverse-field Ising chain"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    int workers_override = -1;
    std::vector<std::string> sets;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"sweep-delta",
         "ground-state survival versus decay strength, one table per chain size"},
        {"mode-dynamics", "time-resolved survival of selected momentum modes"},
        {"kinks",
         "kink density versus annealing time, with the closed-form reference"},
        {"widths", "resonance energies and widths of every mode along the quench"},
        {"adiabaticity",
         "per-mode adiabaticity and the annealing-time estimate versus decay "
         "strength"},
        {"excitation-surface",
         "excitation probability over the (decay, mode-angle) plane"},
        {"estimate-time", "annealing-time estimate and related closed-form scales"},
        {"validate", "run the validation suite, one report line per criterion"}};
    for (const auto& [name, desc] : commands) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "config file (JSON)")
            ->required();
        sub->add_option("--out", out_override, "output directory");
        sub->add_option("--workers", workers_override, "worker thread count");
        sub->add_option("--set", sets,
                        "override a config entry, e.g. --set params.delta=5");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }
    const std::string command = app.get_subcommands().at(0)->get_name();

    nqa::ExperimentConfig cfg;
    try {
        std::ifstream f(config_path);
        if (!f) throw invalid_params("cannot read config file: " + config_path);
        njson doc;
        try {
            doc = njson::parse(f);
        } catch (const std::exception& e) {
            throw invalid_params(std::string("config is not valid JSON: ") +
                                 e.what());
        }
        for (const std::string& kv : sets) apply_override(doc, kv);
        cfg = decode_config(doc, command);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (workers_override >= 0) cfg.workers = workers_override;
        if (cfg.workers <= 0) {
            const unsigned hw = std::thread::hardware_concurrency();
            cfg.workers = hw ? static_cast<int>(hw) : 1;
        }
        // surface one bad-parameter class of errors before any work starts
        (void)nqa::make_params(cfg.J, cfg.g, cfg.delta, cfg.tau, cfg.N);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        if (command == "validate") return run_validate(cfg);
        return run_tables(cfg);
    } catch (const invalid_params& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 3;
    }
}
