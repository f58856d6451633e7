#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nqa/core.hpp"
#include "nqa/ode.hpp"

namespace nqa {

// Bump when column names or order of any emitted table change.
inline constexpr const char* table_schema_version = "1.0";

struct Column {
    std::string name;
    std::string unit;  // empty for dimensionless columns
};

// A row is all numbers; a nonempty error marks a cell-level failure and the
// numeric payload of that row is not meaningful.
struct TableRow {
    std::vector<double> values;
    std::string error;
};

struct ResultTable {
    std::string name;  // output basename, no extension
    std::vector<Column> columns;
    std::vector<TableRow> rows;

    void push(std::vector<double> values, std::string error = {}) {
        if (values.size() != columns.size())
            throw invalid_params("table row width does not match schema");
        rows.push_back({std::move(values), std::move(error)});
    }
    bool has_errors() const {
        for (const auto& r : rows)
            if (!r.error.empty()) return true;
        return false;
    }
};

struct TableMeta {
    std::string command;
    std::string resolved_config_json;  // raw JSON text, embedded verbatim
    double wall_seconds = 0.0;
    IntegrationStats stats;            // aggregated over all cells
    std::string timestamp_utc;         // kept out of the CSV body on purpose
    int workers = 1;
};

// 15 significant digits, scientific, C-locale decimal point.
inline std::string format_cell(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.14e", v);
    return buf;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof esc, "\\u%04x", c);
                    out += esc;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

inline void write_atomic(const std::filesystem::path& target, const std::string& bytes) {
    const std::filesystem::path tmp = target.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!f.flush()) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
}

}  // namespace detail

// Header plus rows, LF line endings. Bodies carry no timestamps so reruns
// are byte-comparable.
inline std::string csv_body(const ResultTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i].unit.empty()
                   ? t.columns[i].name
                   : t.columns[i].name + " [" + t.columns[i].unit + "]";
    }
    out += ",error\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.values.size(); ++i) {
            if (i) out += ',';
            out += format_cell(r.values[i]);
        }
        out += ',';
        if (!r.error.empty()) out += detail::csv_quote(r.error);
        out += '\n';
    }
    return out;
}

inline std::string sidecar_json(const ResultTable& t, const TableMeta& m) {
    std::string out = "{\n";
    out += "  \"table\": " + detail::json_quote(t.name) + ",\n";
    out += "  \"command\": " + detail::json_quote(m.command) + ",\n";
    out += "  \"schema_version\": " + detail::json_quote(table_schema_version) + ",\n";
    out += "  \"columns\": [";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ", ";
        out += detail::json_quote(t.columns[i].name);
    }
    out += "],\n";
    out += "  \"rows\": " + std::to_string(t.rows.size()) + ",\n";
    out += "  \"workers\": " + std::to_string(m.workers) + ",\n";
    out += "  \"wall_seconds\": " + format_cell(m.wall_seconds) + ",\n";
    out += "  \"integrator\": {\"accepted\": " + std::to_string(m.stats.accepted) +
           ", \"rejected\": " + std::to_string(m.stats.rejected) +
           ", \"rhs_evals\": " + std::to_string(m.stats.rhs_evals) +
           ", \"renormalizations\": " + std::to_string(m.stats.renormalizations) + "},\n";
    out += "  \"written_utc\": " + detail::json_quote(m.timestamp_utc) + ",\n";
    out += "  \"config\": " +
           (m.resolved_config_json.empty() ? std::string("{}") : m.resolved_config_json) +
           "\n";
    out += "}\n";
    return out;
}

// Writes <name>.csv and <name>.meta.json under dir, each through a temporary
// name with an atomic rename. Returns the CSV path.
inline std::filesystem::path write_table(const std::filesystem::path& dir,
                                         const ResultTable& t, const TableMeta& m) {
    if (t.name.empty()) throw invalid_params("table has no name");
    std::filesystem::create_directories(dir);
    const std::filesystem::path csv = dir / (t.name + ".csv");
    detail::write_atomic(csv, csv_body(t));
    detail::write_atomic(dir / (t.name + ".meta.json"), sidecar_json(t, m));
    return csv;
}

}  // namespace nqa
