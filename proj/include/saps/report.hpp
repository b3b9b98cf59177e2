#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "saps/config.hpp"

namespace saps {

using ordered_json = nlohmann::ordered_json;

// shortest-deterministic float text, enough digits to round-trip
inline std::string num_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// RFC-style quoting: quote when the field holds a comma, quote or newline
inline std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline void csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << csv_quote(fields[i]);
    }
    os << '\n';
}

// resolved-config echo embedded in every report
inline ordered_json config_echo(const RunConfig& cfg) {
    ordered_json j;
    j["x"] = cfg.x;
    if (cfg.h_set || cfg.h > 0.0) j["h"] = cfg.h;
    if (cfg.theta_set || cfg.theta > 0.0) j["theta"] = cfg.theta;
    j["q_max"] = cfg.q_max;
    j["a_exp"] = cfg.a_exp;
    j["epsilon"] = cfg.epsilon;
    j["samples"] = cfg.samples;
    j["strata"] = cfg.strata;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["format"] = cfg.format;
    bool windowed = cfg.h_set || cfg.theta_set || cfg.h > 0.0 || cfg.theta > 0.0;
    if (windowed) {
        j["resolved_h"] = cfg.resolved_h();
        j["eta"] = cfg.eta();
        j["alpha"] = cfg.alpha();
    }
    return j;
}

// CSV: '#' comment lines echo the config, then a header row and data rows.
// JSON: {"config": ..., "data": ..., "meta": {...}}; only "meta" may vary
// between identical runs.
struct Report {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    ordered_json aggregate;  // summary block

    void emit_csv(std::ostream& os, const RunConfig& cfg) const {
        os << "# config " << config_echo(cfg).dump() << '\n';
        if (!aggregate.empty()) os << "# aggregate " << aggregate.dump() << '\n';
        csv_row(os, header);
        for (const auto& r : rows) csv_row(os, r);
    }

    void emit_json(std::ostream& os, const RunConfig& cfg,
                   const std::string& timestamp) const {
        ordered_json j;
        j["config"] = config_echo(cfg);
        ordered_json data;
        data["columns"] = header;
        ordered_json jrows = ordered_json::array();
        for (const auto& r : rows) jrows.push_back(r);
        data["rows"] = jrows;
        if (!aggregate.empty()) data["aggregate"] = aggregate;
        j["data"] = data;
        ordered_json meta;
        meta["generated_at"] = timestamp;
        j["meta"] = meta;
        os << j.dump(2) << '\n';
    }

    void emit(std::ostream& os, const RunConfig& cfg, const std::string& timestamp) const {
        if (cfg.format == "json") emit_json(os, cfg, timestamp);
        else emit_csv(os, cfg);
    }
};

}  // namespace saps
