#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "saps/experiments.hpp"

namespace saps {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Resolved run parameters.  The flat "key = value" file format carries the
// same names as the CLI flags; '#' starts a comment.
struct RunConfig {
    double x = 1e6;
    double theta = 0.0;
    double h = 0.0;
    std::uint64_t q_max = 30;
    double a_exp = 1.0;
    double epsilon = 0.05;
    std::uint64_t samples = 200;
    std::uint64_t strata = 256;
    std::uint64_t seed = 1;

    std::uint64_t nmax = 100000;
    unsigned k0 = 3;

    double t0 = 100.0;
    double sigma = 0.5;
    double c_exp = 12.0 / 5.0;
    int m_exp = 14;
    double c0 = 10.0;

    double t_max = 50.0;
    double grid_step = 0.1;
    double c_threshold = 0.1;
    std::uint64_t smk_m = 40;
    std::uint64_t smk_k = 2000;

    std::string zeros_file;
    std::string out;
    std::string format = "csv";
    std::string cache_dir;
    unsigned threads = 1;

    bool h_set = false;
    bool theta_set = false;

    double resolved_h() const {
        if (h_set || h > 0.0) return h;
        if (theta_set || theta > 0.0) return std::pow(x, theta);
        throw ConfigError("set either h or theta");
    }
    double resolved_theta() const {
        return (h_set || h > 0.0) ? std::log(resolved_h()) / std::log(x) : theta;
    }
    // eta = h / (x log^{A+1} x)
    double eta() const {
        return resolved_h() / (x * std::pow(std::log(x), a_exp + 1.0));
    }
    double alpha() const { return alpha_profile(resolved_theta()); }

    ExperimentConfig experiment() const {
        ExperimentConfig e;
        e.x = x;
        e.theta = theta;
        e.h = h_set || h > 0.0 ? resolved_h() : 0.0;
        e.Q = q_max;
        e.A = a_exp;
        e.epsilon = epsilon;
        e.samples = samples;
        e.strata = strata;
        e.seed = seed;
        return e;
    }
};

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());

    RunConfig cfg;
    std::vector<std::string> unknown;
    std::string line;
    std::size_t lineno = 0;

    auto parse_f = [&](const std::string& key, const std::string& val) {
        try {
            std::size_t used = 0;
            double v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw ConfigError("type mismatch for key '" + key + "': expected number, got '" +
                              val + "'");
        }
    };
    auto parse_u = [&](const std::string& key, const std::string& val) -> std::uint64_t {
        try {
            std::size_t used = 0;
            auto v = std::stoull(val, &used);
            if (used != val.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw ConfigError("type mismatch for key '" + key +
                              "': expected integer, got '" + val + "'");
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        std::string body = trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = trim(body.substr(0, eq));
        std::string val = trim(body.substr(eq + 1));

        if (key == "x") cfg.x = parse_f(key, val);
        else if (key == "theta") { cfg.theta = parse_f(key, val); cfg.theta_set = true; }
        else if (key == "h") { cfg.h = parse_f(key, val); cfg.h_set = true; }
        else if (key == "q_max") cfg.q_max = parse_u(key, val);
        else if (key == "a_exp") cfg.a_exp = parse_f(key, val);
        else if (key == "epsilon") cfg.epsilon = parse_f(key, val);
        else if (key == "samples") cfg.samples = parse_u(key, val);
        else if (key == "strata") cfg.strata = parse_u(key, val);
        else if (key == "seed") cfg.seed = parse_u(key, val);
        else if (key == "nmax") cfg.nmax = parse_u(key, val);
        else if (key == "k0") cfg.k0 = static_cast<unsigned>(parse_u(key, val));
        else if (key == "t0") cfg.t0 = parse_f(key, val);
        else if (key == "sigma") cfg.sigma = parse_f(key, val);
        else if (key == "c_exp") cfg.c_exp = parse_f(key, val);
        else if (key == "m_exp") cfg.m_exp = static_cast<int>(parse_u(key, val));
        else if (key == "c0") cfg.c0 = parse_f(key, val);
        else if (key == "t_max") cfg.t_max = parse_f(key, val);
        else if (key == "grid_step") cfg.grid_step = parse_f(key, val);
        else if (key == "c_threshold") cfg.c_threshold = parse_f(key, val);
        else if (key == "smk_m") cfg.smk_m = parse_u(key, val);
        else if (key == "smk_k") cfg.smk_k = parse_u(key, val);
        else if (key == "zeros_file") cfg.zeros_file = val;
        else if (key == "out") cfg.out = val;
        else if (key == "format") cfg.format = val;
        else if (key == "cache_dir") cfg.cache_dir = val;
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_u(key, val));
        else unknown.push_back(key);
    }

    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += " '" + k + "'";
        throw ConfigError(msg);
    }
    if (cfg.h_set && cfg.theta_set)
        throw ConfigError("conflicting keys 'h' and 'theta': set exactly one");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("format must be 'csv' or 'json'");
    return cfg;
}

}  // namespace saps
