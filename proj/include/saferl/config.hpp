#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "saferl/sha1.hpp"

namespace saferl {

enum class SafetyVariant { None, Handcrafted, Both };

inline std::string to_string(SafetyVariant v) {
    switch (v) {
        case SafetyVariant::None: return "none";
        case SafetyVariant::Handcrafted: return "handcrafted";
        case SafetyVariant::Both: return "both";
    }
    return "none";
}

inline SafetyVariant parse_variant(const std::string& s) {
    if (s == "none") return SafetyVariant::None;
    if (s == "handcrafted") return SafetyVariant::Handcrafted;
    if (s == "both") return SafetyVariant::Both;
    throw std::invalid_argument("unknown safety variant: " + s);
}

// Every tunable of the system. Defaults are the shipped configuration; any
// key can be overridden from a plain `key = value` config file.
struct SimConfig {
    // --- simulation ---
    double dt = 0.1;                    // s
    double v_max = 40.0;                // m/s, hard cap on any vehicle
    double lane_width = 3.7;            // m; lane centers at 0, 3.7, 7.4
    double car_length = 5.0;            // m
    double car_width = 2.0;             // m
    double lane_change_duration = 2.0;  // s for a full lane change
    double snap_tol = 0.05;             // m, lane-center snap tolerance
    double ax_accelerate = 2.0;         // m/s^2
    double ax_brake = -4.0;             // m/s^2
    double ax_hard_brake = -8.0;        // m/s^2
    long episode_steps = 200;
    double d_max = 100.0;               // m sensing range
    double ego_initial_speed = 30.0;    // m/s
    long traffic_min = 1;               // spawn count range, subset of [0,6]
    long traffic_max = 6;
    double traffic_speed_min = 22.0;    // m/s desired-speed range
    double traffic_speed_max = 32.0;
    double spawn_gap_min = 20.0;        // m, |dx| from ego at spawn
    double spawn_gap_max = 70.0;
    double p_lane_change = 0.02;        // traffic lane-change proposals per second
    long spawn_retries = 20;

    // --- reward ---
    double v_des = 30.0;           // m/s
    double headway_tau = 1.5;      // s, d_safe = max(headway_d_min, tau * v)
    double headway_d_min = 10.0;   // m
    double w_speed = 1.0;
    double w_lane = 1.0;
    double w_headway = 1.0;
    std::string lane_policy = "current";  // "current" or "fixed"
    long fixed_lane = 1;

    // --- handcrafted safety (ego filter) ---
    double safety_t_min = 5.0;         // s, Eq. 8 headway on closing speed
    double safety_d_tv_min = 10.0;     // m, Eq. 8 minimum gap
    double safety_t_hard_brake = 18.0; // s, TTC tier bounds
    double safety_t_brake = 20.0;

    // --- traffic controller thresholds (its own gap rule + ladder) ---
    double traffic_t_min = 1.0;
    double traffic_d_tv_min = 7.0;
    double traffic_t_hard_brake = 1.5;
    double traffic_t_brake = 3.0;

    // --- agent ---
    double gamma = 0.9;
    double learning_rate = 1e-3;
    long episodes = 3500;
    long batch_size = 32;
    long buffer_capacity = 100000;
    long target_sync_every = 1000;  // gradient steps between target syncs
    double r_handcraft = 10.0;
    double r_dynamic = 5.0;
    double eps_start = 1.0;
    double eps_final = 0.05;
    double eps_decay_fraction = 0.7;
    std::string variant = "handcrafted";  // none | handcrafted | both
    long partial_eval_every = 100;
    long partial_eval_episodes = 10;
    long checkpoint_every = 100;
    long q_hidden_size = 100;
    long q_hidden_layers = 2;

    // --- lookahead predictor ---
    long rnn_hidden = 64;
    long rnn_history = 4;
    long rnn_horizon = 4;
    long rnn_epochs = 30;
    long rnn_batch = 64;
    double rnn_learning_rate = 1e-3;
    double rnn_val_fraction = 0.1;
    double sentinel_tol = 0.10;  // fraction of d_max treated as "absent" in predictions
    bool dynamic_shield = false;

    // --- harness ---
    long eval_threads = 0;  // 0 = hardware concurrency

    // Geometry helpers. Three lanes, centers at k*lane_width, "left" = +y.
    static constexpr int kNumLanes = 3;
    double lane_center(int lane) const { return lane * lane_width; }
    int lane_index(double y) const {
        int idx = static_cast<int>(std::lround(y / lane_width));
        return std::clamp(idx, 0, kNumLanes - 1);
    }
    double road_y_min() const { return -lane_width / 2.0; }
    double road_y_max() const { return (kNumLanes - 1) * lane_width + lane_width / 2.0; }
    double y_norm() const { return kNumLanes * lane_width; }  // lateral normalization divisor

    SafetyVariant safety_variant() const { return parse_variant(variant); }
};

namespace detail {

using ConfigField = std::variant<double SimConfig::*, long SimConfig::*, bool SimConfig::*, std::string SimConfig::*>;

inline const std::map<std::string, ConfigField>& config_fields() {
    static const std::map<std::string, ConfigField> fields = {
        {"dt", &SimConfig::dt},
        {"v_max", &SimConfig::v_max},
        {"lane_width", &SimConfig::lane_width},
        {"car_length", &SimConfig::car_length},
        {"car_width", &SimConfig::car_width},
        {"lane_change_duration", &SimConfig::lane_change_duration},
        {"snap_tol", &SimConfig::snap_tol},
        {"ax_accelerate", &SimConfig::ax_accelerate},
        {"ax_brake", &SimConfig::ax_brake},
        {"ax_hard_brake", &SimConfig::ax_hard_brake},
        {"episode_steps", &SimConfig::episode_steps},
        {"d_max", &SimConfig::d_max},
        {"ego_initial_speed", &SimConfig::ego_initial_speed},
        {"traffic_min", &SimConfig::traffic_min},
        {"traffic_max", &SimConfig::traffic_max},
        {"traffic_speed_min", &SimConfig::traffic_speed_min},
        {"traffic_speed_max", &SimConfig::traffic_speed_max},
        {"spawn_gap_min", &SimConfig::spawn_gap_min},
        {"spawn_gap_max", &SimConfig::spawn_gap_max},
        {"p_lane_change", &SimConfig::p_lane_change},
        {"spawn_retries", &SimConfig::spawn_retries},
        {"v_des", &SimConfig::v_des},
        {"headway_tau", &SimConfig::headway_tau},
        {"headway_d_min", &SimConfig::headway_d_min},
        {"w_speed", &SimConfig::w_speed},
        {"w_lane", &SimConfig::w_lane},
        {"w_headway", &SimConfig::w_headway},
        {"lane_policy", &SimConfig::lane_policy},
        {"fixed_lane", &SimConfig::fixed_lane},
        {"safety_t_min", &SimConfig::safety_t_min},
        {"safety_d_tv_min", &SimConfig::safety_d_tv_min},
        {"safety_t_hard_brake", &SimConfig::safety_t_hard_brake},
        {"safety_t_brake", &SimConfig::safety_t_brake},
        {"traffic_t_min", &SimConfig::traffic_t_min},
        {"traffic_d_tv_min", &SimConfig::traffic_d_tv_min},
        {"traffic_t_hard_brake", &SimConfig::traffic_t_hard_brake},
        {"traffic_t_brake", &SimConfig::traffic_t_brake},
        {"gamma", &SimConfig::gamma},
        {"learning_rate", &SimConfig::learning_rate},
        {"episodes", &SimConfig::episodes},
        {"batch_size", &SimConfig::batch_size},
        {"buffer_capacity", &SimConfig::buffer_capacity},
        {"target_sync_every", &SimConfig::target_sync_every},
        {"r_handcraft", &SimConfig::r_handcraft},
        {"r_dynamic", &SimConfig::r_dynamic},
        {"eps_start", &SimConfig::eps_start},
        {"eps_final", &SimConfig::eps_final},
        {"eps_decay_fraction", &SimConfig::eps_decay_fraction},
        {"variant", &SimConfig::variant},
        {"partial_eval_every", &SimConfig::partial_eval_every},
        {"partial_eval_episodes", &SimConfig::partial_eval_episodes},
        {"checkpoint_every", &SimConfig::checkpoint_every},
        {"q_hidden_size", &SimConfig::q_hidden_size},
        {"q_hidden_layers", &SimConfig::q_hidden_layers},
        {"rnn_hidden", &SimConfig::rnn_hidden},
        {"rnn_history", &SimConfig::rnn_history},
        {"rnn_horizon", &SimConfig::rnn_horizon},
        {"rnn_epochs", &SimConfig::rnn_epochs},
        {"rnn_batch", &SimConfig::rnn_batch},
        {"rnn_learning_rate", &SimConfig::rnn_learning_rate},
        {"rnn_val_fraction", &SimConfig::rnn_val_fraction},
        {"sentinel_tol", &SimConfig::sentinel_tol},
        {"dynamic_shield", &SimConfig::dynamic_shield},
        {"eval_threads", &SimConfig::eval_threads},
    };
    return fields;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void set_config_value(SimConfig& cfg, const std::string& key, const std::string& value) {
    const auto& fields = detail::config_fields();
    auto it = fields.find(key);
    if (it == fields.end()) throw std::invalid_argument("unknown config key: " + key);
    try {
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(cfg.*member)>;
                if constexpr (std::is_same_v<T, double>) {
                    std::size_t pos = 0;
                    cfg.*member = std::stod(value, &pos);
                    if (pos != value.size()) throw std::invalid_argument(value);
                } else if constexpr (std::is_same_v<T, long>) {
                    std::size_t pos = 0;
                    cfg.*member = std::stol(value, &pos);
                    if (pos != value.size()) throw std::invalid_argument(value);
                } else if constexpr (std::is_same_v<T, bool>) {
                    if (value == "true" || value == "1") cfg.*member = true;
                    else if (value == "false" || value == "0") cfg.*member = false;
                    else throw std::invalid_argument(value);
                } else {
                    cfg.*member = value;
                }
            },
            it->second);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("bad value for config key " + key + ": '" + value + "'");
    } catch (const std::out_of_range&) {
        throw std::invalid_argument("bad value for config key " + key + ": '" + value + "'");
    }
}

inline std::string get_config_value(const SimConfig& cfg, const std::string& key) {
    const auto& fields = detail::config_fields();
    auto it = fields.find(key);
    if (it == fields.end()) throw std::invalid_argument("unknown config key: " + key);
    return std::visit(
        [&](auto member) -> std::string {
            using T = std::remove_reference_t<decltype(cfg.*member)>;
            if constexpr (std::is_same_v<T, double>) return detail::format_double(cfg.*member);
            else if constexpr (std::is_same_v<T, long>) return std::to_string(cfg.*member);
            else if constexpr (std::is_same_v<T, bool>) return cfg.*member ? "true" : "false";
            else return cfg.*member;
        },
        it->second);
}

// Applies `key = value` lines (# starts a comment) on top of cfg.
inline void apply_config_text(SimConfig& cfg, std::istream& in) {
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        set_config_value(cfg, key, value);
    }
}

inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    SimConfig cfg;
    apply_config_text(cfg, in);
    return cfg;
}

// Canonical serialization: every key, sorted, full double precision. Two
// configs with equal snapshots behave identically.
inline std::string config_snapshot(const SimConfig& cfg) {
    std::ostringstream out;
    for (const auto& [key, field] : detail::config_fields()) {
        out << key << " = " << get_config_value(cfg, key) << "\n";
    }
    return out.str();
}

inline std::string config_hash(const SimConfig& cfg) { return git_blob_hash(config_snapshot(cfg)); }

inline void validate_config(const SimConfig& cfg) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw std::invalid_argument("config: " + msg);
    };
    require(cfg.dt > 0, "dt must be > 0");
    require(cfg.v_max > 0, "v_max must be > 0");
    require(cfg.lane_width > 0, "lane_width must be > 0");
    require(cfg.lane_change_duration > 0, "lane_change_duration must be > 0");
    require(cfg.episode_steps > 0, "episode_steps must be > 0");
    require(cfg.traffic_min >= 0 && cfg.traffic_max <= 6 && cfg.traffic_min <= cfg.traffic_max,
            "traffic range must satisfy 0 <= traffic_min <= traffic_max <= 6");
    require(cfg.spawn_gap_min > cfg.car_length, "spawn_gap_min must exceed car_length");
    require(cfg.spawn_gap_max >= cfg.spawn_gap_min, "spawn_gap_max must be >= spawn_gap_min");
    require(cfg.v_des > 0, "v_des must be > 0");
    require(cfg.headway_tau > 0, "headway_tau must be > 0");
    require(cfg.headway_d_min > 0, "headway_d_min must be > 0");
    require(cfg.lane_policy == "current" || cfg.lane_policy == "fixed",
            "lane_policy must be 'current' or 'fixed'");
    require(cfg.fixed_lane >= 0 && cfg.fixed_lane < SimConfig::kNumLanes, "fixed_lane out of range");
    require(cfg.safety_t_min > 0, "safety_t_min must be > 0");
    require(cfg.safety_d_tv_min > 0, "safety_d_tv_min must be > 0");
    require(cfg.safety_t_hard_brake > 0 && cfg.safety_t_hard_brake < cfg.safety_t_brake,
            "need 0 < safety_t_hard_brake < safety_t_brake");
    require(cfg.traffic_t_hard_brake > 0 && cfg.traffic_t_hard_brake < cfg.traffic_t_brake,
            "need 0 < traffic_t_hard_brake < traffic_t_brake");
    require(cfg.gamma > 0 && cfg.gamma < 1, "gamma must be in (0, 1)");
    require(cfg.learning_rate > 0, "learning_rate must be > 0");
    require(cfg.batch_size > 0 && cfg.batch_size % 2 == 0, "batch_size must be positive and even");
    require(cfg.buffer_capacity > 0, "buffer_capacity must be > 0");
    require(cfg.target_sync_every > 0, "target_sync_every must be > 0");
    require(cfg.eps_start >= 0 && cfg.eps_start <= 1, "eps_start must be in [0, 1]");
    require(cfg.eps_final >= 0 && cfg.eps_final <= cfg.eps_start, "need 0 <= eps_final <= eps_start");
    require(cfg.eps_decay_fraction > 0 && cfg.eps_decay_fraction <= 1,
            "eps_decay_fraction must be in (0, 1]");
    parse_variant(cfg.variant);
    require(cfg.partial_eval_every > 0, "partial_eval_every must be > 0");
    require(cfg.partial_eval_episodes > 0, "partial_eval_episodes must be > 0");
    require(cfg.q_hidden_size > 0 && cfg.q_hidden_layers > 0, "Q-network shape must be positive");
    require(cfg.rnn_hidden > 0 && cfg.rnn_history >= 1 && cfg.rnn_horizon >= 1,
            "rnn shape must satisfy hidden > 0, history >= 1, horizon >= 1");
    require(cfg.rnn_val_fraction > 0 && cfg.rnn_val_fraction < 1, "rnn_val_fraction must be in (0, 1)");
    require(cfg.sentinel_tol >= 0 && cfg.sentinel_tol < 1, "sentinel_tol must be in [0, 1)");
    require(cfg.eval_threads >= 0, "eval_threads must be >= 0");
}

}  // namespace saferl
