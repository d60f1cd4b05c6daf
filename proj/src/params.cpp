#include "co2bench/params.hpp"

#include <fstream>

#include "co2bench/errors.hpp"

namespace co2bench {

void validate_params(const RoomParams& p) {
    auto fail = [](const std::string& what) { throw ConfigError("room params: " + what); };
    if (p.room_height <= 0.0 || p.floor_area <= 0.0) fail("room dimensions must be positive");
    if (p.window_area_total < 0.0 || p.n_windows < 0) fail("window geometry must be non-negative");
    if (p.vent_flow_min < 0.0 || p.vent_flow_max < p.vent_flow_min)
        fail("need 0 <= vent_flow_min <= vent_flow_max");
    if (p.air_tightness_ach50 < 0.0) fail("air tightness must be non-negative");
    if (p.gen_rate_per_person < 0.0 || p.activity_met <= 0.0)
        fail("occupant CO2 generation must be non-negative");
    if (p.co2_outdoor_ppm < 0.0 || p.initial_co2_ppm < 0.0) fail("CO2 levels must be non-negative");
    if (p.window_wind_coeff < 0.0) fail("window wind coefficient must be non-negative");
    if (p.vent_start_hour < 0 || p.vent_end_hour > 24 || p.vent_start_hour > p.vent_end_hour)
        fail("ventilation schedule hours out of order");
}

void validate_controller(const ControllerConfig& c) {
    auto fail = [](const std::string& what) { throw ConfigError("controller: " + what); };
    if (!(c.sat_low_ppm < c.sat_high_ppm)) fail("saturation knees must satisfy low < high");
    if (c.kp < 0.0 || c.ki < 0.0 || c.kd < 0.0) fail("gains must be non-negative");
}

json params_to_json(const RoomParams& p) {
    return json{{"room_height", p.room_height},
                {"floor_area", p.floor_area},
                {"window_area_total", p.window_area_total},
                {"n_windows", p.n_windows},
                {"door_area", p.door_area},
                {"vent_flow_min", p.vent_flow_min},
                {"vent_flow_max", p.vent_flow_max},
                {"air_tightness_ach50", p.air_tightness_ach50},
                {"activity_met", p.activity_met},
                {"gen_rate_per_person", p.gen_rate_per_person},
                {"co2_outdoor_ppm", p.co2_outdoor_ppm},
                {"initial_co2_ppm", p.initial_co2_ppm},
                {"window_wind_coeff", p.window_wind_coeff},
                {"vent_start_hour", p.vent_start_hour},
                {"vent_end_hour", p.vent_end_hour}};
}

json controller_to_json(const ControllerConfig& c) {
    return json{{"sat_low_ppm", c.sat_low_ppm}, {"sat_high_ppm", c.sat_high_ppm},
                {"kp", c.kp},                   {"ki", c.ki},
                {"kd", c.kd}};
}

namespace {

// Applies every key in j through setters; complains about unknown keys.
template <typename Setter>
void apply_keys(const json& j, const char* ctx, Setter&& set) {
    if (!j.is_object()) throw ConfigError(std::string(ctx) + ": expected a JSON object");
    for (const auto& [key, val] : j.items()) {
        if (!set(key, val)) throw ConfigError(std::string(ctx) + ": unknown key '" + key + "'");
    }
}

} // namespace

RoomParams params_from_json(const json& j) {
    RoomParams p;
    bool gen_rate_given = false;
    bool met_given = false;
    apply_keys(j, "room params", [&](const std::string& k, const json& v) {
        if (k == "room_height") p.room_height = v.get<double>();
        else if (k == "floor_area") p.floor_area = v.get<double>();
        else if (k == "window_area_total") p.window_area_total = v.get<double>();
        else if (k == "n_windows") p.n_windows = v.get<int>();
        else if (k == "door_area") p.door_area = v.get<double>();
        else if (k == "vent_flow_min") p.vent_flow_min = v.get<double>();
        else if (k == "vent_flow_max") p.vent_flow_max = v.get<double>();
        else if (k == "air_tightness_ach50") p.air_tightness_ach50 = v.get<double>();
        else if (k == "activity_met") { p.activity_met = v.get<double>(); met_given = true; }
        else if (k == "gen_rate_per_person") { p.gen_rate_per_person = v.get<double>(); gen_rate_given = true; }
        else if (k == "co2_outdoor_ppm") p.co2_outdoor_ppm = v.get<double>();
        else if (k == "initial_co2_ppm") p.initial_co2_ppm = v.get<double>();
        else if (k == "window_wind_coeff") p.window_wind_coeff = v.get<double>();
        else if (k == "vent_start_hour") p.vent_start_hour = v.get<int>();
        else if (k == "vent_end_hour") p.vent_end_hour = v.get<int>();
        else return false;
        return true;
    });
    if (met_given && !gen_rate_given) p.gen_rate_per_person = kCo2GenPerMet * p.activity_met;
    validate_params(p);
    return p;
}

ControllerConfig controller_from_json(const json& j) {
    ControllerConfig c;
    apply_keys(j, "controller", [&](const std::string& k, const json& v) {
        if (k == "sat_low_ppm") c.sat_low_ppm = v.get<double>();
        else if (k == "sat_high_ppm") c.sat_high_ppm = v.get<double>();
        else if (k == "kp") c.kp = v.get<double>();
        else if (k == "ki") c.ki = v.get<double>();
        else if (k == "kd") c.kd = v.get<double>();
        else return false;
        return true;
    });
    validate_controller(c);
    return c;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    SimConfig cfg;
    apply_keys(j, "config", [&](const std::string& k, const json& v) {
        if (k == "room") cfg.room = params_from_json(v);
        else if (k == "controller") cfg.controller = controller_from_json(v);
        else return false;
        return true;
    });
    return cfg;
}

} // namespace co2bench
