#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace co2bench {

using json = nlohmann::ordered_json;

// CO2 generation per person at 1 MET, m^3/s. The usual adult office figure of
// about 0.0046 L/s at 1.8 MET rounds to the 7.6e-6 m^3/s used below.
inline constexpr double kCo2GenPerMet = 7.6e-6 / 1.8;

// Geometry and physics of the simulated office room, SI units throughout.
struct RoomParams {
    double room_height = 2.9;          // m
    double floor_area = 80.0;          // m^2
    double window_area_total = 2.56;   // m^2, all windows combined
    int n_windows = 4;
    double door_area = 1.6;            // m^2 (informational)
    double vent_flow_min = 0.08;       // m^3/s, mechanical baseline
    double vent_flow_max = 0.28;       // m^3/s, mechanical ceiling
    double air_tightness_ach50 = 1.5;  // air changes per hour at 50 Pa
    double activity_met = 1.8;         // occupant metabolic rate
    double gen_rate_per_person = 7.6e-6; // m^3/s CO2 per person, tracks activity_met
    double co2_outdoor_ppm = 420.0;
    double initial_co2_ppm = 420.0;
    double window_wind_coeff = 0.05;   // opening-area wind admittance factor
    int vent_start_hour = 8;           // mechanical ventilation schedule
    int vent_end_hour = 18;

    double volume() const { return room_height * floor_area; }
    // Envelope leakage at normal pressure via the ACH50/20 rule of thumb.
    double tight_leak_flow() const { return volume() * (air_tightness_ach50 / 20.0) / 3600.0; }
};

// Proportional ventilation controller acting on the saturated CO2 signal.
struct ControllerConfig {
    double sat_low_ppm = 700.0;  // below this the controller sees 0
    double sat_high_ppm = 1100.0; // above this it sees 1
    double kp = 2.0;
    double ki = 0.01; // 1/s
    double kd = 0.0;  // s
};

// Throw ConfigError on non-physical values (non-positive dimensions, flow
// bounds out of order, saturation knees out of order, negative gains).
void validate_params(const RoomParams& p);
void validate_controller(const ControllerConfig& c);

// JSON round trip. from_json-style loaders accept partial objects and keep
// defaults for absent keys; unknown keys raise ConfigError so typos do not
// silently vanish. Changing activity_met rescales gen_rate_per_person unless
// the latter is itself given.
json params_to_json(const RoomParams& p);
json controller_to_json(const ControllerConfig& c);
RoomParams params_from_json(const json& j);
ControllerConfig controller_from_json(const json& j);

// Load {"room": {...}, "controller": {...}} (both optional) from a file.
struct SimConfig {
    RoomParams room;
    ControllerConfig controller;
};
SimConfig load_sim_config(const std::string& path);

} // namespace co2bench
