#pragma once

#include <cstdint>
#include <optional>

#include "co2bench/dataset.hpp"
#include "co2bench/params.hpp"
#include "co2bench/scenario.hpp"
#include "co2bench/time_series.hpp"

namespace co2bench {

// Controller memory carried across simulation steps.
struct PidState {
    double integral = 0.0;   // accumulated error, seconds
    double prev_error = 0.0; // for the derivative term
};

// Air exchange through the envelope, split by direction. The flow balance is
// exact: inflow equals outflow for both the mechanical and the leakage path.
struct Flows {
    double vent_in = 0.0;
    double vent_out = 0.0;
    double leak_in = 0.0;
    double leak_out = 0.0;
};

// Piecewise-linear map from CO2 to the controller's demand signal:
// 0 below sat_low_ppm, 1 above sat_high_ppm, linear in between.
double saturation(double co2_ppm, const ControllerConfig& cfg);

// One discrete PID update on error e = demand - 0. Backward-Euler integral
// term with conditional integration: when the raw output leaves [0,1] the
// integrator holds its previous value. Returns the clamped output in [0,1].
double pid_step(PidState& st, double demand, double dt_s, const ControllerConfig& cfg);

// Mechanical supply flow for a control signal c in [0,1]:
// vent_flow_min + c * (vent_flow_max - vent_flow_min) while minute_of_day is
// inside [vent_start_hour, vent_end_hour), zero outside the schedule.
double ventilation_flow(double control, int minute_of_day, const RoomParams& p);

// Envelope leakage plus open-window air exchange, balanced in/out:
// tight_leak_flow() + window_wind_coeff * opening * window_area_total * wind.
Flows infiltration_flow(double wind_speed, double window_opening, const RoomParams& p);

// Exact zero-order-hold step of the well-mixed CO2 balance
//   V dC/dt = g*occupants*1e6 - Q*(C - C_outdoor)
// over dt_s seconds with flow Q and source held constant. Handles Q = 0.
double co2_step(double co2_ppm, double flow, double occupants, double dt_s, const RoomParams& p);

// Runs the closed loop over the scenario week and fills every dataset
// channel. The controller reads the noiseless CO2; the co2_noise channel gets
// white Gaussian noise sized for target_snr_db (co2_noise == co2 when the
// target is absent). Seed comes from scenario.seed. Throws ConfigError when a
// scenario series is not on the canonical week grid.
Dataset simulate_week(const Scenario& sc, const RoomParams& p, const ControllerConfig& cfg,
                      std::optional<double> target_snr_db = 10.0);

// Additive white Gaussian noise with variance var(co2) / 10^(snr/10).
// Throws NumericalError when the input has zero variance.
TimeSeries add_noise(const TimeSeries& co2, double target_snr_db, std::uint64_t seed);

} // namespace co2bench
