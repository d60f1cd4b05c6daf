#include "co2bench/room_sim.hpp"

#include <algorithm>
#include <cmath>

#include "co2bench/errors.hpp"
#include "co2bench/rng.hpp"

namespace co2bench {

double saturation(double co2_ppm, const ControllerConfig& cfg) {
    if (co2_ppm <= cfg.sat_low_ppm) return 0.0;
    if (co2_ppm >= cfg.sat_high_ppm) return 1.0;
    return (co2_ppm - cfg.sat_low_ppm) / (cfg.sat_high_ppm - cfg.sat_low_ppm);
}

double pid_step(PidState& st, double demand, double dt_s, const ControllerConfig& cfg) {
    const double e = demand;
    const double de = (e - st.prev_error) / dt_s;
    const double integral_next = st.integral + e * dt_s;
    const double raw = cfg.kp * e + cfg.ki * integral_next + cfg.kd * de;
    const double out = std::clamp(raw, 0.0, 1.0);
    // Conditional integration: only bank the new integral while the actuator
    // is unsaturated, so the integrator cannot wind far past the limits.
    if (raw == out) st.integral = integral_next;
    st.prev_error = e;
    return out;
}

double ventilation_flow(double control, int minute_of_day, const RoomParams& p) {
    const bool scheduled =
        minute_of_day >= p.vent_start_hour * 60 && minute_of_day < p.vent_end_hour * 60;
    if (!scheduled) return 0.0;
    const double c = std::clamp(control, 0.0, 1.0);
    return p.vent_flow_min + c * (p.vent_flow_max - p.vent_flow_min);
}

Flows infiltration_flow(double wind_speed, double window_opening, const RoomParams& p) {
    if (wind_speed < 0.0) throw std::invalid_argument("infiltration_flow: negative wind speed");
    if (window_opening < 0.0 || window_opening > 1.0)
        throw std::invalid_argument("infiltration_flow: window opening outside [0,1]");
    const double q =
        p.tight_leak_flow() + p.window_wind_coeff * window_opening * p.window_area_total * wind_speed;
    return Flows{0.0, 0.0, q, q};
}

double co2_step(double co2_ppm, double flow, double occupants, double dt_s, const RoomParams& p) {
    if (dt_s <= 0.0) throw std::invalid_argument("co2_step: non-positive time step");
    if (flow < 0.0) throw std::invalid_argument("co2_step: negative flow");
    const double volume = p.volume();
    const double source_ppm_s = p.gen_rate_per_person * occupants * 1e6; // ppm*m^3/s
    if (flow == 0.0) return co2_ppm + source_ppm_s / volume * dt_s;
    // With constant inputs the balance relaxes exponentially toward
    // C_out + g*o*1e6/Q with time constant V/Q.
    const double target = p.co2_outdoor_ppm + source_ppm_s / flow;
    return target + (co2_ppm - target) * std::exp(-flow * dt_s / volume);
}

TimeSeries add_noise(const TimeSeries& co2, double target_snr_db, std::uint64_t seed) {
    const double vs = variance(co2.values);
    if (vs <= 0.0) throw NumericalError("add_noise: signal variance is zero");
    const double sd = std::sqrt(vs / std::pow(10.0, target_snr_db / 10.0));
    Rng rng(seed);
    TimeSeries out = co2;
    for (double& v : out.values) v += sd * rng.normal();
    return out;
}

Dataset simulate_week(const Scenario& sc, const RoomParams& p, const ControllerConfig& cfg,
                      std::optional<double> target_snr_db) {
    validate_params(p);
    validate_controller(cfg);
    const TimeSeries grid = make_week_series();
    if (!sc.occupancy.same_grid(grid) || !sc.window_opening.same_grid(grid) ||
        !sc.wind_speed.same_grid(grid))
        throw ConfigError("simulate_week: scenario series are not on the canonical week grid");

    Dataset ds;
    for (std::size_t c = 0; c < kChannelNames.size(); ++c) channel(ds, c) = grid;
    ds.occupancy = sc.occupancy;
    ds.window_opening = sc.window_opening;

    const double dt = static_cast<double>(kStepSeconds);
    double co2 = p.initial_co2_ppm;
    PidState pid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        // The sample records the state at the start of the interval; the
        // interval then evolves under the flows chosen from that state.
        const double demand = saturation(co2, cfg);
        const double control = pid_step(pid, demand, dt, cfg);
        const double vent = ventilation_flow(control, grid.minute_of_day(i), p);
        const Flows leak = infiltration_flow(sc.wind_speed.values[i], sc.window_opening.values[i], p);

        ds.co2.values[i] = co2;
        ds.ventilation_control.values[i] = control;
        ds.inflow_ventilation.values[i] = vent;
        ds.outflow_ventilation.values[i] = vent;
        ds.inflow_leakages.values[i] = leak.leak_in;
        ds.outflow_leakages.values[i] = leak.leak_out;

        co2 = co2_step(co2, vent + leak.leak_in, sc.occupancy.values[i], dt, p);
    }

    if (target_snr_db) {
        ds.co2_noise = add_noise(ds.co2, *target_snr_db, mix_seed(sc.seed, 0x9015e));
    } else {
        ds.co2_noise = ds.co2;
    }

    ds.scenario = sc.name;
    ds.seed = sc.seed;
    ds.params = json{{"room", params_to_json(p)},
                     {"controller", controller_to_json(cfg)},
                     {"noise", target_snr_db ? json{{"target_snr_db", *target_snr_db}}
                                             : json{{"target_snr_db", nullptr}}}};
    validate_dataset(ds);
    return ds;
}

} // namespace co2bench
