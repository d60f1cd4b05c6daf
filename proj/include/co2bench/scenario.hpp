#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "co2bench/time_series.hpp"

namespace co2bench {

enum class OccupancyLevel { low, medium, high };
enum class WindowMode { closed, open };

const char* level_name(OccupancyLevel lvl);        // "low" / "medium" / "high"
const char* mode_name(WindowMode mode);            // "closed" / "open"
int level_peak(OccupancyLevel lvl);                // 5 / 12 / 25 persons
// Dataset stem, e.g. (medium, open) -> "kth_mowo".
std::string scenario_stem(OccupancyLevel lvl, WindowMode mode);
// Inverse of scenario_stem; throws ConfigError listing the valid stems.
std::pair<OccupancyLevel, WindowMode> parse_scenario_stem(const std::string& name);

// Exogenous inputs for one simulated week on the canonical grid.
struct Scenario {
    std::string name;
    OccupancyLevel occupancy_level = OccupancyLevel::low;
    WindowMode window_mode = WindowMode::closed;
    TimeSeries occupancy;          // persons, piecewise constant
    std::vector<int> door_events;  // sample indices where segments start, ascending
    TimeSeries window_opening;     // fraction in [0,1], all zero when closed
    TimeSeries wind_speed;         // m/s
    std::uint64_t seed = 0;        // per-dataset seed (noise stream etc.)
};

// Weekday occupancy as a piecewise-constant staircase. Each of the five
// working days gets 4-10 door events between 08:00 and 18:00: an arrival in
// [08:30, 09:48], a departure in [17:00, 18:00], and random moves in between.
// Levels are integers in [1, peak]; one mid-day segment per day is pinned to
// the level's peak, the first segment is kept small (people trickle in), and
// at least one non-zero level per day is odd so the weekly pattern has no
// common integer divisor. Nights and weekends are zero. Returns the series
// plus the event sample indices.
std::pair<TimeSeries, std::vector<int>> gen_occupancy(OccupancyLevel lvl, std::uint64_t seed);

// Window opening fraction. Closed mode is identically zero; open mode draws
// 2-5 daytime change points per working day with openings from
// {0, 0.25, 0.5, 0.75, 1}, at least one of them non-zero, windows shut by
// 18:00 and on weekends.
TimeSeries gen_window_schedule(WindowMode mode, std::uint64_t seed);

// Wind speed: mean-reverting random walk around 3 m/s (about a 2 h
// correlation time, unit stationary deviation), clamped to [0, 12].
TimeSeries gen_wind(std::uint64_t seed);

// One scenario assembled from per-purpose sub-seeds. The occupancy stream
// depends only on (base_seed, level), so a closed/open pair at the same level
// shares its occupancy exactly and differs in windows and noise alone.
Scenario make_scenario(OccupancyLevel lvl, WindowMode mode, std::uint64_t base_seed);

// All six level/mode combinations, closed modes first:
// kth_lowc, kth_mowc, kth_howc, kth_lowo, kth_mowo, kth_howo.
std::vector<Scenario> make_all_scenarios(std::uint64_t base_seed);

// Wind override from a two-column CSV (timestamp,wind_speed), linearly
// resampled onto the canonical week grid. Timestamps may be arbitrary but
// must be strictly increasing and span the whole week.
TimeSeries read_wind_csv(const std::string& path);

// Piecewise-linear resample of ts onto a new uniform grid.
TimeSeries resample_linear(const TimeSeries& ts, std::int64_t start, int step_s, std::size_t n);

} // namespace co2bench
