#include "co2bench/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "co2bench/dataset.hpp"
#include "co2bench/errors.hpp"
#include "co2bench/rng.hpp"

namespace co2bench {

namespace {

constexpr int kSamplesPerHour = 3600 / kStepSeconds; // 20

// Day-relative sample offsets of the schedule anchors.
constexpr int kArrivalFirst = 8 * kSamplesPerHour + 10;  // 08:30
constexpr int kArrivalLast = 9 * kSamplesPerHour + 16;   // 09:48
constexpr int kDepartFirst = 17 * kSamplesPerHour;       // 17:00
constexpr int kDepartLast = 18 * kSamplesPerHour;        // 18:00

// Seed-stream tags so the occupancy, window and wind draws never collide.
constexpr std::uint64_t kTagOccupancy = 0x0cc1;
constexpr std::uint64_t kTagWindow = 0x313d;
constexpr std::uint64_t kTagWind = 0x3173;
constexpr std::uint64_t kTagDataset = 0xda7a;

} // namespace

const char* level_name(OccupancyLevel lvl) {
    switch (lvl) {
        case OccupancyLevel::low: return "low";
        case OccupancyLevel::medium: return "medium";
        case OccupancyLevel::high: return "high";
    }
    throw std::invalid_argument("level_name: bad enum value");
}

const char* mode_name(WindowMode mode) {
    return mode == WindowMode::closed ? "closed" : "open";
}

int level_peak(OccupancyLevel lvl) {
    switch (lvl) {
        case OccupancyLevel::low: return 5;
        case OccupancyLevel::medium: return 12;
        case OccupancyLevel::high: return 25;
    }
    throw std::invalid_argument("level_peak: bad enum value");
}

std::string scenario_stem(OccupancyLevel lvl, WindowMode mode) {
    static constexpr const char* lvl_tag[] = {"lo", "mo", "ho"};
    return std::string("kth_") + lvl_tag[static_cast<int>(lvl)] +
           (mode == WindowMode::closed ? "wc" : "wo");
}

std::pair<OccupancyLevel, WindowMode> parse_scenario_stem(const std::string& name) {
    std::string valid;
    for (WindowMode mode : {WindowMode::closed, WindowMode::open}) {
        for (OccupancyLevel lvl : {OccupancyLevel::low, OccupancyLevel::medium, OccupancyLevel::high}) {
            if (scenario_stem(lvl, mode) == name) return {lvl, mode};
            valid += (valid.empty() ? "" : ", ") + scenario_stem(lvl, mode);
        }
    }
    throw ConfigError("unknown scenario '" + name + "' (valid: " + valid + ")");
}

namespace {

// k distinct samples drawn uniformly from (lo, hi) exclusive, sorted.
std::vector<int> distinct_sorted(Rng& rng, int k, int lo, int hi) {
    std::set<int> seen;
    while (static_cast<int>(seen.size()) < k)
        seen.insert(static_cast<int>(rng.uniform_int(lo + 1, hi - 1)));
    return {seen.begin(), seen.end()};
}

} // namespace

std::pair<TimeSeries, std::vector<int>> gen_occupancy(OccupancyLevel lvl, std::uint64_t seed) {
    TimeSeries occ = make_week_series();
    std::vector<int> events;
    const int peak = level_peak(lvl);

    for (int day = 1; day <= 5; ++day) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(day)));
        const int n_events = static_cast<int>(rng.uniform_int(4, 10));
        const int arrival = static_cast<int>(rng.uniform_int(kArrivalFirst, kArrivalLast));
        const int depart = static_cast<int>(rng.uniform_int(kDepartFirst, kDepartLast));
        std::vector<int> day_events{arrival};
        for (int t : distinct_sorted(rng, n_events - 2, arrival, depart)) day_events.push_back(t);
        day_events.push_back(depart);

        const int n_seg = n_events - 1; // occupied stretches between events
        std::vector<int> level(n_seg);
        for (int s = 0; s < n_seg; ++s) level[s] = static_cast<int>(rng.uniform_int(1, peak));
        // Mornings start sparse; the headcount peak lands on a later segment.
        level[0] = static_cast<int>(rng.uniform_int(1, std::max(2, peak / 5)));
        const int peak_seg = static_cast<int>(rng.uniform_int(1, n_seg - 1));
        level[peak_seg] = peak;
        bool any_odd = false;
        for (int v : level) any_odd = any_odd || (v % 2 != 0);
        if (!any_odd) {
            for (int s = n_seg - 1; s >= 0; --s) {
                if (s != peak_seg) { level[s] -= 1; break; }
            }
        }

        const int base = day * kSamplesPerDay;
        for (int s = 0; s < n_seg; ++s) {
            for (int t = day_events[s]; t < day_events[s + 1]; ++t)
                occ.values[static_cast<std::size_t>(base + t)] = level[s];
        }
        for (int t : day_events) events.push_back(base + t);
    }
    return {occ, events};
}

TimeSeries gen_window_schedule(WindowMode mode, std::uint64_t seed) {
    TimeSeries win = make_week_series();
    if (mode == WindowMode::closed) return win;

    for (int day = 1; day <= 5; ++day) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(day)));
        const int n_changes = static_cast<int>(rng.uniform_int(2, 5));
        std::vector<int> times = distinct_sorted(rng, n_changes, kArrivalFirst - 1,
                                                 17 * kSamplesPerHour + 10);
        times.push_back(kDepartLast); // shut by 18:00 at the latest
        std::vector<double> frac(times.size(), 0.0);
        bool any_open = false;
        for (std::size_t s = 0; s + 1 < times.size(); ++s) {
            frac[s] = 0.25 * static_cast<double>(rng.uniform_int(0, 4));
            any_open = any_open || frac[s] > 0.0;
        }
        if (!any_open) frac[0] = 0.25 * static_cast<double>(rng.uniform_int(1, 4));

        const int base = day * kSamplesPerDay;
        for (std::size_t s = 0; s + 1 < times.size(); ++s) {
            for (int t = times[s]; t < times[s + 1]; ++t)
                win.values[static_cast<std::size_t>(base + t)] = frac[s];
        }
    }
    return win;
}

TimeSeries gen_wind(std::uint64_t seed) {
    TimeSeries wind = make_week_series();
    Rng rng(mix_seed(seed, 0));
    // AR(1) with a 2 h time constant and unit stationary standard deviation.
    const double mean = 3.0;
    const double phi = std::exp(-static_cast<double>(kStepSeconds) / 7200.0);
    const double step_sd = std::sqrt(1.0 - phi * phi);
    double w = mean;
    for (std::size_t i = 0; i < wind.size(); ++i) {
        wind.values[i] = std::clamp(w, 0.0, 12.0);
        w = mean + phi * (w - mean) + step_sd * rng.normal();
    }
    return wind;
}

Scenario make_scenario(OccupancyLevel lvl, WindowMode mode, std::uint64_t base_seed) {
    const auto lvl_tag = static_cast<std::uint64_t>(lvl);
    const auto mode_tag = static_cast<std::uint64_t>(mode);
    Scenario sc;
    sc.name = scenario_stem(lvl, mode);
    sc.occupancy_level = lvl;
    sc.window_mode = mode;
    // Occupancy is shared across the closed/open pair at the same level so
    // the two datasets differ only in airflow disturbances and noise.
    auto [occ, events] = gen_occupancy(lvl, mix_seed(base_seed, kTagOccupancy + lvl_tag));
    sc.occupancy = std::move(occ);
    sc.door_events = std::move(events);
    sc.window_opening =
        gen_window_schedule(mode, mix_seed(base_seed, kTagWindow + 8 * lvl_tag + mode_tag));
    sc.wind_speed = gen_wind(mix_seed(base_seed, kTagWind + 8 * lvl_tag + mode_tag));
    sc.seed = mix_seed(base_seed, kTagDataset + 8 * lvl_tag + mode_tag);
    return sc;
}

std::vector<Scenario> make_all_scenarios(std::uint64_t base_seed) {
    std::vector<Scenario> all;
    for (WindowMode mode : {WindowMode::closed, WindowMode::open})
        for (OccupancyLevel lvl : {OccupancyLevel::low, OccupancyLevel::medium, OccupancyLevel::high})
            all.push_back(make_scenario(lvl, mode, base_seed));
    return all;
}

TimeSeries resample_linear(const TimeSeries& ts, std::int64_t start, int step_s, std::size_t n) {
    if (ts.values.empty()) throw std::invalid_argument("resample_linear: empty series");
    TimeSeries out;
    out.start_time = start;
    out.step_s = step_s;
    out.values.resize(n);
    const std::int64_t src_end = ts.time_at(ts.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t t = start + static_cast<std::int64_t>(i) * step_s;
        if (t < ts.start_time || t > src_end)
            throw std::out_of_range("resample_linear: target grid extends past the source samples");
        const std::size_t j0 = static_cast<std::size_t>((t - ts.start_time) / ts.step_s);
        const std::size_t j1 = std::min(j0 + 1, ts.size() - 1);
        const double frac =
            static_cast<double>(t - ts.time_at(j0)) / static_cast<double>(ts.step_s);
        out.values[i] = (1.0 - frac) * ts.values[j0] + frac * ts.values[j1];
    }
    return out;
}

TimeSeries read_wind_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,wind_speed")
        throw FormatError(path + ": header must be 'timestamp,wind_speed', got '" + line + "'");

    TimeSeries raw;
    raw.values.clear();
    std::vector<std::int64_t> times;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError(path + ":" + std::to_string(line_no) + ": expected 2 cells");
        times.push_back(parse_timestamp(line.substr(0, comma)));
        raw.values.push_back(parse_double(line.substr(comma + 1),
                                          path + ":" + std::to_string(line_no) + " wind_speed"));
        if (times.size() > 1 && times[times.size() - 2] >= times.back())
            throw FormatError(path + ":" + std::to_string(line_no) +
                              ": timestamps must be strictly increasing");
        if (raw.values.back() < 0.0)
            throw FormatError(path + ":" + std::to_string(line_no) + ": wind speed is negative");
    }
    if (times.size() < 2) throw FormatError(path + ": need at least two samples");

    // The source need not be uniform; interpolate sample by sample.
    TimeSeries out;
    out.start_time = kCanonicalStart;
    out.step_s = kStepSeconds;
    out.values.resize(kWeekSamples);
    if (times.front() > kCanonicalStart ||
        times.back() < kCanonicalStart + static_cast<std::int64_t>(kWeekSamples - 1) * kStepSeconds)
        throw FormatError(path + ": wind samples do not span the simulated week");
    std::size_t j = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const std::int64_t t = out.time_at(i);
        while (j + 2 < times.size() && times[j + 1] <= t) ++j;
        const double span = static_cast<double>(times[j + 1] - times[j]);
        const double frac = static_cast<double>(t - times[j]) / span;
        out.values[i] = (1.0 - frac) * raw.values[j] + frac * raw.values[j + 1];
    }
    return out;
}

} // namespace co2bench
