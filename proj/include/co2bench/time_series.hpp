#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace co2bench {

// Canonical weekly grid: 7 days sampled every 3 minutes starting on a Sunday
// at midnight (2014-07-13T00:00:00, which the timestamp column reflects).
inline constexpr int kStepSeconds = 180;
inline constexpr int kSamplesPerDay = 86400 / kStepSeconds; // 480
inline constexpr int kWeekSamples = 7 * kSamplesPerDay;     // 3360
inline constexpr std::int64_t kCanonicalStart = 1405209600; // 2014-07-13T00:00:00

// Uniformly sampled scalar signal anchored to an absolute start time.
struct TimeSeries {
    std::int64_t start_time = kCanonicalStart; // seconds since epoch
    int step_s = kStepSeconds;                 // sample period, > 0
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    std::int64_t time_at(std::size_t i) const {
        return start_time + static_cast<std::int64_t>(i) * step_s;
    }
    // Minutes past midnight of sample i (grid start is midnight-aligned).
    int minute_of_day(std::size_t i) const {
        const std::int64_t sec = ((time_at(i) % 86400) + 86400) % 86400;
        return static_cast<int>(sec / 60);
    }

    bool same_grid(const TimeSeries& o) const {
        return start_time == o.start_time && step_s == o.step_s && size() == o.size();
    }
    bool operator==(const TimeSeries& o) const {
        return same_grid(o) && values == o.values;
    }
};

// Make a zero-filled series of n samples on the canonical week grid.
TimeSeries make_week_series(std::size_t n = kWeekSamples);

// One day-of-week [start,end] clip, minutes past midnight, end inclusive on
// the sample grid. Day 0 is the first day of the series (Sunday on the
// canonical grid).
struct DayWindow {
    int day_index = 0;
    int start_min = 9 * 60;
    int end_min = 18 * 60;
};

// Validates the window and returns the covered samples as a new series.
// 9:00-18:00 on the canonical grid yields 181 samples; a 0:00-24:00 window is
// clamped to the day's 480 samples. Throws std::out_of_range when the window
// lies outside the series and std::invalid_argument when it is malformed or
// not aligned to the sample grid.
TimeSeries slice_window(const TimeSeries& ts, const DayWindow& w);

// Index range [first, last] of a window within the series, same checks.
std::pair<std::size_t, std::size_t> window_bounds(const TimeSeries& ts, const DayWindow& w);

// Signal-to-noise ratio in dB: 10*log10(var(signal) / var(noise)) with
// mean-removed variances. Throws std::invalid_argument on grid mismatch and
// NumericalError when the noise has zero variance.
double snr_db(const TimeSeries& signal, const TimeSeries& noise);

// Population variance (mean removed).
double variance(const std::vector<double>& v);

// ISO-8601 UTC timestamps, e.g. "2014-07-13T00:03:00Z".
std::string format_timestamp(std::int64_t epoch_s);
std::int64_t parse_timestamp(const std::string& s);

} // namespace co2bench
