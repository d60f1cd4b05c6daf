#include "co2bench/time_series.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "co2bench/errors.hpp"

namespace co2bench {

TimeSeries make_week_series(std::size_t n) {
    TimeSeries ts;
    ts.values.assign(n, 0.0);
    return ts;
}

std::pair<std::size_t, std::size_t> window_bounds(const TimeSeries& ts, const DayWindow& w) {
    if (ts.step_s <= 0 || ts.values.empty())
        throw std::invalid_argument("window_bounds: series is empty or has a non-positive step");
    if (86400 % ts.step_s != 0)
        throw std::invalid_argument("window_bounds: step does not divide a day");
    if (w.day_index < 0)
        throw std::out_of_range("window_bounds: negative day index");
    if (w.start_min < 0 || w.end_min > 24 * 60 || w.start_min >= w.end_min)
        throw std::invalid_argument("window_bounds: window minutes must satisfy 0 <= start < end <= 1440");
    const int step_min = ts.step_s / 60;
    if (ts.step_s % 60 != 0 || w.start_min % step_min != 0)
        throw std::invalid_argument("window_bounds: window start is not aligned to the sample grid");

    const std::size_t per_day = static_cast<std::size_t>(86400 / ts.step_s);
    const std::size_t day0 = static_cast<std::size_t>(w.day_index) * per_day;
    const std::size_t first = day0 + static_cast<std::size_t>(w.start_min / step_min);
    // End is inclusive but never spills into the next day.
    std::size_t last = day0 + static_cast<std::size_t>(w.end_min / step_min);
    last = std::min(last, day0 + per_day - 1);
    if (first >= ts.size() || last >= ts.size())
        throw std::out_of_range("window_bounds: window lies outside the series");
    return {first, last};
}

TimeSeries slice_window(const TimeSeries& ts, const DayWindow& w) {
    const auto [first, last] = window_bounds(ts, w);
    TimeSeries out;
    out.start_time = ts.time_at(first);
    out.step_s = ts.step_s;
    out.values.assign(ts.values.begin() + static_cast<std::ptrdiff_t>(first),
                      ts.values.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return out;
}

double variance(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

double snr_db(const TimeSeries& signal, const TimeSeries& noise) {
    if (!signal.same_grid(noise))
        throw std::invalid_argument("snr_db: signal and noise are not on the same grid");
    if (signal.values.empty())
        throw std::invalid_argument("snr_db: empty series");
    const double vs = variance(signal.values);
    const double vn = variance(noise.values);
    if (vn <= 0.0)
        throw NumericalError("snr_db: noise variance is zero");
    return 10.0 * std::log10(vs / vn);
}

std::string format_timestamp(std::int64_t epoch_s) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{epoch_s}};
    const auto dp = floor<days>(tp);
    const year_month_day ymd{dp};
    const hh_mm_ss<seconds> tod{tp - dp};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

std::int64_t parse_timestamp(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char tz = '\0';
    const int got = std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%d%c", &y, &mo, &d, &h, &mi, &sec, &tz);
    if (got < 6 || (got == 7 && tz != 'Z'))
        throw FormatError("parse_timestamp: expected YYYY-MM-DDTHH:MM:SS[Z], got '" + s + "'");
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60)
        throw FormatError("parse_timestamp: invalid calendar date or time in '" + s + "'");
    const sys_days dp{ymd};
    return duration_cast<seconds>(dp.time_since_epoch()).count() + h * 3600 + mi * 60 + sec;
}

} // namespace co2bench
