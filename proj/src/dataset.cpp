#include "co2bench/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "co2bench/errors.hpp"

namespace co2bench {

TimeSeries& channel(Dataset& ds, std::size_t i) {
    switch (i) {
        case 0: return ds.occupancy;
        case 1: return ds.co2;
        case 2: return ds.co2_noise;
        case 3: return ds.outflow_leakages;
        case 4: return ds.inflow_leakages;
        case 5: return ds.outflow_ventilation;
        case 6: return ds.inflow_ventilation;
        case 7: return ds.ventilation_control;
        case 8: return ds.window_opening;
    }
    throw std::out_of_range("channel index out of range");
}

const TimeSeries& channel(const Dataset& ds, std::size_t i) {
    return channel(const_cast<Dataset&>(ds), i);
}

void validate_dataset(const Dataset& ds) {
    for (std::size_t i = 0; i < kChannelNames.size(); ++i) {
        const TimeSeries& ts = channel(ds, i);
        if (!ts.same_grid(ds.co2))
            throw FormatError(std::string("dataset channel '") + kChannelNames[i] +
                              "' is not on the same grid as 'co2'");
    }
    for (double v : ds.occupancy.values) {
        if (v < 0.0 || v != std::floor(v))
            throw FormatError("dataset channel 'occupancy' must hold non-negative integers");
    }
    for (double v : ds.window_opening.values) {
        if (v < 0.0 || v > 1.0)
            throw FormatError("dataset channel 'window_opening' must lie in [0,1]");
    }
}

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& where) {
    double x = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{} || res.ptr != last)
        throw FormatError(where + ": cannot parse '" + s + "' as a number");
    return x;
}

std::string sidecar_path(const std::string& csv_path) {
    const auto dot = csv_path.find_last_of('.');
    const auto slash = csv_path.find_last_of("/\\");
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? csv_path.substr(0, dot) : csv_path) + ".json";
}

void write_dataset(const Dataset& ds, const std::string& csv_path) {
    validate_dataset(ds);
    std::ofstream out(csv_path);
    if (!out) throw FormatError("cannot open for writing: " + csv_path);

    out << "timestamp";
    for (const char* name : kChannelNames) out << ',' << name;
    out << '\n';
    const std::size_t n = ds.size();
    for (std::size_t i = 0; i < n; ++i) {
        out << format_timestamp(ds.co2.time_at(i));
        for (std::size_t c = 0; c < kChannelNames.size(); ++c)
            out << ',' << format_double(channel(ds, c).values[i]);
        out << '\n';
    }
    if (!out) throw FormatError("write failed: " + csv_path);
    out.close();

    json meta;
    meta["scenario"] = ds.scenario;
    meta["seed"] = ds.seed;
    meta["start_time"] = format_timestamp(ds.co2.start_time);
    meta["step_s"] = ds.co2.step_s;
    meta["samples"] = n;
    meta["params"] = ds.params.is_null() ? json::object() : ds.params;
    std::ofstream jout(sidecar_path(csv_path));
    if (!jout) throw FormatError("cannot open for writing: " + sidecar_path(csv_path));
    jout << meta.dump(2) << '\n';
    if (!jout) throw FormatError("write failed: " + sidecar_path(csv_path));
}

namespace {

void split_csv_line(const std::string& line, std::vector<std::string>& out) {
    out.clear();
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            out.push_back(line.substr(pos));
            return;
        }
        out.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
}

} // namespace

Dataset read_dataset(const std::string& csv_path) {
    std::ifstream in(csv_path);
    if (!in) throw FormatError("cannot open: " + csv_path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError(csv_path + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    split_csv_line(line, cells);
    if (cells.size() != kChannelNames.size() + 1)
        throw FormatError(csv_path + ": expected " + std::to_string(kChannelNames.size() + 1) +
                          " columns in header, got " + std::to_string(cells.size()));
    if (cells[0] != "timestamp")
        throw FormatError(csv_path + ": first column must be 'timestamp', got '" + cells[0] + "'");
    for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
        if (cells[c + 1] != kChannelNames[c])
            throw FormatError(csv_path + ": column " + std::to_string(c + 2) + " must be '" +
                              kChannelNames[c] + "', got '" + cells[c + 1] + "'");
    }

    Dataset ds;
    std::vector<std::int64_t> times;
    std::vector<std::vector<double>> cols(kChannelNames.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        split_csv_line(line, cells);
        if (cells.size() != kChannelNames.size() + 1)
            throw FormatError(csv_path + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(kChannelNames.size() + 1) + " cells, got " +
                              std::to_string(cells.size()));
        times.push_back(parse_timestamp(cells[0]));
        for (std::size_t c = 0; c < kChannelNames.size(); ++c)
            cols[c].push_back(parse_double(cells[c + 1], csv_path + ":" + std::to_string(line_no) +
                                                             " column '" + kChannelNames[c] + "'"));
    }
    if (times.empty()) throw FormatError(csv_path + ": no data rows");

    const std::int64_t start = times.front();
    const std::int64_t step = times.size() > 1 ? times[1] - times[0] : kStepSeconds;
    if (step <= 0) throw FormatError(csv_path + ": timestamps are not increasing");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] != start + static_cast<std::int64_t>(i) * step)
            throw FormatError(csv_path + ": non-uniform timestamp at row " + std::to_string(i + 2));
    }

    for (std::size_t c = 0; c < kChannelNames.size(); ++c) {
        TimeSeries& ts = channel(ds, c);
        ts.start_time = start;
        ts.step_s = static_cast<int>(step);
        ts.values = std::move(cols[c]);
    }

    const std::string meta_path = sidecar_path(csv_path);
    std::ifstream jin(meta_path);
    if (!jin) throw FormatError("cannot open metadata sidecar: " + meta_path);
    json meta;
    try {
        jin >> meta;
    } catch (const json::parse_error& e) {
        throw FormatError(meta_path + ": " + e.what());
    }
    ds.scenario = meta.value("scenario", std::string{});
    ds.seed = meta.value("seed", std::uint64_t{0});
    ds.params = meta.contains("params") ? meta["params"] : json::object();

    validate_dataset(ds);
    return ds;
}

} // namespace co2bench
