#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "co2bench/params.hpp"
#include "co2bench/time_series.hpp"

namespace co2bench {

// Everything a simulated week produces. All channels share one grid.
struct Dataset {
    TimeSeries occupancy;            // persons, integer-valued
    TimeSeries co2;                  // ppm, noiseless
    TimeSeries co2_noise;            // ppm, what a sensor would report
    TimeSeries outflow_leakages;     // m^3/s
    TimeSeries inflow_leakages;      // m^3/s
    TimeSeries outflow_ventilation;  // m^3/s
    TimeSeries inflow_ventilation;   // m^3/s
    TimeSeries ventilation_control;  // dimensionless in [0,1]
    TimeSeries window_opening;       // fraction in [0,1]

    // Sidecar metadata, stored next to the CSV.
    std::string scenario;        // e.g. "kth_mowc"
    std::uint64_t seed = 0;
    json params;                 // {"room": ..., "controller": ..., "noise": ...}

    std::size_t size() const { return co2.size(); }
};

// CSV column order; "timestamp" comes first, then these nine channels.
inline constexpr std::array<const char*, 9> kChannelNames = {
    "occupancy",         "co2",
    "co2_noise",         "outflow_leakages",
    "inflow_leakages",   "outflow_ventilation",
    "inflow_ventilation", "ventilation_control",
    "window_opening"};

// Channel access by CSV position; throws std::out_of_range for bad indices.
TimeSeries& channel(Dataset& ds, std::size_t i);
const TimeSeries& channel(const Dataset& ds, std::size_t i);

// Grid consistency, integer non-negative occupancy, window fraction in [0,1].
// Throws FormatError naming the offending channel.
void validate_dataset(const Dataset& ds);

// Writes <path> as CSV and the metadata sidecar with the extension replaced
// by ".json". Doubles are printed in shortest round-trip form, so a
// read-back reproduces every bit.
void write_dataset(const Dataset& ds, const std::string& csv_path);

// Reads a CSV plus its sidecar; validates header names/order, column counts,
// grid uniformity. Errors mention the file, line, and column involved.
Dataset read_dataset(const std::string& csv_path);

// Shortest decimal form of x that parses back to exactly x.
std::string format_double(double x);
// Strict full-string double parse; throws FormatError.
double parse_double(const std::string& s, const std::string& where);

std::string sidecar_path(const std::string& csv_path);

} // namespace co2bench
