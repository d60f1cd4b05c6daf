#pragma once

#include <string>
#include <vector>

#include "co2bench/blind_id.hpp"
#include "co2bench/dataset.hpp"

namespace co2bench {

enum class Method { baseline, kernel };
const char* method_name(Method m);
// Throws ConfigError listing the valid names for anything unknown.
Method parse_method(const std::string& name);

// One weekday clipped out of a dataset, ready for blind identification.
// y is the noisy CO2 minus the outdoor level; the references keep the
// noiseless CO2 (same offset) and the true headcount for scoring.
struct DayProblem {
    int day_index = 0;          // 0 = first day of the dataset (a Sunday)
    BlindIdProblem problem;
    std::vector<double> co2_ref;
    std::vector<double> occ_ref;
    // One person's one-step CO2 increment in a sealed room (ppm): the
    // physical size of the response's first tap, used to anchor the
    // integer-snap scale search. Filled from the dataset's room sidecar.
    double ppm_per_person_step = 7.6e-6 * 180.0 * 1e6 / 232.0;
};

struct BenchOptions {
    int order = 30;
    int start_min = 9 * 60;   // evaluation window, minutes of day
    int end_min = 18 * 60;
    KernelOptions kernel;
};

// The five working days (Monday..Friday) of a simulated week. Door events
// are taken from the occupancy channel's change points inside the window;
// levels themselves are never passed on. Throws ConfigError when the dataset
// does not cover a full canonical week.
std::vector<DayProblem> extract_day_problems(const Dataset& ds, const BenchOptions& opts);

struct DayEval {
    int day_index = 0;
    bool ok = false;
    std::string error;          // why the day was skipped, when !ok
    double fit_co2 = 0.0;
    double fit_occupancy = 0.0;
    bool converged = false;
    int order_used = 0;
    BlindIdResult result;       // raw estimate (unit-q-norm scale)
    // Window traces for plotting: model output and snapped headcount.
    std::vector<double> co2_hat;
    std::vector<double> occ_hat;
};

struct MethodReport {
    std::string dataset;
    Method method = Method::kernel;
    int start_min = 9 * 60; // evaluation window actually used
    int end_min = 18 * 60;
    std::vector<DayEval> days;

    int days_ok() const;
    // Averages over the evaluated days; NaN when every day failed.
    double avg_fit_co2() const;
    double avg_fit_occupancy() const;
};

// Solves one extracted day with the chosen method. The direct method gets
// its order clamped to the largest value (at most floor(N/p)) that keeps
// the lifted regressor full column rank on this day's events — higher
// orders make shifted segment indicators vanish or collide; the kernel
// order is clamped to N-1. order_used records the clamp. Occupancy is
// scored after an integer snap of the recovered levels; responses long
// enough to resolve the one-step-per-person rise (order >= 15) anchor the
// snap scale to ppm_per_person_step.
DayEval evaluate_day(const DayProblem& dp, Method method, const BenchOptions& opts);

// Full sweep: every dataset, every method, every working day, in the order
// given. Day failures are recorded in the report instead of thrown.
std::vector<MethodReport> run_benchmark(const std::vector<Dataset>& datasets,
                                        const std::vector<Method>& methods,
                                        const BenchOptions& opts);

// dataset,day,method,fit_co2,fit_occupancy,converged per evaluated day;
// fits with four decimals; failed days keep empty fit cells.
std::string report_to_csv(const std::vector<MethodReport>& reports);

// Aligned per-dataset averages, one line per dataset x method.
std::string summary_table(const std::vector<MethodReport>& reports);

} // namespace co2bench
