#include "co2bench/fit_metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "co2bench/errors.hpp"

namespace co2bench {

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, const char* who) {
    if (a.size() != b.size()) throw std::invalid_argument(std::string(who) + ": length mismatch");
    if (a.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
}

} // namespace

double fit_co2(std::span<const double> y_hat, std::span<const double> y_ref) {
    check_pair(y_hat, y_ref, "fit_co2");
    double mean = 0.0;
    for (double v : y_ref) mean += v;
    mean /= static_cast<double>(y_ref.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < y_ref.size(); ++i) {
        num += (y_hat[i] - y_ref[i]) * (y_hat[i] - y_ref[i]);
        den += (y_ref[i] - mean) * (y_ref[i] - mean);
    }
    if (den <= 0.0) throw NumericalError("fit_co2: reference has zero variance");
    return 1.0 - std::sqrt(num / den);
}

double fit_occupancy(std::span<const double> o_hat, std::span<const double> o_ref) {
    check_pair(o_hat, o_ref, "fit_occupancy");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < o_ref.size(); ++i) {
        num += (o_hat[i] - o_ref[i]) * (o_hat[i] - o_ref[i]);
        den += o_ref[i] * o_ref[i];
    }
    if (den <= 0.0) throw NumericalError("fit_occupancy: reference signal is identically zero");
    return 1.0 - std::sqrt(num / den);
}

} // namespace co2bench
