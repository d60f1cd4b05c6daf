#pragma once

#include <span>

namespace co2bench {

// Goodness of fit on a 0..1-ish scale (1 is exact, negative is worse than
// the trivial predictor). Both throw std::invalid_argument on length
// mismatch or empty input and NumericalError when the denominator is zero.

// 1 - sqrt(sum (yh - y)^2 / sum (y - mean(y))^2): errors measured against
// the spread of the reference, so constant offsets in y do not change the
// denominator.
double fit_co2(std::span<const double> y_hat, std::span<const double> y_ref);

// 1 - sqrt(sum (oh - o)^2 / sum o^2): errors measured against the raw signal
// energy, which keeps "always zero" from scoring well on sparse occupancy.
double fit_occupancy(std::span<const double> o_hat, std::span<const double> o_ref);

} // namespace co2bench
