#pragma once

#include <span>

namespace emdcast {

/// Mean absolute percentage error, (1/L) sum |f - y| / y * 100. The denominator is y
/// itself (not |y|); any zero actual value is rejected.
double mape(std::span<const double> actual, std::span<const double> forecast);

/// sqrt(sum (f - y)^2 / L).
double rmse(std::span<const double> actual, std::span<const double> forecast);

} // namespace emdcast
