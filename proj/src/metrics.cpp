#include "emdcast/metrics.hpp"

#include "emdcast/error.hpp"

#include <cmath>
#include <string>

namespace emdcast {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> forecast) {
    if (actual.size() != forecast.size()) {
        throw InputError("metric inputs differ in length (" + std::to_string(actual.size()) +
                         " vs " + std::to_string(forecast.size()) + ")");
    }
    if (actual.empty()) {
        throw InputError("metric inputs are empty");
    }
}

} // namespace

double mape(std::span<const double> actual, std::span<const double> forecast) {
    check_pair(actual, forecast);
    double sum = 0.0;
    for (std::size_t l = 0; l < actual.size(); ++l) {
        if (actual[l] == 0.0) {
            throw InputError("MAPE denominator is zero at test point " + std::to_string(l));
        }
        sum += std::abs(forecast[l] - actual[l]) / actual[l];
    }
    return sum / static_cast<double>(actual.size()) * 100.0;
}

double rmse(std::span<const double> actual, std::span<const double> forecast) {
    check_pair(actual, forecast);
    double sum = 0.0;
    for (std::size_t l = 0; l < actual.size(); ++l) {
        const double d = forecast[l] - actual[l];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(actual.size()));
}

} // namespace emdcast
