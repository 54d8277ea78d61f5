#include "emdcast/spectral.hpp"

#include "emdcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace emdcast {

std::vector<double> hann_window(std::size_t length) {
    std::vector<double> w(length);
    for (std::size_t i = 0; i < length; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(length));
    }
    return w;
}

Spectrogram stft(std::span<const double> x, std::size_t window_length, std::size_t hop) {
    if (window_length == 0 || window_length % 2 != 0) {
        throw InputError("STFT window length must be even and positive");
    }
    if (hop == 0) {
        throw InputError("STFT hop must be at least 1");
    }
    if (window_length > x.size()) {
        throw InputError("STFT window (" + std::to_string(window_length) +
                         ") is longer than the series (" + std::to_string(x.size()) + ")");
    }
    Spectrogram s;
    s.frame_hop = hop;
    s.window_length = window_length;
    s.bin_width = 1.0 / static_cast<double>(window_length);

    const auto window = hann_window(window_length);
    const std::size_t bins = window_length / 2 + 1;
    // Twiddle table: exp(-2 pi i k / W) for k in [0, W).
    std::vector<std::complex<double>> twiddle(window_length);
    for (std::size_t k = 0; k < window_length; ++k) {
        twiddle[k] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k) /
                                         static_cast<double>(window_length));
    }
    std::vector<double> frame(window_length);
    for (std::size_t start = 0; start + window_length <= x.size(); start += hop) {
        for (std::size_t i = 0; i < window_length; ++i) {
            frame[i] = window[i] * x[start + i];
        }
        std::vector<double> mags(bins);
        for (std::size_t k = 0; k < bins; ++k) {
            std::complex<double> acc{0.0, 0.0};
            std::size_t phase = 0;
            for (std::size_t i = 0; i < window_length; ++i) {
                acc += frame[i] * twiddle[phase];
                phase += k;
                if (phase >= window_length) {
                    phase -= window_length;
                }
            }
            mags[k] = std::abs(acc);
        }
        s.magnitudes.push_back(std::move(mags));
    }
    return s;
}

std::vector<std::size_t> dominant_bins(const Spectrogram& s) {
    std::vector<std::size_t> out;
    out.reserve(s.frames());
    for (const auto& frame : s.magnitudes) {
        out.push_back(static_cast<std::size_t>(
            std::distance(frame.begin(), std::max_element(frame.begin(), frame.end()))));
    }
    return out;
}

PacfResult pacf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    if (2 * max_lag >= n) {
        throw InputError("PACF max_lag must be below N/2");
    }
    double m = 0.0;
    for (double v : x) {
        m += v;
    }
    m /= static_cast<double>(n);
    std::vector<double> acov(max_lag + 1, 0.0);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            s += (x[t] - m) * (x[t - k] - m);
        }
        acov[k] = s / static_cast<double>(n);
    }
    if (!(acov[0] > 0.0)) {
        throw InputError("PACF is undefined for a constant series");
    }

    PacfResult r;
    r.confidence_band = 1.96 / std::sqrt(static_cast<double>(n));
    r.values.assign(max_lag + 1, 0.0);
    r.values[0] = 1.0;

    std::vector<double> phi(max_lag + 1, 0.0);
    std::vector<double> prev(max_lag + 1, 0.0);
    double v = acov[0];
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double num = acov[k];
        for (std::size_t j = 1; j < k; ++j) {
            num -= prev[j] * acov[k - j];
        }
        const double kappa = num / v;
        phi[k] = kappa;
        for (std::size_t j = 1; j < k; ++j) {
            phi[j] = prev[j] - kappa * prev[k - j];
        }
        v *= (1.0 - kappa * kappa);
        r.values[k] = kappa;
        prev = phi;
    }
    return r;
}

} // namespace emdcast
