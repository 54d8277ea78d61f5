#pragma once

#include <span>
#include <vector>

namespace emdcast {

/// Hann-windowed one-sided STFT magnitudes; frames x bins, bins = window/2 + 1.
struct Spectrogram {
    std::vector<std::vector<double>> magnitudes;
    std::size_t frame_hop = 0;
    std::size_t window_length = 0;
    /// Cycles per hour for hourly sampling.
    double bin_width = 0.0;

    std::size_t frames() const noexcept { return magnitudes.size(); }
    std::size_t bins() const noexcept { return window_length / 2 + 1; }
    std::size_t frame_start(std::size_t frame) const noexcept { return frame * frame_hop; }
};

struct PacfResult {
    std::vector<double> values; ///< index = lag, values[0] = 1
    double confidence_band = 0.0;
};

std::vector<double> hann_window(std::size_t length);

/// Partial trailing frames are dropped.
Spectrogram stft(std::span<const double> x, std::size_t window_length = 256, std::size_t hop = 64);

/// Index of the largest magnitude in every frame.
std::vector<std::size_t> dominant_bins(const Spectrogram& s);

/// Sample PACF by Durbin-Levinson on the biased autocovariances.
PacfResult pacf(std::span<const double> x, std::size_t max_lag);

} // namespace emdcast
