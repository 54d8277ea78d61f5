#pragma once

#include "emdcast/emd.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace emdcast {

struct EnsembleConfig {
    int num_ensembles = 100;
    /// Noise standard deviation as a fraction of the input's standard deviation.
    double noise_std_fraction = 0.2;
    std::uint64_t master_seed = 0;
    SiftConfig sift;

    void validate(Method method) const;
};

/// Seed of the i-th ensemble stream; depends only on (master, index).
std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index);

/// i.i.d. N(0, std^2) samples, reproducible from stream_seed.
std::vector<double> white_noise(std::size_t n, double std, std::uint64_t stream_seed);

/// The noise sequence added to the input for every ensemble member, in member order.
/// CEEMD members come in (+w, -w) pairs that share one draw.
std::vector<std::vector<double>> injected_noise(Method method, std::size_t n, double noise_std,
                                                const EnsembleConfig& config);

Decomposition eemd(std::span<const double> x, const EnsembleConfig& config);
Decomposition ceemd(std::span<const double> x, const EnsembleConfig& config);

/// Dispatches on method; EMD ignores the ensemble fields.
Decomposition decompose(std::span<const double> x, Method method, const EnsembleConfig& config);

/// 10 log10(sum x^2 / sum (x - xhat)^2) in dB, xhat = reconstruct(d). Returns
/// +infinity when the reconstruction is exact.
double reconstruction_snr(std::span<const double> x, const Decomposition& d);

} // namespace emdcast
