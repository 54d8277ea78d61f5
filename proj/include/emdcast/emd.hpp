#pragma once

#include "emdcast/series.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emdcast {

enum class BoundaryPolicy { LinearExtrapolation, MirrorReflection, ClampEndpointsAsExtrema };

/// Norm applied to the mean envelope when testing the sifting stop criterion.
enum class StopNorm { MaxAbs, MeanAbs };

enum class Method { EMD, EEMD, CEEMD };

std::string to_string(BoundaryPolicy p);
std::string to_string(StopNorm n);
std::string to_string(Method m);
BoundaryPolicy parse_boundary_policy(const std::string& name);
StopNorm parse_stop_norm(const std::string& name);
Method parse_method(const std::string& name);

struct SiftConfig {
    /// Absolute mean-envelope threshold. Unset means 1e-4 times the input's standard deviation.
    std::optional<double> epsilon;
    int max_sift_iterations = 10;
    /// Unset means floor(log2 N). Explicit values are still capped at floor(log2 N).
    std::optional<int> max_imfs;
    BoundaryPolicy boundary = BoundaryPolicy::LinearExtrapolation;
    StopNorm stop_norm = StopNorm::MaxAbs;

    void validate() const;
};

struct ExtremumPoint {
    double position = 0.0;
    double value = 0.0;
};

struct ExtremaSet {
    std::vector<ExtremumPoint> maxima;
    std::vector<ExtremumPoint> minima;
    bool includes_synthetic_endpoints = false;
};

struct EnvelopePair {
    std::vector<double> lower;
    std::vector<double> upper;
};

struct SiftResult {
    std::vector<double> h;
    std::vector<double> mean_envelope;
};

enum class SiftStop { Converged, IterationCap, Degenerate };

struct ImfResult {
    std::vector<double> imf;
    int iterations_used = 0;
    SiftStop stop = SiftStop::IterationCap;
};

struct Decomposition {
    std::vector<std::vector<double>> imfs;
    std::vector<double> residual;
    Method method = Method::EMD;
    SiftConfig config;
    /// Sift iterations per IMF; empty for ensemble methods.
    std::vector<int> sift_iterations;

    std::size_t size() const noexcept { return residual.size(); }
    std::size_t imf_count() const noexcept { return imfs.size(); }
};

/// floor(log2 n), the IMF ceiling for a series of n samples.
int max_imf_count(std::size_t n);

/// Interior strict local extrema; a plateau yields one extremum at its center (rounded down).
ExtremaSet find_extrema(std::span<const double> x);

/// Adds synthetic extrema beyond both ends so the envelopes cover [0, N-1].
ExtremaSet extend_extrema(const ExtremaSet& extrema, std::span<const double> x,
                          BoundaryPolicy policy);

/// Natural cubic spline through the points, sampled at 0..n-1.
std::vector<double> envelope(std::span<const ExtremumPoint> points, std::size_t n);

EnvelopePair envelopes(std::span<const double> x, BoundaryPolicy policy);

/// One application of h = x - (LE + UE) / 2. Throws MonotoneSignal when x lacks
/// either a maximum or a minimum.
SiftResult sift_once(std::span<const double> x, const SiftConfig& config);

/// Repeats sift_once until the mean envelope norm drops to epsilon or the
/// iteration cap is reached. Throws MonotoneSignal if x cannot be sifted at all.
ImfResult extract_imf(std::span<const double> x, const SiftConfig& config);

/// Non-strict monotonicity test (equal neighbours allowed).
bool is_monotone(std::span<const double> x);

Decomposition emd(std::span<const double> x, const SiftConfig& config = {});
Decomposition emd(const TimeSeries& x, const SiftConfig& config = {});

/// Elementwise sum of every IMF and the residual.
std::vector<double> reconstruct(const Decomposition& d);

} // namespace emdcast
