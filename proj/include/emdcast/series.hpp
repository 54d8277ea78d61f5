#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace emdcast {

using Timestamp = std::chrono::sys_seconds;

/// Uniformly sampled series. Immutable after construction; every sample is finite.
class TimeSeries {
public:
    TimeSeries(std::string name, Timestamp start, std::vector<double> values,
               std::chrono::seconds step = std::chrono::hours(1));

    /// Convenience constructor starting at the Unix epoch.
    explicit TimeSeries(std::vector<double> values, std::string name = "series");

    const std::string& name() const noexcept { return name_; }
    Timestamp start_time() const noexcept { return start_; }
    std::chrono::seconds step() const noexcept { return step_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    Timestamp time_at(std::size_t i) const;

    /// Samples [begin, end) with the matching start time.
    TimeSeries slice(std::size_t begin, std::size_t end) const;
    /// Same timing and name, new values (length may differ).
    TimeSeries with_values(std::vector<double> values) const;

private:
    std::string name_;
    Timestamp start_;
    std::chrono::seconds step_;
    std::vector<double> values_;
};

struct ScaleParams {
    double observed_min = 0.0;
    double observed_max = 1.0;
    double target_low = -1.0;
    double target_high = 1.0;

    void validate() const;
};

struct Sinusoid {
    double amplitude = 1.0;
    double period_hours = 24.0;
    double phase = 0.0;
};

struct SynthSpec {
    std::size_t length = 1024;
    double level = 0.0;
    std::vector<Sinusoid> sinusoids;
    double ar1_coefficient = 0.0;
    double noise_std = 0.0;
    double trend_slope = 0.0;
    bool clip_at_zero = false;
    std::uint64_t seed = 0;

    void validate() const;
};

enum class Preset { Load, Wind };

std::string to_string(Preset p);
Preset parse_preset(const std::string& name);

/// Default generator settings for the load-like and wind-like presets.
SynthSpec preset_spec(Preset preset, std::size_t length, std::uint64_t seed);

TimeSeries load_csv(const std::filesystem::path& path);
void write_csv(const TimeSeries& ts, const std::filesystem::path& path);

std::pair<TimeSeries, ScaleParams> normalize(const TimeSeries& ts, double target_low = -1.0,
                                             double target_high = 1.0);
TimeSeries denormalize(const TimeSeries& ts, const ScaleParams& params);

TimeSeries synth_generate(const SynthSpec& spec);

std::pair<TimeSeries, TimeSeries> train_test_split(const TimeSeries& ts, double train_fraction);

std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(const std::string& text);

double mean(std::span<const double> x);
double stddev(std::span<const double> x);

} // namespace emdcast
