#include "emdcast/series.hpp"

#include "emdcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

namespace emdcast {

namespace {

constexpr std::size_t kAr1WarmUp = 100;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

TimeSeries::TimeSeries(std::string name, Timestamp start, std::vector<double> values,
                       std::chrono::seconds step)
    : name_(std::move(name)), start_(start), step_(step), values_(std::move(values)) {
    if (values_.empty()) {
        throw InputError("time series must contain at least one sample");
    }
    if (step_.count() <= 0) {
        throw InputError("time series step must be positive");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InputError("time series sample " + std::to_string(i) + " is not finite");
        }
    }
}

TimeSeries::TimeSeries(std::vector<double> values, std::string name)
    : TimeSeries(std::move(name), Timestamp{}, std::move(values)) {}

Timestamp TimeSeries::time_at(std::size_t i) const {
    return start_ + step_ * static_cast<std::int64_t>(i);
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
    if (begin >= end || end > values_.size()) {
        throw InputError("invalid slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                         ") of series with " + std::to_string(values_.size()) + " samples");
    }
    return TimeSeries(name_, time_at(begin),
                      std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin),
                                          values_.begin() + static_cast<std::ptrdiff_t>(end)),
                      step_);
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    return TimeSeries(name_, start_, std::move(values), step_);
}

void ScaleParams::validate() const {
    if (!(observed_min < observed_max)) {
        throw InputError("scale parameters need observed_min < observed_max");
    }
    if (!(target_low < target_high)) {
        throw InputError("scale parameters need target_low < target_high");
    }
}

void SynthSpec::validate() const {
    if (length < 2) {
        throw InputError("synthetic series length must be at least 2");
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
        throw InputError("noise_std must be finite and non-negative");
    }
    if (!(std::abs(ar1_coefficient) < 1.0)) {
        throw InputError("ar1_coefficient must lie in (-1, 1)");
    }
    for (const auto& s : sinusoids) {
        if (!(s.period_hours > 0.0)) {
            throw InputError("sinusoid period must be positive");
        }
    }
}

std::string to_string(Preset p) {
    return p == Preset::Load ? "load" : "wind";
}

Preset parse_preset(const std::string& name) {
    if (name == "load") {
        return Preset::Load;
    }
    if (name == "wind") {
        return Preset::Wind;
    }
    throw InputError("unknown preset '" + name + "' (expected load or wind)");
}

SynthSpec preset_spec(Preset preset, std::size_t length, std::uint64_t seed) {
    SynthSpec spec;
    spec.length = length;
    spec.seed = seed;
    switch (preset) {
    case Preset::Load:
        // MW-scale system load: daily and weekly cycles over a persistent disturbance.
        spec.level = 3500.0;
        spec.sinusoids = {{250.0, 24.0, 0.0}, {120.0, 168.0, 1.0}};
        spec.ar1_coefficient = 0.9;
        spec.noise_std = 15.0;
        break;
    case Preset::Wind:
        // 20 MW farm: weak half-day cycle, strongly persistent noise, no negative output.
        spec.level = 6.0;
        spec.sinusoids = {{2.0, 12.0, 0.0}};
        spec.ar1_coefficient = 0.95;
        spec.noise_std = 0.8;
        spec.clip_at_zero = true;
        break;
    }
    return spec;
}

std::string format_timestamp(Timestamp t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

Timestamp parse_timestamp(const std::string& text) {
    int y = 0;
    unsigned mo = 0;
    unsigned d = 0;
    int h = 0;
    int mi = 0;
    int s = 0;
    char tail = '\0';
    int consumed = 0;
    const int n = std::sscanf(text.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%c%n", &y, &mo, &d, &h, &mi, &s,
                              &tail, &consumed);
    if (n != 7 || tail != 'Z' || static_cast<std::size_t>(consumed) != text.size()) {
        throw InputError("malformed timestamp '" + text + "' (expected YYYY-MM-DDTHH:MM:SSZ)");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                          std::chrono::day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59 || h < 0 || mi < 0 || s < 0) {
        throw InputError("invalid calendar timestamp '" + text + "'");
    }
    return std::chrono::sys_days{ymd} + std::chrono::hours(h) + std::chrono::minutes(mi) +
           std::chrono::seconds(s);
}

TimeSeries load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    std::string line;
    if (!std::getline(in, line) || trim(line) != "timestamp,value") {
        throw InputError(path.string() + ":1: expected header 'timestamp,value'");
    }
    std::vector<double> values;
    Timestamp start{};
    Timestamp previous{};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string row = trim(line);
        if (row.empty()) {
            continue;
        }
        const auto where = path.string() + ":" + std::to_string(line_no) + ": ";
        const auto comma = row.find(',');
        if (comma == std::string::npos || row.find(',', comma + 1) != std::string::npos) {
            throw InputError(where + "malformed row, expected two fields");
        }
        Timestamp t;
        try {
            t = parse_timestamp(trim(row.substr(0, comma)));
        } catch (const InputError& e) {
            throw InputError(where + e.what());
        }
        const std::string field = trim(row.substr(comma + 1));
        double v = 0.0;
        std::size_t used = 0;
        try {
            v = std::stod(field, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (field.empty() || used != field.size() || !std::isfinite(v)) {
            throw InputError(where + "non-numeric value '" + field + "'");
        }
        if (values.empty()) {
            start = t;
        } else if (t <= previous) {
            throw InputError(where + "timestamp out of order");
        } else if (t - previous != std::chrono::hours(1)) {
            throw InputError(where + "timestamp gap (expected hourly samples)");
        }
        previous = t;
        values.push_back(v);
    }
    if (values.empty()) {
        throw InputError(path.string() + ": no data rows");
    }
    auto name = path.stem().string();
    return TimeSeries(std::move(name), start, std::move(values));
}

void write_csv(const TimeSeries& ts, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << "timestamp,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out << format_timestamp(ts.time_at(i)) << ',' << ts[i] << '\n';
    }
}

std::pair<TimeSeries, ScaleParams> normalize(const TimeSeries& ts, double target_low,
                                             double target_high) {
    const auto [lo, hi] = std::ranges::minmax(ts.values());
    if (!(lo < hi)) {
        throw InputError("cannot normalize a constant series (zero range)");
    }
    ScaleParams p{lo, hi, target_low, target_high};
    p.validate();
    const double scale = (target_high - target_low) / (hi - lo);
    std::vector<double> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (ts[i] == lo) {
            out[i] = target_low;
        } else if (ts[i] == hi) {
            out[i] = target_high;
        } else {
            out[i] = std::clamp(target_low + (ts[i] - lo) * scale, target_low, target_high);
        }
    }
    return {ts.with_values(std::move(out)), p};
}

TimeSeries denormalize(const TimeSeries& ts, const ScaleParams& params) {
    params.validate();
    const double scale =
        (params.observed_max - params.observed_min) / (params.target_high - params.target_low);
    std::vector<double> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out[i] = params.observed_min + (ts[i] - params.target_low) * scale;
    }
    return ts.with_values(std::move(out));
}

TimeSeries synth_generate(const SynthSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double e = 0.0;
    const auto step_noise = [&] {
        e = spec.ar1_coefficient * e + (spec.noise_std > 0.0 ? spec.noise_std * gauss(rng) : 0.0);
    };
    for (std::size_t i = 0; i < kAr1WarmUp; ++i) {
        step_noise();
    }
    std::vector<double> values(spec.length);
    for (std::size_t n = 0; n < spec.length; ++n) {
        const double t = static_cast<double>(n);
        double v = spec.level + spec.trend_slope * t;
        for (const auto& s : spec.sinusoids) {
            v += s.amplitude * std::sin(2.0 * std::numbers::pi * t / s.period_hours + s.phase);
        }
        step_noise();
        v += e;
        if (spec.clip_at_zero) {
            v = std::max(v, 0.0);
        }
        values[n] = v;
    }
    return TimeSeries("synthetic", Timestamp{}, std::move(values));
}

std::pair<TimeSeries, TimeSeries> train_test_split(const TimeSeries& ts, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InputError("train fraction must lie strictly between 0 and 1");
    }
    const auto cut = static_cast<std::size_t>(
        std::floor(static_cast<double>(ts.size()) * train_fraction));
    if (cut == 0 || cut >= ts.size()) {
        throw InputError("train/test split would leave an empty part");
    }
    return {ts.slice(0, cut), ts.slice(cut, ts.size())};
}

double mean(std::span<const double> x) {
    if (x.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    return s / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(x.size()));
}

} // namespace emdcast
