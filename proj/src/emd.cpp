#include "emdcast/emd.hpp"

#include "emdcast/error.hpp"
#include "emdcast/spline.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace emdcast {

std::string to_string(BoundaryPolicy p) {
    switch (p) {
    case BoundaryPolicy::LinearExtrapolation: return "linear";
    case BoundaryPolicy::MirrorReflection: return "mirror";
    case BoundaryPolicy::ClampEndpointsAsExtrema: return "clamp";
    }
    return "?";
}

std::string to_string(StopNorm n) {
    return n == StopNorm::MaxAbs ? "max-abs" : "mean-abs";
}

std::string to_string(Method m) {
    switch (m) {
    case Method::EMD: return "emd";
    case Method::EEMD: return "eemd";
    case Method::CEEMD: return "ceemd";
    }
    return "?";
}

BoundaryPolicy parse_boundary_policy(const std::string& name) {
    if (name == "linear") return BoundaryPolicy::LinearExtrapolation;
    if (name == "mirror") return BoundaryPolicy::MirrorReflection;
    if (name == "clamp") return BoundaryPolicy::ClampEndpointsAsExtrema;
    throw InputError("unknown boundary policy '" + name + "' (expected linear, mirror or clamp)");
}

StopNorm parse_stop_norm(const std::string& name) {
    if (name == "max-abs") return StopNorm::MaxAbs;
    if (name == "mean-abs") return StopNorm::MeanAbs;
    throw InputError("unknown stop norm '" + name + "' (expected max-abs or mean-abs)");
}

Method parse_method(const std::string& name) {
    if (name == "emd") return Method::EMD;
    if (name == "eemd") return Method::EEMD;
    if (name == "ceemd") return Method::CEEMD;
    throw InputError("unknown decomposition method '" + name + "'");
}

void SiftConfig::validate() const {
    if (epsilon && !(*epsilon > 0.0)) {
        throw InputError("sift epsilon must be positive");
    }
    if (max_sift_iterations < 1) {
        throw InputError("max_sift_iterations must be at least 1");
    }
    if (max_imfs && *max_imfs < 1) {
        throw InputError("max_imfs must be at least 1");
    }
}

int max_imf_count(std::size_t n) {
    return n == 0 ? 0 : static_cast<int>(std::bit_width(n)) - 1;
}

ExtremaSet find_extrema(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 3) {
        throw InputError("extrema detection needs at least 3 samples");
    }
    ExtremaSet out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (x[i] == x[i - 1]) {
            ++i;
            continue;
        }
        const bool rising = x[i] > x[i - 1];
        std::size_t j = i;
        while (j + 1 < n && x[j + 1] == x[i]) {
            ++j;
        }
        if (j + 1 >= n) {
            break; // flat run reaching the last sample
        }
        const auto center = static_cast<double>((i + j) / 2);
        if (rising && x[j + 1] < x[i]) {
            out.maxima.push_back({center, x[i]});
        } else if (!rising && x[j + 1] > x[i]) {
            out.minima.push_back({center, x[i]});
        }
        i = j + 1;
    }
    return out;
}

namespace {

enum class Kind { Max, Min };

double guard(Kind kind, double extrapolated, double endpoint) {
    return kind == Kind::Max ? std::max(extrapolated, endpoint) : std::min(extrapolated, endpoint);
}

std::vector<ExtremumPoint> clamp_ends(const std::vector<ExtremumPoint>& pts,
                                      std::span<const double> x) {
    const double last = static_cast<double>(x.size() - 1);
    std::vector<ExtremumPoint> out;
    out.reserve(pts.size() + 2);
    if (pts.empty() || pts.front().position > 0.0) {
        out.push_back({0.0, x.front()});
    }
    out.insert(out.end(), pts.begin(), pts.end());
    if (out.back().position < last) {
        out.push_back({last, x.back()});
    }
    return out;
}

std::vector<ExtremumPoint> linear_ends(const std::vector<ExtremumPoint>& pts,
                                       std::span<const double> x, Kind kind) {
    if (pts.size() < 2) {
        return clamp_ends(pts, x);
    }
    const double last = static_cast<double>(x.size() - 1);
    std::vector<ExtremumPoint> out;
    out.reserve(pts.size() + 2);

    {
        const auto& a = pts[0];
        const auto& b = pts[1];
        const double gap = b.position - a.position;
        const double steps = std::max(1.0, std::ceil(a.position / gap));
        const double pos = a.position - steps * gap;
        const double slope = (b.value - a.value) / gap;
        out.push_back({pos, guard(kind, a.value + slope * (pos - a.position), x.front())});
    }
    out.insert(out.end(), pts.begin(), pts.end());
    {
        const auto& a = pts[pts.size() - 2];
        const auto& b = pts[pts.size() - 1];
        const double gap = b.position - a.position;
        const double steps = std::max(1.0, std::ceil((last - b.position) / gap));
        const double pos = b.position + steps * gap;
        const double slope = (b.value - a.value) / gap;
        out.push_back({pos, guard(kind, b.value + slope * (pos - b.position), x.back())});
    }
    return out;
}

std::vector<ExtremumPoint> mirror_ends(const std::vector<ExtremumPoint>& pts,
                                       std::span<const double> x) {
    const double last = static_cast<double>(x.size() - 1);
    std::vector<ExtremumPoint> out;
    out.reserve(pts.size() + 2);
    out.push_back({-pts.front().position, pts.front().value});
    out.insert(out.end(), pts.begin(), pts.end());
    out.push_back({2.0 * last - pts.back().position, pts.back().value});
    return out;
}

} // namespace

ExtremaSet extend_extrema(const ExtremaSet& extrema, std::span<const double> x,
                          BoundaryPolicy policy) {
    if (x.size() < 2) {
        throw InputError("boundary extension needs at least 2 samples");
    }
    ExtremaSet out;
    out.includes_synthetic_endpoints = true;
    switch (policy) {
    case BoundaryPolicy::ClampEndpointsAsExtrema:
        out.maxima = clamp_ends(extrema.maxima, x);
        out.minima = clamp_ends(extrema.minima, x);
        break;
    case BoundaryPolicy::LinearExtrapolation:
    case BoundaryPolicy::MirrorReflection:
        if (extrema.maxima.empty() || extrema.minima.empty()) {
            throw MonotoneSignal("boundary policy " + to_string(policy) +
                                 " needs at least one maximum and one minimum");
        }
        if (policy == BoundaryPolicy::LinearExtrapolation) {
            out.maxima = linear_ends(extrema.maxima, x, Kind::Max);
            out.minima = linear_ends(extrema.minima, x, Kind::Min);
        } else {
            out.maxima = mirror_ends(extrema.maxima, x);
            out.minima = mirror_ends(extrema.minima, x);
        }
        break;
    }
    return out;
}

std::vector<double> envelope(std::span<const ExtremumPoint> points, std::size_t n) {
    if (points.size() < 2) {
        throw InputError("envelope needs at least 2 points");
    }
    std::vector<double> t(points.size());
    std::vector<double> y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        t[i] = points[i].position;
        y[i] = points[i].value;
    }
    return NaturalSpline(std::move(t), std::move(y)).sample(n);
}

EnvelopePair envelopes(std::span<const double> x, BoundaryPolicy policy) {
    const auto raw = find_extrema(x);
    if (raw.maxima.empty() || raw.minima.empty()) {
        throw MonotoneSignal("signal has no interior maximum/minimum pair");
    }
    const auto ext = extend_extrema(raw, x, policy);
    return {envelope(ext.minima, x.size()), envelope(ext.maxima, x.size())};
}

SiftResult sift_once(std::span<const double> x, const SiftConfig& config) {
    const auto env = envelopes(x, config.boundary);
    SiftResult r;
    r.h.resize(x.size());
    r.mean_envelope.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        r.mean_envelope[i] = (env.lower[i] + env.upper[i]) / 2.0;
        r.h[i] = x[i] - r.mean_envelope[i];
    }
    return r;
}

namespace {

double envelope_norm(std::span<const double> m, StopNorm norm) {
    double acc = 0.0;
    for (double v : m) {
        acc = norm == StopNorm::MaxAbs ? std::max(acc, std::abs(v)) : acc + std::abs(v);
    }
    return norm == StopNorm::MaxAbs ? acc : acc / static_cast<double>(m.size());
}

} // namespace

ImfResult extract_imf(std::span<const double> x, const SiftConfig& config) {
    config.validate();
    const double eps = config.epsilon.value_or(1e-4 * stddev(x));
    std::vector<double> current(x.begin(), x.end());
    for (int it = 1; it <= config.max_sift_iterations; ++it) {
        SiftResult step;
        try {
            step = sift_once(current, config);
        } catch (const MonotoneSignal&) {
            if (it == 1) {
                throw;
            }
            return {std::move(current), it - 1, SiftStop::Degenerate};
        }
        current = std::move(step.h);
        if (envelope_norm(step.mean_envelope, config.stop_norm) <= eps) {
            return {std::move(current), it, SiftStop::Converged};
        }
    }
    return {std::move(current), config.max_sift_iterations, SiftStop::IterationCap};
}

bool is_monotone(std::span<const double> x) {
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < x.size(); ++i) {
        up = up && x[i] >= x[i - 1];
        down = down && x[i] <= x[i - 1];
    }
    return up || down;
}

Decomposition emd(std::span<const double> x, const SiftConfig& config) {
    config.validate();
    if (x.size() < 8) {
        throw InputError("series too short for EMD: " + std::to_string(x.size()) +
                         " samples (need at least 8)");
    }
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw InputError("EMD input contains a non-finite sample");
        }
    }
    const int cap = max_imf_count(x.size());
    const int limit = std::min(config.max_imfs.value_or(cap), cap);

    SiftConfig sift = config;
    const double sd = stddev(x);
    if (!sift.epsilon) {
        sift.epsilon = sd > 0.0 ? 1e-4 * sd : 1e-300;
    }

    Decomposition d;
    d.method = Method::EMD;
    d.config = config;
    d.residual.assign(x.begin(), x.end());
    while (static_cast<int>(d.imfs.size()) < limit && !is_monotone(d.residual)) {
        ImfResult imf;
        try {
            imf = extract_imf(d.residual, sift);
        } catch (const MonotoneSignal&) {
            break; // a single interior extremum: keep as residual
        }
        for (std::size_t i = 0; i < d.residual.size(); ++i) {
            d.residual[i] -= imf.imf[i];
        }
        d.sift_iterations.push_back(imf.iterations_used);
        d.imfs.push_back(std::move(imf.imf));
    }
    return d;
}

Decomposition emd(const TimeSeries& x, const SiftConfig& config) {
    return emd(x.values(), config);
}

std::vector<double> reconstruct(const Decomposition& d) {
    const std::size_t n = d.residual.size();
    if (n == 0) {
        throw InputError("cannot reconstruct an empty decomposition");
    }
    std::vector<double> out(n, 0.0);
    for (const auto& imf : d.imfs) {
        if (imf.size() != n) {
            throw InputError("decomposition components have mismatched lengths");
        }
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += imf[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] += d.residual[i];
    }
    return out;
}

} // namespace emdcast
