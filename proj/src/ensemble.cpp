#include "emdcast/ensemble.hpp"

#include "emdcast/error.hpp"
#include "emdcast/series.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace emdcast {

void EnsembleConfig::validate(Method method) const {
    if (num_ensembles < 1) {
        throw InputError("number of ensembles must be at least 1");
    }
    if (method == Method::CEEMD && num_ensembles % 2 != 0) {
        throw InputError("CEEMD needs an even number of ensembles (noise pairs)");
    }
    if (!(noise_std_fraction >= 0.0) || !std::isfinite(noise_std_fraction)) {
        throw InputError("noise_std_fraction must be finite and non-negative");
    }
    sift.validate();
}

std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                      static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t words[2];
    seq.generate(std::begin(words), std::end(words));
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::vector<double> white_noise(std::size_t n, double std, std::uint64_t stream_seed) {
    std::vector<double> out(n, 0.0);
    if (std == 0.0) {
        return out;
    }
    if (!(std > 0.0)) {
        throw InputError("noise standard deviation must be non-negative");
    }
    std::mt19937_64 rng(stream_seed);
    std::normal_distribution<double> gauss(0.0, std);
    for (auto& v : out) {
        v = gauss(rng);
    }
    return out;
}

namespace {

// Member e of the ensemble; CEEMD pairs (2p, 2p+1) share stream p with opposite signs.
std::vector<double> member_noise(Method method, std::size_t n, double noise_std,
                                 const EnsembleConfig& config, int member) {
    if (method == Method::CEEMD) {
        auto w = white_noise(n, noise_std,
                             derive_stream_seed(config.master_seed, static_cast<std::uint64_t>(member / 2)));
        if (member % 2 == 1) {
            for (auto& v : w) {
                v = -v;
            }
        }
        return w;
    }
    return white_noise(n, noise_std,
                       derive_stream_seed(config.master_seed, static_cast<std::uint64_t>(member)));
}

// Per-mode Neumaier accumulation in fixed member order; modes first seen late are
// implicitly zero for earlier members.
class ModeAccumulator {
public:
    explicit ModeAccumulator(std::size_t n) : n_(n), residual_(n) {}

    void add(const Decomposition& d) {
        while (modes_.size() < d.imfs.size()) {
            modes_.emplace_back(n_);
        }
        for (std::size_t k = 0; k < d.imfs.size(); ++k) {
            modes_[k].add(d.imfs[k]);
        }
        residual_.add(d.residual);
        ++count_;
    }

    Decomposition mean(Method method, const SiftConfig& sift) const {
        Decomposition d;
        d.method = method;
        d.config = sift;
        const double denom = static_cast<double>(count_);
        for (const auto& m : modes_) {
            d.imfs.push_back(m.scaled(denom));
        }
        d.residual = residual_.scaled(denom);
        return d;
    }

private:
    struct Sum {
        explicit Sum(std::size_t n) : total(n, 0.0), comp(n, 0.0) {}
        void add(std::span<const double> v) {
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double t = total[i] + v[i];
                if (std::abs(total[i]) >= std::abs(v[i])) {
                    comp[i] += (total[i] - t) + v[i];
                } else {
                    comp[i] += (v[i] - t) + total[i];
                }
                total[i] = t;
            }
        }
        std::vector<double> scaled(double denom) const {
            std::vector<double> out(total.size());
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = (total[i] + comp[i]) / denom;
            }
            return out;
        }
        std::vector<double> total;
        std::vector<double> comp;
    };

    std::size_t n_;
    std::vector<Sum> modes_;
    Sum residual_;
    std::size_t count_ = 0;
};

Decomposition ensemble_decompose(std::span<const double> x, Method method,
                                 const EnsembleConfig& config) {
    config.validate(method);
    if (x.size() < 8) {
        throw InputError("series too short for EMD: " + std::to_string(x.size()) +
                         " samples (need at least 8)");
    }
    const double noise_std = config.noise_std_fraction * stddev(x);
    ModeAccumulator acc(x.size());
    std::vector<double> perturbed(x.size());
    for (int e = 0; e < config.num_ensembles; ++e) {
        const auto w = member_noise(method, x.size(), noise_std, config, e);
        for (std::size_t i = 0; i < x.size(); ++i) {
            perturbed[i] = x[i] + w[i];
        }
        acc.add(emd(perturbed, config.sift));
    }
    return acc.mean(method, config.sift);
}

} // namespace

std::vector<std::vector<double>> injected_noise(Method method, std::size_t n, double noise_std,
                                                const EnsembleConfig& config) {
    config.validate(method);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(config.num_ensembles));
    for (int e = 0; e < config.num_ensembles; ++e) {
        out.push_back(member_noise(method, n, noise_std, config, e));
    }
    return out;
}

Decomposition eemd(std::span<const double> x, const EnsembleConfig& config) {
    return ensemble_decompose(x, Method::EEMD, config);
}

Decomposition ceemd(std::span<const double> x, const EnsembleConfig& config) {
    return ensemble_decompose(x, Method::CEEMD, config);
}

Decomposition decompose(std::span<const double> x, Method method, const EnsembleConfig& config) {
    switch (method) {
    case Method::EMD: return emd(x, config.sift);
    case Method::EEMD: return eemd(x, config);
    case Method::CEEMD: return ceemd(x, config);
    }
    throw InputError("unknown decomposition method");
}

double reconstruction_snr(std::span<const double> x, const Decomposition& d) {
    const auto xhat = reconstruct(d);
    if (xhat.size() != x.size()) {
        throw InputError("SNR needs a decomposition of the same length as the signal");
    }
    double signal = 0.0;
    double error = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        signal += x[i] * x[i];
        error += (x[i] - xhat[i]) * (x[i] - xhat[i]);
    }
    if (signal == 0.0) {
        throw InputError("SNR is undefined for an all-zero signal");
    }
    if (error == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(signal / error);
}

} // namespace emdcast
