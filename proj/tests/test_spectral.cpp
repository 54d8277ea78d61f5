#include "emdcast/ensemble.hpp"
#include "emdcast/error.hpp"
#include "emdcast/spectral.hpp"
#include "test_common.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

using namespace emdcast;

namespace {

// Naive one-sided DFT magnitudes of a Hann-windowed frame, written from the definition.
std::vector<double> reference_frame(std::span<const double> x, std::size_t start, std::size_t w) {
    std::vector<double> out(w / 2 + 1);
    for (std::size_t k = 0; k <= w / 2; ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t i = 0; i < w; ++i) {
            const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                      static_cast<double>(w)));
            const double ang = 2.0 * std::numbers::pi * static_cast<double>(k * i) / static_cast<double>(w);
            re += hann * x[start + i] * std::cos(ang);
            im -= hann * x[start + i] * std::sin(ang);
        }
        out[k] = std::hypot(re, im);
    }
    return out;
}

// PACF at lag k as the last Yule-Walker coefficient, solved densely.
std::vector<double> yule_walker_pacf(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(n);
    std::vector<double> r(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        for (std::size_t t = k; t < n; ++t) s += (x[t] - m) * (x[t - k] - m);
        r[k] = s / static_cast<double>(n);
    }
    std::vector<double> out{1.0};
    for (std::size_t k = 1; k <= max_lag; ++k) {
        Eigen::MatrixXd R(k, k);
        Eigen::VectorXd rhs(k);
        for (std::size_t i = 0; i < k; ++i) {
            rhs(static_cast<Eigen::Index>(i)) = r[i + 1];
            for (std::size_t j = 0; j < k; ++j) {
                R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    r[i > j ? i - j : j - i];
            }
        }
        const Eigen::VectorXd phi = R.ldlt().solve(rhs);
        out.push_back(phi(static_cast<Eigen::Index>(k - 1)));
    }
    return out;
}

double dominant_variance(const std::vector<double>& signal, std::size_t window) {
    const auto d = dominant_bins(stft(signal, window, window / 4));
    double m = 0.0;
    for (auto b : d) m += static_cast<double>(b);
    m /= static_cast<double>(d.size());
    double v = 0.0;
    for (auto b : d) v += (static_cast<double>(b) - m) * (static_cast<double>(b) - m);
    return v / static_cast<double>(d.size());
}

} // namespace

TEST(Stft, ShapeAndAxis) {
    const auto x = testutil::gaussian(1000, 1.0, 1);
    const auto s = stft(x);
    EXPECT_EQ(s.window_length, 256u);
    EXPECT_EQ(s.frame_hop, 64u);
    EXPECT_EQ(s.bins(), 129u);
    EXPECT_EQ(s.frames(), (1000u - 256u) / 64u + 1u);
    EXPECT_DOUBLE_EQ(s.bin_width, 1.0 / 256.0);
    EXPECT_EQ(s.frame_start(3), 192u);
    for (const auto& f : s.magnitudes) {
        ASSERT_EQ(f.size(), 129u);
        for (double v : f) {
            EXPECT_GE(v, 0.0);
            EXPECT_TRUE(std::isfinite(v));
        }
    }
}

TEST(Stft, ConstantInputConcentratesAtDc) {
    // A periodic Hann window leaks exactly half the DC magnitude into bin 1; every
    // bin from 2 upwards is empty.
    const std::vector<double> x(256, 1.0);
    for (std::size_t w : {16u, 64u, 128u}) {
        const auto s = stft(x, w, w / 2);
        for (const auto& f : s.magnitudes) {
            EXPECT_NEAR(f[0], static_cast<double>(w) / 2.0, 1e-9);
            EXPECT_NEAR(f[1], f[0] / 2.0, 1e-10 * f[0]);
            for (std::size_t k = 2; k < f.size(); ++k) EXPECT_LE(f[k], 1e-10 * f[0]);
        }
    }
}

TEST(Stft, BinAlignedToneMatchesDirectDft) {
    const auto x = testutil::sine(512, 8.0);
    const auto s = stft(x, 64, 32);
    const auto dom = dominant_bins(s);
    for (std::size_t f = 0; f < s.frames(); ++f) {
        EXPECT_EQ(dom[f], 8u);
        const auto ref = reference_frame(x, s.frame_start(f), 64);
        for (std::size_t k = 0; k < ref.size(); ++k) {
            EXPECT_NEAR(s.magnitudes[f][k], ref[k], 1e-9);
        }
    }
    EXPECT_DOUBLE_EQ(8.0 * s.bin_width, 0.125);
}

TEST(Stft, ZeroInputGivesZeroMagnitudes) {
    const std::vector<double> x(300, 0.0);
    for (const auto& f : stft(x, 64, 16).magnitudes) {
        for (double v : f) EXPECT_EQ(v, 0.0);
    }
}

TEST(Stft, Errors) {
    const std::vector<double> x(100, 1.0);
    EXPECT_THROW(stft(x, 128, 10), InputError);
    EXPECT_THROW(stft(x, 63, 10), InputError);
    EXPECT_THROW(stft(x, 64, 0), InputError);
    EXPECT_EQ(stft(x, 100, 7).frames(), 1u);
}

TEST(Stft, PropertySignFlipInvariance) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto x = testutil::gaussian(700, 2.0, seed);
        auto y = x;
        for (auto& v : y) v = -v;
        const auto a = stft(x, 128, 50);
        const auto b = stft(y, 128, 50);
        for (std::size_t f = 0; f < a.frames(); ++f) {
            for (std::size_t k = 0; k < a.bins(); ++k) {
                EXPECT_NEAR(a.magnitudes[f][k], b.magnitudes[f][k], 1e-12 * (1.0 + a.magnitudes[f][k]));
            }
        }
    }
}

TEST(Stft, PropertyParseval) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const std::size_t w = 32u << seed % 3;
        const auto x = testutil::add(testutil::gaussian(600, 1.0, seed), testutil::sine(600, 7.3, 3.0));
        const auto s = stft(x, w, w / 3);
        for (std::size_t f = 0; f < s.frames(); ++f) {
            double frame_energy = 0.0;
            for (std::size_t i = 0; i < w; ++i) {
                const double hann = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                                          static_cast<double>(w)));
                const double v = hann * x[s.frame_start(f) + i];
                frame_energy += v * v;
            }
            double spectral = 0.0;
            for (std::size_t k = 0; k < s.bins(); ++k) {
                const double weight = (k == 0 || k == w / 2) ? 1.0 : 2.0;
                spectral += weight * s.magnitudes[f][k] * s.magnitudes[f][k];
            }
            spectral /= static_cast<double>(w);
            EXPECT_NEAR(spectral, frame_energy, 1e-6 * frame_energy);
        }
    }
}

TEST(Stft, EmdFourthImfDriftsMoreThanEemdOnBurstyData) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        const std::size_t n = 2048;
        auto x = testutil::add(testutil::sine(n, 96.0), testutil::sine(n, 24.0, 0.5));
        const auto burst = testutil::sine(n, 5.0, 0.8);
        const auto noise = testutil::gaussian(n, 0.05, seed);
        for (std::size_t i = 0; i < n; ++i) {
            if ((i / 256) % 2 == 1) x[i] += burst[i];
            x[i] += noise[i];
        }
        const auto plain = emd(x);
        EnsembleConfig c;
        c.num_ensembles = 100;
        c.master_seed = seed;
        const auto ens = eemd(x, c);
        ASSERT_GE(plain.imf_count(), 4u);
        ASSERT_GE(ens.imf_count(), 4u);
        EXPECT_GT(dominant_variance(plain.imfs[3], 128), dominant_variance(ens.imfs[3], 128));
    }
}

TEST(Pacf, LagZeroOnly) {
    const auto p = pacf(testutil::gaussian(10, 1.0, 1), 0);
    ASSERT_EQ(p.values.size(), 1u);
    EXPECT_EQ(p.values[0], 1.0);
}

TEST(Pacf, Ar1Cutoff) {
    const auto x = testutil::ar1(5000, 0.8, 1.0, 77);
    const auto p = pacf(x, 10);
    EXPECT_NEAR(p.values[1], 0.8, 0.05);
    const double loose = 2.0 / std::sqrt(5000.0) * 1.5;
    int inside = 0;
    for (std::size_t k = 2; k <= 10; ++k) inside += std::abs(p.values[k]) <= loose;
    EXPECT_GT(inside, 9 / 2);
    EXPECT_DOUBLE_EQ(p.confidence_band, 1.96 / std::sqrt(5000.0));
}

TEST(Pacf, WhiteNoiseMostlyInsideBand) {
    const auto x = testutil::gaussian(2000, 1.0, 5);
    const auto p = pacf(x, 40);
    int inside = 0;
    for (std::size_t k = 1; k <= 40; ++k) inside += std::abs(p.values[k]) <= p.confidence_band;
    EXPECT_GE(inside, 36);
}

TEST(Pacf, MatchesYuleWalkerOracle) {
    const auto x = testutil::add(testutil::ar1(800, 0.6, 1.0, 3), testutil::sine(800, 24.0));
    const auto p = pacf(x, 30);
    const auto ref = yule_walker_pacf(x, 30);
    for (std::size_t k = 0; k <= 30; ++k) EXPECT_NEAR(p.values[k], ref[k], 1e-9) << k;
}

TEST(Pacf, Errors) {
    EXPECT_THROW(pacf(std::vector<double>(100, 3.0), 5), InputError);
    EXPECT_THROW(pacf(testutil::gaussian(100, 1.0, 1), 50), InputError);
}

TEST(Pacf, PropertyAffineInvarianceAndBound) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto x = testutil::ar1(600, 0.3 + 0.08 * static_cast<double>(seed), 1.0, seed);
        const double a = seed % 2 == 0 ? 3.5 : -0.25, b = 100.0 * static_cast<double>(seed) - 250.0;
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
        const auto px = pacf(x, 40);
        const auto py = pacf(y, 40);
        EXPECT_EQ(px.values[0], 1.0);
        for (std::size_t k = 0; k <= 40; ++k) {
            EXPECT_NEAR(px.values[k], py.values[k], 1e-9);
            EXPECT_LE(std::abs(px.values[k]), 1.0 + 1e-9);
        }
    }
}
