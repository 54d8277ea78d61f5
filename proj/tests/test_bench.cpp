#include "emdcast/bench.hpp"
#include "emdcast/error.hpp"
#include "emdcast/io.hpp"
#include "emdcast/metrics.hpp"
#include "test_common.hpp"

#include <gtest/gtest.h>

using namespace emdcast;

namespace {

double direct_mape(const std::vector<double>& y, const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(f[i] - y[i]) / y[i];
    return 100.0 * s / static_cast<double>(y.size());
}

double window_mean(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += v[i];
    return s / static_cast<double>(hi - lo);
}

// End effect: some IMF has its end error at least twice its interior error.
bool boundary_effect_visible(const BoundaryDivergence& b) {
    for (const auto& d : b.per_imf) {
        const double tail = window_mean(d, d.size() - 5, d.size());
        const double interior = window_mean(d, 10, 31);
        if (tail >= 2.0 * interior && tail > 0.0) return true;
    }
    return false;
}

ScenarioOptions short_options(std::size_t steps) {
    ScenarioOptions o;
    o.max_test_steps = steps;
    return o;
}

} // namespace

TEST(Metrics, Examples) {
    const std::vector<double> y{100.0}, f{110.0};
    EXPECT_EQ(mape(y, f), 10.0);
    EXPECT_EQ(mape(y, y), 0.0);
    const std::vector<double> z{0.0, 0.0}, g{3.0, 4.0};
    EXPECT_NEAR(rmse(z, g), std::sqrt(12.5), 1e-12);
    EXPECT_EQ(rmse(g, g), 0.0);
    const std::vector<double> a{1, 2, 3}, b{3.5, 4.5, 5.5};
    EXPECT_NEAR(rmse(a, b), 2.5, 1e-15);
}

TEST(Metrics, Errors) {
    const std::vector<double> y{1.0, 0.0}, f{1.0, 1.0};
    EXPECT_THROW(mape(y, f), InputError);
    const std::vector<double> one{1.0}, none;
    EXPECT_THROW(rmse(one, f), InputError);
    EXPECT_THROW(rmse(none, none), InputError);
    EXPECT_THROW(mape(one, f), InputError);
}

TEST(Metrics, PropertyMatchDirectSummation) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.5, 200.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 300;
        std::vector<double> y(n), f(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = u(rng);
            f[i] = u(rng);
        }
        const double m = direct_mape(y, f);
        const double r = testutil::direct_rmse(y, f);
        EXPECT_NEAR(mape(y, f), m, 1e-12 * m);
        EXPECT_NEAR(rmse(y, f), r, 1e-12 * r);
    }
}

TEST(Scenario, NoDecompositionOnWhiteNoiseSitsAtTheNoiseFloor) {
    const double sigma = 2.0;
    const TimeSeries ts(testutil::gaussian(2000, sigma, 31));
    ForecastConfig cfg;
    cfg.seed = 1;
    auto opt = short_options(0);
    opt.report_mape = false;
    const auto r = run_scenario(Scenario::III, ts, cfg, opt);
    EXPECT_EQ(r.test_points, 400u);
    EXPECT_NEAR(r.rmse, sigma, 0.15 * sigma);
    EXPECT_FALSE(r.mape);
    EXPECT_EQ(r.components, 1u);
    EXPECT_EQ(r.component_forecasts.size(), r.test_points);
}

TEST(Scenario, LoadPresetOrderingSeedOne) {
    SuiteOptions so;
    const auto ts = synth_generate(preset_spec(Preset::Load, 2000, 1));
    const auto cfg = suite_config(so, Engine::ELM, 1);
    DecompositionMemo memo;
    const auto r1 = run_scenario(Scenario::I, ts, cfg, so.scenario, memo.decomposer());
    const auto r2 = run_scenario(Scenario::II, ts, cfg, so.scenario, memo.decomposer());
    const auto r3 = run_scenario(Scenario::III, ts, cfg, so.scenario, memo.decomposer());
    EXPECT_LT(r1.rmse, r3.rmse);
    EXPECT_GT(r2.rmse, r3.rmse);
    ASSERT_TRUE(r1.mape && r2.mape && r3.mape);
    EXPECT_EQ(r1.test_points, 200u);
    EXPECT_EQ(r2.test_points, 200u);
    EXPECT_EQ(r3.test_points, 200u);
    // I and II score against the same realized values.
    EXPECT_EQ(r1.actual, r2.actual);
    EXPECT_EQ(r1.actual, r3.actual);
}

TEST(Scenario, SameTargetsAndSummedComponents) {
    const auto ts = synth_generate(preset_spec(Preset::Wind, 700, 4));
    ForecastConfig cfg;
    cfg.decomposition = Method::EMD;
    EngineParams p;
    p.hidden = 30;
    cfg.grid = std::vector<EngineParams>{p};
    auto opt = short_options(15);
    opt.report_mape = false;
    const auto r1 = run_scenario(Scenario::I, ts, cfg, opt);
    const auto r2 = run_scenario(Scenario::II, ts, cfg, opt);
    EXPECT_EQ(r1.actual, r2.actual);
    ASSERT_EQ(r1.actual.size(), 15u);
    EXPECT_EQ(r1.actual.front(), ts[560]);
    for (const auto* r : {&r1, &r2}) {
        ASSERT_EQ(r->component_forecasts.size(), r->forecast.size());
        for (std::size_t s = 0; s < r->forecast.size(); ++s) {
            double sum = 0.0;
            for (double v : r->component_forecasts[s]) sum += v;
            EXPECT_EQ(sum, r->forecast[s]);
        }
    }
    EXPECT_NEAR(r1.rmse, testutil::direct_rmse(r1.actual, r1.forecast), 1e-12);
}

TEST(Scenario, RefitAndSlidingWindowVariantsRun) {
    const auto ts = synth_generate(preset_spec(Preset::Load, 600, 2));
    ForecastConfig cfg;
    cfg.decomposition = Method::EMD;
    EngineParams p;
    p.hidden = 20;
    cfg.grid = std::vector<EngineParams>{p};
    auto opt = short_options(4);
    opt.refit_each_step = true;
    const auto refit = run_scenario(Scenario::II, ts, cfg, opt);
    EXPECT_EQ(refit.forecast.size(), 4u);
    opt.refit_each_step = false;
    opt.sliding_window = 300;
    const auto windowed = run_scenario(Scenario::II, ts, cfg, opt);
    EXPECT_EQ(windowed.forecast.size(), 4u);
    EXPECT_TRUE(std::isfinite(windowed.rmse));
    EXPECT_EQ(refit.forecast.front(), run_scenario(Scenario::II, ts, cfg, short_options(1)).forecast.front());
}

TEST(Scenario, DecomposingScenariosNeedAMethod) {
    const auto ts = synth_generate(preset_spec(Preset::Load, 600, 2));
    ForecastConfig cfg;
    cfg.decomposition.reset();
    EXPECT_THROW(run_scenario(Scenario::I, ts, cfg, short_options(2)), InputError);
    EXPECT_EQ(parse_scenario("2"), Scenario::II);
    EXPECT_EQ(to_string(Scenario::III), "III");
    EXPECT_THROW(parse_scenario("IV"), InputError);
}

TEST(Memo, ReturnsIdenticalDecompositionsAndCaches) {
    const auto x = testutil::add(testutil::sine(500, 17.0), testutil::gaussian(500, 0.1, 3));
    EnsembleConfig c;
    c.num_ensembles = 4;
    c.master_seed = 8;
    DecompositionMemo memo;
    const auto a = memo(x, Method::CEEMD, c);
    const auto b = memo(x, Method::CEEMD, c);
    EXPECT_EQ(memo.size(), 1u);
    EXPECT_EQ(a.imfs, b.imfs);
    EXPECT_EQ(a.imfs, decompose(x, Method::CEEMD, c).imfs);
    c.master_seed = 9;
    memo(x, Method::CEEMD, c);
    EXPECT_EQ(memo.size(), 2u);
    auto y = x;
    y.back() += 1e-15;
    memo(y, Method::CEEMD, c);
    EXPECT_EQ(memo.size(), 3u);
    memo.clear();
    EXPECT_EQ(memo.size(), 0u);
}

TEST(Boundary, ZeroLookaheadIsIdenticallyZero) {
    const auto ts = synth_generate(preset_spec(Preset::Wind, 600, 3));
    const auto b = boundary_divergence(ts, 0, {}, 48);
    ASSERT_FALSE(b.per_imf.empty());
    EXPECT_EQ(b.window_end, 600u);
    EXPECT_EQ(b.window_begin, 552u);
    for (const auto& d : b.per_imf) {
        ASSERT_EQ(d.size(), 48u);
        for (double v : d) EXPECT_LE(v, 1e-12);
    }
}

TEST(Boundary, SlowSinusoidEndWorseThanCentre) {
    const TimeSeries ts(testutil::sine(1500, 400.0, 1.0, 0.3));
    const auto b = boundary_divergence(ts, 48, {}, 48);
    ASSERT_FALSE(b.per_imf.empty());
    EXPECT_LE(b.per_imf[0][24], b.per_imf[0][47]);
}

TEST(Boundary, OracleMatchesDirectDecompositions) {
    const auto ts = synth_generate(preset_spec(Preset::Load, 500, 5));
    const auto b = boundary_divergence(ts, 20, {}, 30);
    const auto full = emd(ts.values());
    const auto part = emd(ts.values().first(480));
    for (std::size_t k = 0; k < b.per_imf.size(); ++k) {
        for (std::size_t i = 0; i < 30; ++i) {
            EXPECT_EQ(b.per_imf[k][i], std::abs(part.imfs[k][450 + i] - full.imfs[k][450 + i]));
        }
    }
    EXPECT_THROW(boundary_divergence(ts, 480, {}, 30), InputError);
    EXPECT_THROW(boundary_divergence(ts, 10, {}, 0), InputError);
}

TEST(Boundary, WindPresetShowsTheEndEffect) {
    int visible = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto ts = synth_generate(preset_spec(Preset::Wind, 2000, seed));
        visible += boundary_effect_visible(boundary_divergence(ts, 48, {}, 48));
    }
    EXPECT_GE(visible, 4);
}

TEST(Suite, SmallSuiteShapeAndDeterminism) {
    SuiteOptions so;
    so.length = 600;
    so.num_ensembles = 4;
    so.scenario.max_test_steps = 5;
    EngineParams p;
    p.hidden = 20;
    so.base.grid = std::vector<EngineParams>{p};
    so.threads = 2;
    const auto a = run_benchmark_suite({Preset::Wind}, {Engine::ELM}, {3}, so);
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(a[0].scenario, Scenario::I);
    EXPECT_EQ(a[1].scenario, Scenario::II);
    EXPECT_EQ(a[2].scenario, Scenario::III);
    for (const auto& r : a) {
        EXPECT_FALSE(r.error);
        EXPECT_EQ(r.preset, "wind");
        EXPECT_FALSE(r.mape);
    }
    so.threads = 1;
    const auto b = run_benchmark_suite({Preset::Wind}, {Engine::ELM}, {3}, so);
    EXPECT_EQ(reports_json(a).dump(), reports_json(b).dump());
    EXPECT_THROW(run_benchmark_suite({}, {Engine::ELM}, {1}, so), InputError);
}

TEST(Suite, FailedCellsAreRecorded) {
    SuiteOptions so;
    so.length = 100; // too short to train on
    so.num_ensembles = 2;
    const auto r = run_benchmark_suite({Preset::Load}, {Engine::ELM}, {1, 2}, so);
    ASSERT_EQ(r.size(), 6u);
    for (const auto& c : r) {
        EXPECT_TRUE(c.error);
        EXPECT_TRUE(std::isnan(c.rmse));
    }
    EXPECT_TRUE(std::isnan(median_rmse(r, "load", Engine::ELM, Scenario::I)));
}

TEST(Suite, TableShowsMapeOnlyForLoad) {
    std::vector<ScenarioReport> reports;
    for (auto preset : {"load", "wind"}) {
        for (auto sc : {Scenario::I, Scenario::II, Scenario::III}) {
            for (std::uint64_t seed : {1, 2, 3}) {
                ScenarioReport r;
                r.preset = preset;
                r.scenario = sc;
                r.seed = seed;
                r.rmse = static_cast<double>(seed);
                if (std::string(preset) == "load") r.mape = 2.0 * static_cast<double>(seed);
                reports.push_back(r);
            }
        }
    }
    const auto table = render_table(reports);
    const auto wind_at = table.find("Preset: wind");
    ASSERT_NE(wind_at, std::string::npos);
    const auto load_part = table.substr(0, wind_at);
    const auto wind_part = table.substr(wind_at);
    EXPECT_NE(load_part.find("MAPE"), std::string::npos);
    EXPECT_NE(load_part.find("RMSE"), std::string::npos);
    EXPECT_EQ(wind_part.find("MAPE"), std::string::npos);
    EXPECT_NE(wind_part.find("RMSE"), std::string::npos);
    EXPECT_EQ(median_rmse(reports, "load", Engine::ELM, Scenario::II), 2.0);
    EXPECT_NE(load_part.find("4.0000"), std::string::npos); // median MAPE
}

TEST(Suite, MedianOfEvenCount) {
    std::vector<ScenarioReport> reports(4);
    const double v[] = {4.0, 1.0, 3.0, 10.0};
    for (std::size_t i = 0; i < 4; ++i) {
        reports[i].preset = "wind";
        reports[i].rmse = v[i];
    }
    EXPECT_EQ(median_rmse(reports, "wind", Engine::ELM, Scenario::I), 3.5);
}
