#pragma once

#include "emdcast/emd.hpp"
#include "emdcast/metrics.hpp"
#include "emdcast/pipeline.hpp"
#include "emdcast/series.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace emdcast {

/// I: decompose the full series once (oracle histories).
/// II: re-decompose the growing series at every test step (real-time).
/// III: no decomposition.
enum class Scenario { I, II, III };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);

struct ScenarioOptions {
    double train_fraction = 0.8;
    /// Test points evaluated after the split; shared by every scenario. 0 means all.
    std::size_t max_test_steps = 200;
    bool report_mape = true;
    /// Scenario II: refit every engine on the grown series at each step instead of
    /// only refreshing the inputs.
    bool refit_each_step = false;
    /// Scenario II: decompose only the most recent samples (0 = whole history).
    std::size_t sliding_window = 0;
};

struct ScenarioReport {
    Scenario scenario = Scenario::I;
    Engine engine = Engine::ELM;
    std::string preset;
    std::uint64_t seed = 0;
    std::optional<double> mape;
    double rmse = 0.0;
    double runtime_seconds = 0.0;
    std::size_t test_points = 0;
    std::size_t components = 0;
    std::optional<std::string> error;

    std::vector<double> actual;
    std::vector<double> forecast;
    std::vector<std::vector<double>> component_forecasts; ///< per test step
};

ScenarioReport run_scenario(Scenario scenario, const TimeSeries& ts, const ForecastConfig& config,
                            const ScenarioOptions& options = {}, const Decomposer& decomposer = {});

/// Thread-safe memo over decompose(), keyed by the exact input samples and configuration.
class DecompositionMemo {
public:
    Decomposition operator()(std::span<const double> x, Method method,
                             const EnsembleConfig& config);
    /// A Decomposer bound to this memo; the memo must outlive it.
    Decomposer decomposer();
    void clear();
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, Decomposition> entries_;
};

struct BoundaryDivergence {
    std::vector<std::vector<double>> per_imf; ///< |imf_truncated - imf_full| over the window
    std::size_t window_begin = 0;             ///< sample index of the first window entry
    std::size_t window_end = 0;               ///< one past the last truncated sample
};

/// Decomposes x[0, N - lookahead) and x[0, N) and compares the IMFs over the last
/// `window` samples of the truncated range.
BoundaryDivergence boundary_divergence(const TimeSeries& ts, std::size_t lookahead,
                                       const SiftConfig& config, std::size_t window);

struct SuiteOptions {
    std::size_t length = 2000;
    ForecastConfig base;
    ScenarioOptions scenario;
    /// Worker threads for independent cells; 0 uses hardware concurrency.
    unsigned threads = 1;
    /// Ensemble size used by the forecasting scenarios.
    int num_ensembles = 20;
};

/// Cross product presets x engines x scenarios x seeds, in that nesting order. Failed cells
/// carry an error message instead of aborting the suite.
std::vector<ScenarioReport> run_benchmark_suite(const std::vector<Preset>& presets,
                                                const std::vector<Engine>& engines,
                                                const std::vector<std::uint64_t>& seeds,
                                                const SuiteOptions& options = {});

/// Forecast configuration a suite cell uses for a given engine and seed.
ForecastConfig suite_config(const SuiteOptions& options, Engine engine, std::uint64_t seed);

/// Median RMSE across seeds for one (preset, engine, scenario) cell group.
double median_rmse(const std::vector<ScenarioReport>& reports, const std::string& preset,
                   Engine engine, Scenario scenario);

} // namespace emdcast
