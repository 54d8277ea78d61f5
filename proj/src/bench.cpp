#include "emdcast/bench.hpp"

#include "emdcast/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

namespace emdcast {

std::string to_string(Scenario s) {
    switch (s) {
    case Scenario::I: return "I";
    case Scenario::II: return "II";
    case Scenario::III: return "III";
    }
    return "?";
}

Scenario parse_scenario(const std::string& name) {
    if (name == "I" || name == "1") return Scenario::I;
    if (name == "II" || name == "2") return Scenario::II;
    if (name == "III" || name == "3") return Scenario::III;
    throw InputError("unknown scenario '" + name + "' (expected I, II or III)");
}

namespace {

std::vector<double> prefix(std::span<const double> x, std::size_t end, std::size_t window) {
    const std::size_t begin = window > 0 && end > window ? end - window : 0;
    return {x.begin() + static_cast<std::ptrdiff_t>(begin),
            x.begin() + static_cast<std::ptrdiff_t>(end)};
}

} // namespace

ScenarioReport run_scenario(Scenario scenario, const TimeSeries& ts, const ForecastConfig& config,
                            const ScenarioOptions& options, const Decomposer& decomposer) {
    const auto started = std::chrono::steady_clock::now();
    const auto [train, test] = train_test_split(ts, options.train_fraction);
    const std::size_t cut = train.size();
    const std::size_t steps = options.max_test_steps == 0
                                  ? test.size()
                                  : std::min(test.size(), options.max_test_steps);
    const auto x = ts.values();

    ScenarioReport report;
    report.scenario = scenario;
    report.engine = config.engine;
    report.seed = config.seed;
    report.test_points = steps;
    report.actual.assign(x.begin() + static_cast<std::ptrdiff_t>(cut),
                         x.begin() + static_cast<std::ptrdiff_t>(cut + steps));

    ForecastConfig cfg = config;
    if (scenario == Scenario::III) {
        cfg.decomposition.reset();
    } else if (!cfg.decomposition) {
        throw InputError("scenarios I and II need a decomposition method");
    }

    const auto record = [&](const ForecastModel& model, const ComponentHistories& histories) {
        report.component_forecasts.push_back(forecast_components(model, histories));
    };

    switch (scenario) {
    case Scenario::III: {
        const auto model = fit_forecaster(train, cfg);
        report.components = model.components.size();
        ComponentHistories h{std::vector<double>(train.values().begin(), train.values().end())};
        report.forecast = forecast_series(model, h, steps,
                                          [&](std::size_t step, double, ComponentHistories& hist) {
                                              record(model, hist);
                                              hist[0].push_back(x[cut + step]);
                                          });
        break;
    }
    case Scenario::I: {
        const auto full = components_of(decomposer ? decomposer(x, *cfg.decomposition, cfg.ensemble)
                                                   : decompose(x, *cfg.decomposition, cfg.ensemble));
        ComponentHistories train_parts;
        for (const auto& c : full) {
            train_parts.emplace_back(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(cut));
        }
        const auto model = fit_components(train_parts, cfg.decomposition, cfg);
        report.components = model.components.size();
        report.forecast =
            forecast_series(model, train_parts, steps,
                            [&](std::size_t step, double, ComponentHistories& hist) {
                                record(model, hist);
                                for (std::size_t c = 0; c < hist.size(); ++c) {
                                    hist[c].push_back(full[c][cut + step]);
                                }
                            });
        break;
    }
    case Scenario::II: {
        auto model = fit_forecaster(train, cfg, decomposer);
        report.components = model.components.size();
        if (!options.refit_each_step) {
            auto h = model_histories(model, prefix(x, cut, options.sliding_window), cfg, decomposer);
            report.forecast = forecast_series(
                model, std::move(h), steps, [&](std::size_t step, double, ComponentHistories& hist) {
                    record(model, hist);
                    if (step + 1 < steps) {
                        hist = model_histories(
                            model, prefix(x, cut + step + 1, options.sliding_window), cfg,
                            decomposer);
                    }
                });
        } else {
            for (std::size_t step = 0; step < steps; ++step) {
                const std::size_t end = cut + step;
                if (step > 0) {
                    model = fit_forecaster(ts.slice(0, end), cfg, decomposer);
                }
                const auto h =
                    model_histories(model, prefix(x, end, options.sliding_window), cfg, decomposer);
                record(model, h);
                report.forecast.push_back(forecast_one(model, h));
            }
        }
        break;
    }
    }

    report.rmse = rmse(report.actual, report.forecast);
    if (options.report_mape) {
        report.mape = mape(report.actual, report.forecast);
    }
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

BoundaryDivergence boundary_divergence(const TimeSeries& ts, std::size_t lookahead,
                                       const SiftConfig& config, std::size_t window) {
    const std::size_t n = ts.size();
    if (window == 0 || n <= lookahead + window) {
        throw InputError("boundary comparison needs N > lookahead + window");
    }
    const std::size_t m = n - lookahead;
    const auto full = emd(ts.values(), config);
    const auto truncated = emd(ts.values().first(m), config);

    BoundaryDivergence out;
    out.window_begin = m - window;
    out.window_end = m;
    const std::size_t shared = std::min(full.imf_count(), truncated.imf_count());
    for (std::size_t k = 0; k < shared; ++k) {
        std::vector<double> div(window);
        for (std::size_t i = 0; i < window; ++i) {
            const std::size_t idx = out.window_begin + i;
            div[i] = std::abs(truncated.imfs[k][idx] - full.imfs[k][idx]);
        }
        out.per_imf.push_back(std::move(div));
    }
    return out;
}

Decomposition DecompositionMemo::operator()(std::span<const double> x, Method method,
                                            const EnsembleConfig& config) {
    std::string key = to_string(method) + '|' + std::to_string(config.num_ensembles) + '|' +
                      std::to_string(config.master_seed) + '|';
    const auto append = [&key](const auto& v) {
        key.append(reinterpret_cast<const char*>(&v), sizeof v);
    };
    append(config.noise_std_fraction);
    append(config.sift.max_sift_iterations);
    append(config.sift.max_imfs.value_or(-1));
    append(config.sift.epsilon.value_or(-1.0));
    append(config.sift.boundary);
    append(config.sift.stop_norm);
    key.append(reinterpret_cast<const char*>(x.data()), x.size_bytes());
    {
        std::lock_guard lock(mutex_);
        if (const auto it = entries_.find(key); it != entries_.end()) {
            return it->second;
        }
    }
    auto d = decompose(x, method, config);
    std::lock_guard lock(mutex_);
    return entries_.emplace(std::move(key), std::move(d)).first->second;
}

Decomposer DecompositionMemo::decomposer() {
    return [this](std::span<const double> x, Method method, const EnsembleConfig& config) {
        return (*this)(x, method, config);
    };
}

void DecompositionMemo::clear() {
    std::lock_guard lock(mutex_);
    entries_.clear();
}

std::size_t DecompositionMemo::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

ForecastConfig suite_config(const SuiteOptions& options, Engine engine, std::uint64_t seed) {
    ForecastConfig cfg = options.base;
    cfg.engine = engine;
    cfg.seed = seed;
    cfg.ensemble.master_seed = seed;
    cfg.ensemble.num_ensembles = options.num_ensembles;
    return cfg;
}

std::vector<ScenarioReport> run_benchmark_suite(const std::vector<Preset>& presets,
                                                const std::vector<Engine>& engines,
                                                const std::vector<std::uint64_t>& seeds,
                                                const SuiteOptions& options) {
    if (presets.empty() || engines.empty() || seeds.empty()) {
        throw InputError("benchmark suite needs at least one preset, engine and seed");
    }
    struct Cell {
        Preset preset;
        Engine engine;
        Scenario scenario;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (auto p : presets) {
        for (auto e : engines) {
            for (auto s : {Scenario::I, Scenario::II, Scenario::III}) {
                for (auto seed : seeds) {
                    cells.push_back({p, e, s, seed});
                }
            }
        }
    }

    std::vector<ScenarioReport> reports(cells.size());
    DecompositionMemo memo;
    const auto decomposer = memo.decomposer();
    const auto run_cell = [&](std::size_t i) {
        const auto& c = cells[i];
        ScenarioOptions so = options.scenario;
        so.report_mape = c.preset == Preset::Load;
        ScenarioReport r;
        try {
            const auto ts = synth_generate(preset_spec(c.preset, options.length, c.seed));
            r = run_scenario(c.scenario, ts, suite_config(options, c.engine, c.seed), so,
                             decomposer);
        } catch (const std::exception& e) {
            r = ScenarioReport{};
            r.scenario = c.scenario;
            r.engine = c.engine;
            r.seed = c.seed;
            r.rmse = std::nan("");
            r.error = e.what();
        }
        r.preset = to_string(c.preset);
        reports[i] = std::move(r);
    };

    // Cells sharing a (preset, seed) series run together so the memo can serve every
    // engine, then the memo is dropped.
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned threads = options.threads == 0 ? hw : options.threads;
    for (auto p : presets) {
        for (auto seed : seeds) {
            std::vector<std::size_t> group;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i].preset == p && cells[i].seed == seed) {
                    group.push_back(i);
                }
            }
            const auto workers = std::min<std::size_t>(threads, group.size());
            if (workers <= 1) {
                for (auto i : group) {
                    run_cell(i);
                }
            } else {
                std::atomic<std::size_t> next{0};
                std::vector<std::jthread> pool;
                for (std::size_t w = 0; w < workers; ++w) {
                    pool.emplace_back([&] {
                        for (std::size_t k = next++; k < group.size(); k = next++) {
                            run_cell(group[k]);
                        }
                    });
                }
            }
            memo.clear();
        }
    }
    return reports;
}

double median_rmse(const std::vector<ScenarioReport>& reports, const std::string& preset,
                   Engine engine, Scenario scenario) {
    std::vector<double> v;
    for (const auto& r : reports) {
        if (r.preset == preset && r.engine == engine && r.scenario == scenario && !r.error) {
            v.push_back(r.rmse);
        }
    }
    if (v.empty()) {
        return std::nan("");
    }
    std::ranges::sort(v);
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

} // namespace emdcast
