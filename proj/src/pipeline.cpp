#include "emdcast/pipeline.hpp"

#include "emdcast/error.hpp"

#include <algorithm>

namespace emdcast {

void ForecastConfig::validate() const {
    if (lag_pool.empty()) {
        throw InputError("lag pool must not be empty");
    }
    if (*std::ranges::min_element(lag_pool) < 1) {
        throw InputError("lags must be positive");
    }
    if (mrmr_k < 1 || mrmr_k > lag_pool.size()) {
        throw InputError("mrmr_k must lie in 1..|lag pool|");
    }
    if (mi_bins < 2) {
        throw InputError("mutual information needs at least 2 bins");
    }
    if (cv_folds < 2) {
        throw InputError("cross-validation needs at least 2 folds");
    }
    if (grid && grid->empty()) {
        throw InputError("engine grid must not be empty");
    }
    if (decomposition) {
        ensemble.validate(*decomposition);
    }
}

std::string method_label(const std::optional<Method>& m) {
    return m ? to_string(*m) : "none";
}

ComponentHistories components_of(const Decomposition& d) {
    ComponentHistories out(d.imfs.begin(), d.imfs.end());
    out.push_back(d.residual);
    return out;
}

namespace {

ComponentModel fit_component(std::span<const double> series, std::size_t index,
                             const ForecastConfig& config) {
    ComponentModel cm;
    if (stddev(series) == 0.0) {
        cm.engine = ConstantModel{series.back()};
        return cm;
    }
    const auto label = "component_" + std::to_string(index + 1);
    const auto pool = build_lag_matrix(series, config.lag_pool, label);
    cm.selection = mrmr_select(pool, config.mrmr_k, config.mi_bins);
    cm.lags = cm.selection.lags;
    std::ranges::sort(cm.lags);
    const auto fm = build_lag_matrix(series, cm.lags, label);

    const auto grid = config.grid.value_or(default_grid(config.engine, stddev(fm.targets)));
    const std::size_t rows = fm.row_count();
    const std::size_t cv_rows =
        config.cv_max_rows == 0 ? rows : std::min(rows, config.cv_max_rows);
    const std::uint64_t engine_seed = derive_stream_seed(config.seed, 0x10000 + index);
    cm.search = grid_search_cv(fm.subset(rows - cv_rows, rows), config.engine, grid,
                               config.cv_folds, engine_seed);
    cm.engine = train_engine(fm, config.engine, cm.search.best_params, engine_seed);
    return cm;
}

} // namespace

ForecastModel fit_components(const ComponentHistories& components,
                             const std::optional<Method>& method, const ForecastConfig& config) {
    config.validate();
    if (components.empty()) {
        throw InputError("no components to fit");
    }
    const std::size_t n = components.front().size();
    const auto max_lag = static_cast<std::size_t>(*std::ranges::max_element(config.lag_pool));
    if (n < max_lag + 50) {
        throw InputError("training series too short: " + std::to_string(n) +
                         " samples, need at least " + std::to_string(max_lag + 50));
    }
    ForecastModel model;
    model.method = method;
    model.engine = config.engine;
    model.training_length = n;
    for (std::size_t c = 0; c < components.size(); ++c) {
        if (components[c].size() != n) {
            throw InputError("component series differ in length");
        }
        model.components.push_back(fit_component(components[c], c, config));
    }
    return model;
}

ForecastModel fit_forecaster(const TimeSeries& train, const ForecastConfig& config,
                             const Decomposer& decomposer) {
    config.validate();
    if (!config.decomposition) {
        return fit_components({std::vector<double>(train.values().begin(), train.values().end())},
                              std::nullopt, config);
    }
    const auto d = decomposer ? decomposer(train.values(), *config.decomposition, config.ensemble)
                              : decompose(train.values(), *config.decomposition, config.ensemble);
    return fit_components(components_of(d), config.decomposition, config);
}

ComponentHistories model_histories(const ForecastModel& model, std::span<const double> series,
                                   const ForecastConfig& config, const Decomposer& decomposer) {
    if (!model.method) {
        return {std::vector<double>(series.begin(), series.end())};
    }
    EnsembleConfig ens = config.ensemble;
    ens.sift.max_imfs = static_cast<int>(std::max<std::size_t>(model.imf_count(), 1));
    auto d = decomposer ? decomposer(series, *model.method, ens) : decompose(series, *model.method, ens);
    ComponentHistories h(d.imfs.begin(), d.imfs.end());
    h.resize(model.imf_count(), std::vector<double>(series.size(), 0.0));
    h.push_back(std::move(d.residual));
    return h;
}

std::vector<double> forecast_components(const ForecastModel& model,
                                        const ComponentHistories& histories) {
    if (histories.size() != model.components.size()) {
        throw InputError("expected " + std::to_string(model.components.size()) +
                         " component histories, got " + std::to_string(histories.size()));
    }
    std::vector<double> out(model.components.size());
    std::vector<double> row;
    for (std::size_t c = 0; c < model.components.size(); ++c) {
        const auto& cm = model.components[c];
        const auto& hist = histories[c];
        row.clear();
        for (int lag : cm.lags) {
            const auto l = static_cast<std::size_t>(lag);
            if (l > hist.size()) {
                throw InputError("history of component " + std::to_string(c + 1) +
                                 " is too short for lag " + std::to_string(lag));
            }
            row.push_back(hist[hist.size() - l]);
        }
        out[c] = predict(cm.engine, row);
    }
    return out;
}

double forecast_one(const ForecastModel& model, const ComponentHistories& histories) {
    double sum = 0.0;
    for (double v : forecast_components(model, histories)) {
        sum += v;
    }
    return sum;
}

std::vector<double> forecast_series(const ForecastModel& model, ComponentHistories histories,
                                    std::size_t horizon_steps, const HistoryUpdate& update) {
    if (horizon_steps < 1) {
        throw InputError("forecast horizon must be at least 1");
    }
    std::vector<double> out;
    out.reserve(horizon_steps);
    for (std::size_t step = 0; step < horizon_steps; ++step) {
        out.push_back(forecast_one(model, histories));
        if (update) {
            update(step, out.back(), histories);
        }
    }
    return out;
}

} // namespace emdcast
