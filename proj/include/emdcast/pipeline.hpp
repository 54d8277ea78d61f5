#pragma once

#include "emdcast/ensemble.hpp"
#include "emdcast/features.hpp"
#include "emdcast/predict.hpp"
#include "emdcast/series.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace emdcast {

struct ForecastConfig {
    /// nullopt: no decomposition, a single engine on the raw series.
    std::optional<Method> decomposition = Method::CEEMD;
    EnsembleConfig ensemble;
    Engine engine = Engine::ELM;
    std::vector<int> lag_pool = default_lag_pool();
    std::size_t mrmr_k = 8;
    int mi_bins = 16;
    /// Unset: default_grid(engine, target std) per component.
    std::optional<std::vector<EngineParams>> grid;
    int cv_folds = 5;
    /// Grid search uses at most this many of the most recent rows; 0 means all rows.
    std::size_t cv_max_rows = 400;
    std::uint64_t seed = 0;

    void validate() const;
};

std::string method_label(const std::optional<Method>& m);

struct ComponentModel {
    std::vector<int> lags;
    MrmrSelection selection;
    GridSearchResult search;
    EngineModel engine;
};

struct ForecastModel {
    std::vector<ComponentModel> components; ///< IMFs in order, then the residual
    std::optional<Method> method;
    Engine engine = Engine::ELM;
    std::size_t training_length = 0;

    std::size_t imf_count() const noexcept {
        return method ? components.size() - 1 : 0;
    }
};

/// One history per model component, most recent sample last.
using ComponentHistories = std::vector<std::vector<double>>;

/// Called after every forecast step; reveals the realized value to whatever owns the
/// data and refreshes the histories for the next step.
using HistoryUpdate =
    std::function<void(std::size_t step, double forecast, ComponentHistories& histories)>;

/// Decomposition backend; the default calls decompose(). The benchmark swaps in a memoized one.
using Decomposer =
    std::function<Decomposition(std::span<const double>, Method, const EnsembleConfig&)>;

/// IMFs followed by the residual.
ComponentHistories components_of(const Decomposition& d);

ForecastModel fit_forecaster(const TimeSeries& train, const ForecastConfig& config,
                             const Decomposer& decomposer = {});

/// Trains one engine per supplied component series (all of equal length).
ForecastModel fit_components(const ComponentHistories& components,
                             const std::optional<Method>& method, const ForecastConfig& config);

/// Decomposes a series into histories shaped for the model: the IMF count is capped at the
/// model's, missing IMFs are zero, the residual comes last.
ComponentHistories model_histories(const ForecastModel& model, std::span<const double> series,
                                   const ForecastConfig& config, const Decomposer& decomposer = {});

/// Per-component one-step-ahead predictions.
std::vector<double> forecast_components(const ForecastModel& model,
                                        const ComponentHistories& histories);

/// Sum of the component predictions in ascending component order.
double forecast_one(const ForecastModel& model, const ComponentHistories& histories);

std::vector<double> forecast_series(const ForecastModel& model, ComponentHistories histories,
                                    std::size_t horizon_steps, const HistoryUpdate& update);

} // namespace emdcast
