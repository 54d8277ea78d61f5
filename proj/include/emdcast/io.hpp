#pragma once

#include "emdcast/bench.hpp"
#include "emdcast/emd.hpp"
#include "emdcast/ensemble.hpp"
#include "emdcast/features.hpp"
#include "emdcast/pipeline.hpp"
#include "emdcast/spectral.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace emdcast {

using Json = nlohmann::json;

/// `timestamp,imf1,...,imfK,residual`; timestamps come from `source`.
void write_decomposition_csv(const TimeSeries& source, const Decomposition& d,
                             const std::filesystem::path& path);
/// {method, NE, noise_std_fraction, master_seed, imf_count, ...}
Json decomposition_metadata(const Decomposition& d, const EnsembleConfig& ensemble);

/// Long format `frame_start_index,frequency_cycles_per_hour,magnitude`.
void write_spectrogram_csv(const Spectrogram& s, const std::filesystem::path& path);
/// `lag,pacf,band`
void write_pacf_csv(const PacfResult& p, const std::filesystem::path& path);

/// {component, lags, relevance, k, bins}
Json selection_json(const std::string& component, const MrmrSelection& sel, std::size_t k, int bins);

Json to_json(const SiftConfig& c);
Json to_json(const EnsembleConfig& c);
Json to_json(const ForecastConfig& c);
SiftConfig sift_config_from_json(const Json& j);
EnsembleConfig ensemble_config_from_json(const Json& j);
ForecastConfig forecast_config_from_json(const Json& j);

/// Engine type, hyperparameters, flattened weights, feature scaling and seed.
Json to_json(const EngineModel& m);
EngineModel engine_model_from_json(const Json& j);
Json to_json(const ForecastModel& m);
ForecastModel forecast_model_from_json(const Json& j);

/// `timestamp,actual,forecast,component_1,...,component_M`; first_index is the series index
/// of the first test point.
void write_forecast_csv(const TimeSeries& ts, std::size_t first_index, const ScenarioReport& r,
                        const std::filesystem::path& path);

/// Report metrics without wall-clock timings, so identical runs serialize identically.
Json to_json(const ScenarioReport& r);
Json reports_json(const std::vector<ScenarioReport>& reports);

/// Plain-text table per preset: engine, scenario, median MAPE (load only), median RMSE,
/// total runtime.
std::string render_table(const std::vector<ScenarioReport>& reports);

/// Long format `imf_index,sample_offset,divergence`.
void write_boundary_csv(const BoundaryDivergence& b, const std::filesystem::path& path);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

} // namespace emdcast
