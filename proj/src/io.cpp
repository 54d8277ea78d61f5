#include "emdcast/io.hpp"

#include "emdcast/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace emdcast {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << std::setprecision(17);
    return out;
}

Json vector_json(const Eigen::VectorXd& v) {
    return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from(const Json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json scaling_json(const FeatureScaling& s) {
    return {{"mean", s.mean}, {"std", s.std}};
}

FeatureScaling scaling_from(const Json& j) {
    return {j.at("mean").get<std::vector<double>>(), j.at("std").get<std::vector<double>>()};
}

Json optional_number(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

// Failed grid candidates score +inf, stored as null.
Json scores_json(const std::vector<double>& v) {
    Json arr = Json::array();
    for (double s : v) {
        arr.push_back(optional_number(s));
    }
    return arr;
}

std::vector<double> scores_from(const Json& j) {
    std::vector<double> v;
    for (const auto& s : j) {
        v.push_back(s.is_null() ? std::numeric_limits<double>::infinity() : s.get<double>());
    }
    return v;
}

} // namespace

void write_decomposition_csv(const TimeSeries& source, const Decomposition& d,
                             const std::filesystem::path& path) {
    if (source.size() != d.size()) {
        throw InputError("decomposition length does not match its source series");
    }
    auto out = open_out(path);
    out << "timestamp";
    for (std::size_t k = 0; k < d.imf_count(); ++k) {
        out << ",imf" << k + 1;
    }
    out << ",residual\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << format_timestamp(source.time_at(i));
        for (const auto& imf : d.imfs) {
            out << ',' << imf[i];
        }
        out << ',' << d.residual[i] << '\n';
    }
}

Json decomposition_metadata(const Decomposition& d, const EnsembleConfig& ensemble) {
    Json j{{"method", to_string(d.method)},
           {"imf_count", d.imf_count()},
           {"samples", d.size()},
           {"sift", to_json(d.config)}};
    if (d.method == Method::EMD) {
        j["NE"] = 1;
        j["noise_std_fraction"] = 0.0;
        j["master_seed"] = nullptr;
    } else {
        j["NE"] = ensemble.num_ensembles;
        j["noise_std_fraction"] = ensemble.noise_std_fraction;
        j["master_seed"] = ensemble.master_seed;
    }
    return j;
}

void write_spectrogram_csv(const Spectrogram& s, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "frame_start_index,frequency_cycles_per_hour,magnitude\n";
    for (std::size_t f = 0; f < s.frames(); ++f) {
        for (std::size_t k = 0; k < s.magnitudes[f].size(); ++k) {
            out << s.frame_start(f) << ',' << static_cast<double>(k) * s.bin_width << ','
                << s.magnitudes[f][k] << '\n';
        }
    }
}

void write_pacf_csv(const PacfResult& p, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "lag,pacf,band\n";
    for (std::size_t k = 0; k < p.values.size(); ++k) {
        out << k << ',' << p.values[k] << ',' << p.confidence_band << '\n';
    }
}

Json selection_json(const std::string& component, const MrmrSelection& sel, std::size_t k,
                    int bins) {
    return {{"component", component},
            {"lags", sel.lags},
            {"relevance", sel.relevance},
            {"k", k},
            {"bins", bins}};
}

Json to_json(const SiftConfig& c) {
    return {{"epsilon", c.epsilon ? Json(*c.epsilon) : Json(nullptr)},
            {"max_sift_iterations", c.max_sift_iterations},
            {"max_imfs", c.max_imfs ? Json(*c.max_imfs) : Json(nullptr)},
            {"boundary", to_string(c.boundary)},
            {"stop_norm", to_string(c.stop_norm)}};
}

SiftConfig sift_config_from_json(const Json& j) {
    SiftConfig c;
    if (!j.at("epsilon").is_null()) c.epsilon = j.at("epsilon").get<double>();
    c.max_sift_iterations = j.at("max_sift_iterations").get<int>();
    if (!j.at("max_imfs").is_null()) c.max_imfs = j.at("max_imfs").get<int>();
    c.boundary = parse_boundary_policy(j.at("boundary").get<std::string>());
    c.stop_norm = parse_stop_norm(j.at("stop_norm").get<std::string>());
    return c;
}

Json to_json(const EnsembleConfig& c) {
    return {{"num_ensembles", c.num_ensembles},
            {"noise_std_fraction", c.noise_std_fraction},
            {"master_seed", c.master_seed},
            {"sift", to_json(c.sift)}};
}

EnsembleConfig ensemble_config_from_json(const Json& j) {
    EnsembleConfig c;
    c.num_ensembles = j.at("num_ensembles").get<int>();
    c.noise_std_fraction = j.at("noise_std_fraction").get<double>();
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.sift = sift_config_from_json(j.at("sift"));
    return c;
}

namespace {

Json params_json(const EngineParams& p) {
    return {{"hidden", p.hidden}, {"C", p.C}, {"gamma", p.gamma}, {"epsilon_tube", p.epsilon_tube}};
}

EngineParams params_from(const Json& j) {
    EngineParams p;
    p.hidden = j.at("hidden").get<int>();
    p.C = j.at("C").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.epsilon_tube = j.at("epsilon_tube").get<double>();
    return p;
}

} // namespace

Json to_json(const ForecastConfig& c) {
    Json grid = nullptr;
    if (c.grid) {
        grid = Json::array();
        for (const auto& p : *c.grid) {
            grid.push_back(params_json(p));
        }
    }
    return {{"decomposition", method_label(c.decomposition)},
            {"ensemble", to_json(c.ensemble)},
            {"engine", to_string(c.engine)},
            {"lag_pool", c.lag_pool},
            {"mrmr_k", c.mrmr_k},
            {"mi_bins", c.mi_bins},
            {"grid", grid},
            {"cv_folds", c.cv_folds},
            {"cv_max_rows", c.cv_max_rows},
            {"seed", c.seed}};
}

ForecastConfig forecast_config_from_json(const Json& j) {
    ForecastConfig c;
    const auto method = j.at("decomposition").get<std::string>();
    if (method == "none") {
        c.decomposition.reset();
    } else {
        c.decomposition = parse_method(method);
    }
    c.ensemble = ensemble_config_from_json(j.at("ensemble"));
    c.engine = parse_engine(j.at("engine").get<std::string>());
    c.lag_pool = j.at("lag_pool").get<std::vector<int>>();
    c.mrmr_k = j.at("mrmr_k").get<std::size_t>();
    c.mi_bins = j.at("mi_bins").get<int>();
    if (!j.at("grid").is_null()) {
        std::vector<EngineParams> grid;
        for (const auto& p : j.at("grid")) {
            grid.push_back(params_from(p));
        }
        c.grid = grid;
    }
    c.cv_folds = j.at("cv_folds").get<int>();
    c.cv_max_rows = j.at("cv_max_rows").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

Json to_json(const EngineModel& m) {
    struct Visitor {
        Json operator()(const ConstantModel& c) const {
            return {{"engine", "constant"}, {"value", c.value}};
        }
        Json operator()(const ElmModel& e) const {
            // Row-major hidden x features.
            std::vector<double> w;
            w.reserve(static_cast<std::size_t>(e.input_weights.size()));
            for (Eigen::Index r = 0; r < e.input_weights.rows(); ++r) {
                for (Eigen::Index c = 0; c < e.input_weights.cols(); ++c) {
                    w.push_back(e.input_weights(r, c));
                }
            }
            return {{"engine", "elm"},
                    {"hidden_count", e.hidden_count},
                    {"features", e.input_weights.cols()},
                    {"seed", e.seed},
                    {"input_weights", w},
                    {"biases", vector_json(e.biases)},
                    {"output_weights", vector_json(e.output_weights)},
                    {"feature_scaling", scaling_json(e.feature_scaling)}};
        }
        Json operator()(const SvrModel& s) const {
            Json svs = Json::array();
            for (const auto& v : s.support_vectors) {
                svs.push_back(vector_json(v));
            }
            return {{"engine", "svr"},
                    {"C", s.C},
                    {"gamma", s.gamma},
                    {"epsilon_tube", s.epsilon_tube},
                    {"bias", s.bias},
                    {"target_mean", s.target_mean},
                    {"target_scale", s.target_scale},
                    {"support_vectors", svs},
                    {"dual_coefficients", s.dual_coefficients},
                    {"support_indices", s.support_indices},
                    {"iterations", s.iterations},
                    {"feature_scaling", scaling_json(s.feature_scaling)}};
        }
    };
    return std::visit(Visitor{}, m);
}

EngineModel engine_model_from_json(const Json& j) {
    const auto kind = j.at("engine").get<std::string>();
    if (kind == "constant") {
        return ConstantModel{j.at("value").get<double>()};
    }
    if (kind == "elm") {
        ElmModel e;
        e.hidden_count = j.at("hidden_count").get<int>();
        e.seed = j.at("seed").get<std::uint64_t>();
        const auto f = j.at("features").get<Eigen::Index>();
        const auto w = j.at("input_weights").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(w.size()) != e.hidden_count * f) {
            throw InputError("ELM weight array has the wrong size");
        }
        e.input_weights.resize(e.hidden_count, f);
        for (Eigen::Index r = 0; r < e.hidden_count; ++r) {
            for (Eigen::Index c = 0; c < f; ++c) {
                e.input_weights(r, c) = w[static_cast<std::size_t>(r * f + c)];
            }
        }
        e.biases = vector_from(j.at("biases"));
        e.output_weights = vector_from(j.at("output_weights"));
        e.feature_scaling = scaling_from(j.at("feature_scaling"));
        return e;
    }
    if (kind == "svr") {
        SvrModel s;
        s.C = j.at("C").get<double>();
        s.gamma = j.at("gamma").get<double>();
        s.epsilon_tube = j.at("epsilon_tube").get<double>();
        s.bias = j.at("bias").get<double>();
        s.target_mean = j.at("target_mean").get<double>();
        s.target_scale = j.at("target_scale").get<double>();
        for (const auto& v : j.at("support_vectors")) {
            s.support_vectors.push_back(vector_from(v));
        }
        s.dual_coefficients = j.at("dual_coefficients").get<std::vector<double>>();
        s.support_indices = j.at("support_indices").get<std::vector<std::size_t>>();
        s.iterations = j.at("iterations").get<long>();
        s.feature_scaling = scaling_from(j.at("feature_scaling"));
        return s;
    }
    throw InputError("unknown engine model type '" + kind + "'");
}

Json to_json(const ForecastModel& m) {
    Json comps = Json::array();
    for (const auto& c : m.components) {
        comps.push_back({{"lags", c.lags},
                         {"best_params", params_json(c.search.best_params)},
                         {"cv_scores", scores_json(c.search.cv_scores)},
                         {"model", to_json(c.engine)}});
    }
    return {{"method", method_label(m.method)},
            {"engine", to_string(m.engine)},
            {"training_length", m.training_length},
            {"components", comps}};
}

ForecastModel forecast_model_from_json(const Json& j) {
    ForecastModel m;
    const auto method = j.at("method").get<std::string>();
    if (method != "none") {
        m.method = parse_method(method);
    }
    m.engine = parse_engine(j.at("engine").get<std::string>());
    m.training_length = j.at("training_length").get<std::size_t>();
    for (const auto& c : j.at("components")) {
        ComponentModel cm;
        cm.lags = c.at("lags").get<std::vector<int>>();
        cm.search.best_params = params_from(c.at("best_params"));
        cm.search.cv_scores = scores_from(c.at("cv_scores"));
        cm.engine = engine_model_from_json(c.at("model"));
        m.components.push_back(std::move(cm));
    }
    return m;
}

void write_forecast_csv(const TimeSeries& ts, std::size_t first_index, const ScenarioReport& r,
                        const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "timestamp,actual,forecast";
    for (std::size_t c = 0; c < r.components; ++c) {
        out << ",component_" << c + 1;
    }
    out << '\n';
    for (std::size_t i = 0; i < r.forecast.size(); ++i) {
        out << format_timestamp(ts.time_at(first_index + i)) << ',' << r.actual[i] << ','
            << r.forecast[i];
        if (i < r.component_forecasts.size()) {
            for (double v : r.component_forecasts[i]) {
                out << ',' << v;
            }
        }
        out << '\n';
    }
}

Json to_json(const ScenarioReport& r) {
    Json j{{"preset", r.preset},
           {"engine", to_string(r.engine)},
           {"scenario", to_string(r.scenario)},
           {"seed", r.seed},
           {"mape", optional_number(r.mape)},
           {"rmse", optional_number(r.rmse)},
           {"test_points", r.test_points},
           {"components", r.components}};
    if (r.error) {
        j["error"] = *r.error;
    }
    return j;
}

Json reports_json(const std::vector<ScenarioReport>& reports) {
    Json arr = Json::array();
    for (const auto& r : reports) {
        arr.push_back(to_json(r));
    }
    return arr;
}

std::string render_table(const std::vector<ScenarioReport>& reports) {
    std::vector<std::string> presets;
    for (const auto& r : reports) {
        if (std::ranges::find(presets, r.preset) == presets.end()) {
            presets.push_back(r.preset);
        }
    }
    std::ostringstream out;
    out << std::fixed;
    for (const auto& preset : presets) {
        const bool with_mape = std::ranges::any_of(
            reports, [&](const ScenarioReport& r) { return r.preset == preset && r.mape; });
        out << "Preset: " << preset << " (median over seeds)\n";
        out << std::left << std::setw(19) << "Prediction Engine" << std::setw(10) << "Scenario";
        if (with_mape) {
            out << std::right << std::setw(10) << "MAPE";
        }
        out << std::right << std::setw(12) << "RMSE" << std::setw(12) << "Runtime[s]"
            << std::setw(8) << "Failed" << '\n';
        for (auto engine : {Engine::ELM, Engine::SVR}) {
            for (auto sc : {Scenario::I, Scenario::II, Scenario::III}) {
                std::vector<double> mapes;
                double runtime = 0.0;
                int count = 0;
                int failed = 0;
                for (const auto& r : reports) {
                    if (r.preset != preset || r.engine != engine || r.scenario != sc) continue;
                    ++count;
                    runtime += r.runtime_seconds;
                    if (r.error) {
                        ++failed;
                    } else if (r.mape) {
                        mapes.push_back(*r.mape);
                    }
                }
                if (count == 0) continue;
                std::ranges::sort(mapes);
                out << std::left << std::setw(19) << (engine == Engine::ELM ? "ELM" : "SVR")
                    << std::setw(10) << to_string(sc) << std::right;
                if (with_mape) {
                    double med = std::nan("");
                    if (!mapes.empty()) {
                        const auto mid = mapes.size() / 2;
                        med = mapes.size() % 2 ? mapes[mid] : (mapes[mid - 1] + mapes[mid]) / 2.0;
                    }
                    out << std::setw(10) << std::setprecision(4) << med;
                }
                out << std::setw(12) << std::setprecision(4)
                    << median_rmse(reports, preset, engine, sc) << std::setw(12)
                    << std::setprecision(1) << runtime << std::setw(8) << failed << '\n';
            }
        }
        out << '\n';
    }
    return out.str();
}

void write_boundary_csv(const BoundaryDivergence& b, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "imf_index,sample_offset,divergence\n";
    for (std::size_t k = 0; k < b.per_imf.size(); ++k) {
        for (std::size_t i = 0; i < b.per_imf[k].size(); ++i) {
            out << k + 1 << ',' << i << ',' << b.per_imf[k][i] << '\n';
        }
    }
}

void write_json(const Json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path.string() + "'");
    }
    out << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path.string() + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError("malformed JSON in '" + path.string() + "': " + e.what());
    }
}

} // namespace emdcast
