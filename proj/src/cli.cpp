#include "emdcast/cli.hpp"

#include "emdcast/ensemble.hpp"
#include "emdcast/io.hpp"
#include "emdcast/metrics.hpp"
#include "emdcast/spectral.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace emdcast {

namespace {

namespace fs = std::filesystem;

struct CommandInfo {
    Command command;
    const char* name;
    const char* help;
};

constexpr CommandInfo kCommands[] = {
    {Command::Decompose, "decompose", "Decompose a series into IMFs and a residual"},
    {Command::Spectral, "spectral", "STFT magnitude spectrogram of a series or one of its IMFs"},
    {Command::Pacf, "pacf", "Partial autocorrelation of a series or one of its IMFs"},
    {Command::Forecast, "forecast", "Fit a per-component forecaster and forecast the test range"},
    {Command::Scenario, "scenario", "Run benchmark scenarios I, II and/or III on one series"},
    {Command::Suite, "suite", "Full benchmark: presets x engines x scenarios x seeds"},
    {Command::Boundary, "boundary", "IMF divergence near the end when future samples are missing"},
    {Command::Synth, "synth", "Generate a synthetic load-like or wind-like series"},
};

using C = Command;

struct KeyInfo {
    const char* name;
    const char* help;
    std::set<Command> commands;
    bool is_flag = false;
};

const std::set<Command> kSeriesCommands{C::Decompose, C::Spectral, C::Pacf, C::Forecast,
                                        C::Scenario,  C::Boundary, C::Synth};
const std::set<Command> kDecomposing{C::Decompose, C::Spectral, C::Pacf,
                                     C::Forecast,  C::Scenario, C::Suite};
const std::set<Command> kSifting{C::Decompose, C::Spectral, C::Pacf,    C::Forecast,
                                 C::Scenario,  C::Suite,    C::Boundary};
const std::set<Command> kForecasting{C::Forecast, C::Scenario, C::Suite};
const std::set<Command> kAll{C::Decompose, C::Spectral, C::Pacf,     C::Forecast,
                             C::Scenario,  C::Suite,    C::Boundary, C::Synth};

const std::vector<KeyInfo>& keys() {
    static const std::vector<KeyInfo> k{
        {"output-dir", "Directory for outputs and run_manifest.json", kAll},
        {"threads", "Worker thread cap (0 = machine parallelism)", kAll},
        {"input", "Input CSV (timestamp,value); omit to use a synthetic preset",
         {C::Decompose, C::Spectral, C::Pacf, C::Forecast, C::Scenario, C::Boundary}},
        {"preset", "Synthetic preset: load or wind", kSeriesCommands},
        {"length", "Synthetic series length", kAll},
        {"seed", "Master seed", kSeriesCommands},
        {"method", "Decomposition: emd, eemd, ceemd (forecast/scenario also accept none)",
         kDecomposing},
        {"ne", "Ensemble size", kDecomposing},
        {"noise-fraction", "Noise std as a fraction of the series std", kDecomposing},
        {"boundary", "Boundary policy: linear, mirror or clamp", kSifting},
        {"max-imfs", "IMF cap (never above floor(log2 N))", kSifting},
        {"max-sift", "Sifting iterations per IMF", kSifting},
        {"epsilon", "Absolute stop threshold for the mean envelope", kSifting},
        {"stop-norm", "Mean-envelope norm: max-abs or mean-abs", kSifting},
        {"engine", "Forecast engine: elm or svr", {C::Forecast, C::Scenario}},
        {"engines", "Comma-separated engines", {C::Suite}},
        {"presets", "Comma-separated presets", {C::Suite}},
        {"seeds", "Comma-separated seeds", {C::Suite}},
        {"scenario", "I, II, III or all (comma-separated allowed)", {C::Scenario}},
        {"k", "Lags kept by mRMR per component", kForecasting},
        {"bins", "Histogram bins for mutual information", kForecasting},
        {"lags", "Comma-separated candidate lag pool", kForecasting},
        {"folds", "Cross-validation folds", kForecasting},
        {"cv-rows", "Most recent rows used by grid search (0 = all)", kForecasting},
        {"train-fraction", "Training share of the series", kForecasting},
        {"test-steps", "Test points evaluated after the split (0 = all)", kForecasting},
        {"refit", "Scenario II: refit every engine at each step", {C::Scenario, C::Suite}, true},
        {"sliding-window", "Scenario II: decompose only the most recent samples",
         {C::Scenario, C::Suite}},
        {"model", "Load a saved model JSON instead of fitting", {C::Forecast}},
        {"window", "STFT window length / boundary comparison window", {C::Spectral, C::Boundary}},
        {"hop", "STFT hop", {C::Spectral}},
        {"max-lag", "Largest PACF lag", {C::Pacf}},
        {"imf", "Analyse IMF k (0 = raw series)", {C::Spectral, C::Pacf}},
        {"lookahead", "Future samples withheld from the truncated decomposition", {C::Boundary}},
    };
    return k;
}

const KeyInfo* find_key(const std::string& name) {
    for (const auto& k : keys()) {
        if (name == k.name) {
            return &k;
        }
    }
    return nullptr;
}

std::string trim(std::string s) {
    const auto ws = " \t\r\n";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
}

std::map<std::string, std::string> read_config_file(const fs::path& path, Command command) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file " + path.string());
    }
    std::map<std::string, std::string> out;
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        const auto where = path.string() + ":" + std::to_string(lineno);
        if (eq == std::string::npos) {
            throw UsageError(where + ": expected 'key = value'");
        }
        auto key = trim(line.substr(0, eq));
        std::replace(key.begin(), key.end(), '_', '-');
        const auto* info = find_key(key);
        if (!info || !info->commands.contains(command)) {
            throw UsageError(where + ": unknown key '" + key + "' for this command");
        }
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw UsageError("invalid value '" + text + "' for --" + key);
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw UsageError("invalid boolean '" + text + "' for --" + key);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<Scenario> parse_scenarios(const std::string& text) {
    if (lower(text) == "all") {
        return {Scenario::I, Scenario::II, Scenario::III};
    }
    std::vector<Scenario> out;
    for (const auto& s : split_list(text)) {
        out.push_back(parse_scenario(s));
    }
    if (out.empty()) {
        throw UsageError("--scenario needs at least one of I, II, III");
    }
    return out;
}

bool uses_ensemble(const std::optional<Method>& m) {
    return m && *m != Method::EMD;
}

// Fills typed fields from the merged settings. Module parse errors become usage errors.
void apply_settings(CliConfig& cfg) {
    const auto& f = cfg.flags;
    const auto get = [&f](const char* key) -> const std::string* {
        const auto it = f.find(key);
        return it == f.end() ? nullptr : &it->second;
    };
    const auto size_of = [&](const char* key, std::size_t& target) {
        if (const auto* v = get(key)) target = parse_number<std::size_t>(key, *v);
    };

    if (const auto* v = get("output-dir")) cfg.output_dir = *v;
    if (const auto* v = get("threads")) cfg.threads = parse_number<unsigned>("threads", *v);
    if (const auto* v = get("input")) cfg.input_path = fs::path(*v);
    if (const auto* v = get("preset")) cfg.preset = parse_preset(lower(*v));
    size_of("length", cfg.length);
    if (const auto* v = get("seed")) cfg.seed = parse_number<std::uint64_t>("seed", *v);

    if (cfg.command == Command::Suite) {
        cfg.method = Method::CEEMD;
        cfg.ensemble.num_ensembles = SuiteOptions{}.num_ensembles;
    }
    if (const auto* v = get("method")) {
        const auto m = lower(*v);
        if (m == "none") {
            if (cfg.command != Command::Forecast && cfg.command != Command::Scenario) {
                throw UsageError("--method none is only valid for forecast and scenario");
            }
            cfg.method.reset();
        } else {
            cfg.method = parse_method(m);
        }
    }
    if (const auto* v = get("ne")) cfg.ensemble.num_ensembles = parse_number<int>("ne", *v);
    if (const auto* v = get("noise-fraction")) {
        cfg.ensemble.noise_std_fraction = parse_number<double>("noise-fraction", *v);
    }
    auto& sift = cfg.ensemble.sift;
    if (const auto* v = get("boundary")) sift.boundary = parse_boundary_policy(lower(*v));
    if (const auto* v = get("max-imfs")) sift.max_imfs = parse_number<int>("max-imfs", *v);
    if (const auto* v = get("max-sift")) {
        sift.max_sift_iterations = parse_number<int>("max-sift", *v);
    }
    if (const auto* v = get("epsilon")) sift.epsilon = parse_number<double>("epsilon", *v);
    if (const auto* v = get("stop-norm")) sift.stop_norm = parse_stop_norm(lower(*v));

    if (const auto* v = get("engine")) cfg.engine = parse_engine(lower(*v));
    if (const auto* v = get("engines")) {
        cfg.engines.clear();
        for (const auto& e : split_list(*v)) cfg.engines.push_back(parse_engine(lower(e)));
    }
    if (const auto* v = get("presets")) {
        cfg.presets.clear();
        for (const auto& p : split_list(*v)) cfg.presets.push_back(parse_preset(lower(p)));
    }
    if (const auto* v = get("seeds")) {
        cfg.seeds.clear();
        for (const auto& s : split_list(*v)) {
            cfg.seeds.push_back(parse_number<std::uint64_t>("seeds", s));
        }
    }
    if (const auto* v = get("scenario")) cfg.scenarios = parse_scenarios(*v);

    auto& fc = cfg.forecast;
    size_of("k", fc.mrmr_k);
    if (const auto* v = get("bins")) fc.mi_bins = parse_number<int>("bins", *v);
    if (const auto* v = get("lags")) {
        fc.lag_pool.clear();
        for (const auto& l : split_list(*v)) fc.lag_pool.push_back(parse_number<int>("lags", l));
    }
    if (const auto* v = get("folds")) fc.cv_folds = parse_number<int>("folds", *v);
    size_of("cv-rows", fc.cv_max_rows);
    auto& so = cfg.scenario_options;
    if (const auto* v = get("train-fraction")) {
        so.train_fraction = parse_number<double>("train-fraction", *v);
    }
    size_of("test-steps", so.max_test_steps);
    if (const auto* v = get("refit")) so.refit_each_step = parse_bool("refit", *v);
    size_of("sliding-window", so.sliding_window);
    if (const auto* v = get("model")) cfg.model_path = fs::path(*v);

    if (cfg.command == Command::Boundary) {
        cfg.boundary_window = 48;
        size_of("window", cfg.boundary_window);
    } else {
        size_of("window", cfg.window);
    }
    size_of("hop", cfg.hop);
    size_of("max-lag", cfg.max_lag);
    size_of("imf", cfg.imf);
    size_of("lookahead", cfg.lookahead);

    if (cfg.seed) {
        cfg.ensemble.master_seed = *cfg.seed;
        fc.seed = *cfg.seed;
    }
    fc.decomposition = cfg.method;
    fc.ensemble = cfg.ensemble;
    fc.engine = cfg.engine;
}

void validate(const CliConfig& cfg) {
    const auto c = cfg.command;
    const bool synthetic = !cfg.input_path && kSeriesCommands.contains(c);
    const bool random_decomposition =
        uses_ensemble(cfg.method) &&
        (c == C::Decompose || ((c == C::Spectral || c == C::Pacf) && cfg.imf > 0));
    const bool needs_seed = synthetic || random_decomposition || c == C::Forecast ||
                            c == C::Scenario || c == C::Synth;
    if (c == C::Suite) {
        if (cfg.seeds.empty()) {
            throw UsageError("suite needs --seeds (e.g. --seeds 1,2,3,4,5)");
        }
    } else if (needs_seed && !cfg.seed) {
        throw UsageError(std::string(to_string(c)) +
                         " is randomized; pass --seed or set seed in the config file");
    }
    if (cfg.length < 8) {
        throw UsageError("--length must be at least 8");
    }
    if (cfg.method) {
        cfg.ensemble.validate(*cfg.method);
    } else {
        cfg.ensemble.sift.validate();
    }
    if (kForecasting.contains(c)) {
        cfg.forecast.validate();
        const double tf = cfg.scenario_options.train_fraction;
        if (!(tf > 0.0 && tf < 1.0)) {
            throw UsageError("--train-fraction must lie in (0, 1)");
        }
    }
    if (c == C::Spectral && (cfg.window == 0 || cfg.window % 2 != 0 || cfg.hop == 0)) {
        throw UsageError("--window must be even and positive, --hop positive");
    }
    if (c == C::Pacf && cfg.max_lag == 0) {
        throw UsageError("--max-lag must be positive");
    }
}

TimeSeries load_series(const CliConfig& cfg) {
    if (cfg.input_path) {
        return load_csv(*cfg.input_path);
    }
    return synth_generate(preset_spec(cfg.preset, cfg.length, cfg.seed.value_or(0)));
}

Decomposition decompose_for(const CliConfig& cfg, std::span<const double> x) {
    return decompose(x, cfg.method.value_or(Method::EMD), cfg.ensemble);
}

// Series or one of its IMFs, for the spectral and pacf commands.
std::vector<double> analysed_signal(const CliConfig& cfg, const TimeSeries& ts) {
    if (cfg.imf == 0) {
        return {ts.values().begin(), ts.values().end()};
    }
    auto d = decompose_for(cfg, ts.values());
    if (cfg.imf > d.imfs.size()) {
        throw InputError("requested IMF " + std::to_string(cfg.imf) + " but the decomposition has " +
                         std::to_string(d.imfs.size()));
    }
    return std::move(d.imfs[cfg.imf - 1]);
}

Json effective_json(const CliConfig& cfg) {
    Json j;
    j["command"] = to_string(cfg.command);
    j["settings"] = cfg.flags;
    j["input"] = cfg.input_path ? Json(cfg.input_path->string()) : Json(nullptr);
    if (!cfg.input_path && kSeriesCommands.contains(cfg.command)) {
        j["synthetic"] = {{"preset", to_string(cfg.preset)}, {"length", cfg.length},
                          {"seed", cfg.seed.value_or(0)}};
    }
    j["seed"] = cfg.seed ? Json(*cfg.seed) : Json(nullptr);
    j["method"] = method_label(cfg.method);
    j["ensemble"] = to_json(cfg.ensemble);
    j["threads"] = cfg.threads;
    switch (cfg.command) {
    case C::Forecast:
    case C::Scenario:
        j["forecast"] = to_json(cfg.forecast);
        j["scenario_options"] = {{"train_fraction", cfg.scenario_options.train_fraction},
                                 {"max_test_steps", cfg.scenario_options.max_test_steps},
                                 {"refit_each_step", cfg.scenario_options.refit_each_step},
                                 {"sliding_window", cfg.scenario_options.sliding_window}};
        if (cfg.command == C::Scenario) {
            Json s = Json::array();
            for (auto sc : cfg.scenarios) s.push_back(to_string(sc));
            j["scenarios"] = s;
        }
        if (cfg.model_path) j["model"] = cfg.model_path->string();
        break;
    case C::Suite: {
        Json p = Json::array(), e = Json::array();
        for (auto x : cfg.presets) p.push_back(to_string(x));
        for (auto x : cfg.engines) e.push_back(to_string(x));
        j["presets"] = p;
        j["engines"] = e;
        j["seeds"] = cfg.seeds;
        j["length"] = cfg.length;
        j["forecast"] = to_json(cfg.forecast);
        break;
    }
    case C::Spectral:
        j["window"] = cfg.window;
        j["hop"] = cfg.hop;
        j["imf"] = cfg.imf;
        break;
    case C::Pacf:
        j["max_lag"] = cfg.max_lag;
        j["imf"] = cfg.imf;
        break;
    case C::Boundary:
        j["lookahead"] = cfg.lookahead;
        j["window"] = cfg.boundary_window;
        break;
    default:
        break;
    }
    return j;
}

struct RunResult {
    std::vector<std::string> outputs;
    Json summary = Json::object();
};

void run_command(const CliConfig& cfg, RunResult& out) {
    const auto dir = cfg.output_dir;
    const auto emit = [&](const std::string& name) {
        out.outputs.push_back(name);
        return dir / name;
    };

    switch (cfg.command) {
    case C::Synth: {
        const auto ts = synth_generate(preset_spec(cfg.preset, cfg.length, *cfg.seed));
        write_csv(ts, emit("series.csv"));
        out.summary["length"] = ts.size();
        break;
    }
    case C::Decompose: {
        const auto ts = load_series(cfg);
        const auto d = decompose_for(cfg, ts.values());
        write_decomposition_csv(ts, d, emit("decomposition.csv"));
        write_json(decomposition_metadata(d, cfg.ensemble), emit("decomposition.json"));
        out.summary["imf_count"] = d.imf_count();
        std::cout << method_label(cfg.method) << ": " << d.imf_count() << " IMFs + residual, "
                  << ts.size() << " samples\n";
        break;
    }
    case C::Spectral: {
        const auto ts = load_series(cfg);
        const auto signal = analysed_signal(cfg, ts);
        const auto s = stft(signal, cfg.window, cfg.hop);
        write_spectrogram_csv(s, emit("spectrogram.csv"));
        out.summary["frames"] = s.frames();
        out.summary["bins"] = s.bins();
        out.summary["dominant_bins"] = dominant_bins(s);
        break;
    }
    case C::Pacf: {
        const auto ts = load_series(cfg);
        const auto signal = analysed_signal(cfg, ts);
        const auto p = pacf(signal, cfg.max_lag);
        write_pacf_csv(p, emit("pacf.csv"));
        out.summary["confidence_band"] = p.confidence_band;
        break;
    }
    case C::Boundary: {
        const auto ts = load_series(cfg);
        const auto b = boundary_divergence(ts, cfg.lookahead, cfg.ensemble.sift, cfg.boundary_window);
        write_boundary_csv(b, emit("boundary.csv"));
        std::vector<double> peaks;
        for (const auto& imf : b.per_imf) {
            peaks.push_back(imf.empty() ? 0.0 : *std::max_element(imf.begin(), imf.end()));
        }
        out.summary["max_divergence_per_imf"] = peaks;
        break;
    }
    case C::Forecast: {
        const auto ts = load_series(cfg);
        const auto [train, test] = train_test_split(ts, cfg.scenario_options.train_fraction);
        const auto model = cfg.model_path ? forecast_model_from_json(read_json(*cfg.model_path))
                                          : fit_forecaster(train, cfg.forecast);
        if (model.method != cfg.forecast.decomposition) {
            throw InputError("saved model uses method " + method_label(model.method) +
                             ", configuration says " + method_label(cfg.forecast.decomposition));
        }
        write_json(to_json(model), emit("model.json"));
        Json sel = Json::array();
        for (std::size_t c = 0; c < model.components.size(); ++c) {
            const bool residual = model.method && c + 1 == model.components.size();
            const auto name = !model.method ? std::string("series")
                              : residual    ? std::string("residual")
                                            : "imf" + std::to_string(c + 1);
            sel.push_back(selection_json(name, model.components[c].selection, cfg.forecast.mrmr_k,
                                         cfg.forecast.mi_bins));
        }
        write_json(sel, emit("selection.json"));

        // Real-time evaluation: every step only sees samples up to the forecast origin.
        const std::size_t cut = train.size();
        const auto& so = cfg.scenario_options;
        const std::size_t steps =
            so.max_test_steps == 0 ? test.size() : std::min(test.size(), so.max_test_steps);
        const auto x = ts.values();
        ScenarioReport r;
        r.scenario = Scenario::II;
        r.engine = model.engine;
        r.seed = cfg.forecast.seed;
        r.test_points = steps;
        r.components = model.components.size();
        r.actual.assign(x.begin() + static_cast<std::ptrdiff_t>(cut),
                        x.begin() + static_cast<std::ptrdiff_t>(cut + steps));
        auto h = model_histories(model, x.first(cut), cfg.forecast);
        r.forecast = forecast_series(model, std::move(h), steps,
                                     [&](std::size_t step, double, ComponentHistories& hist) {
                                         r.component_forecasts.push_back(
                                             forecast_components(model, hist));
                                         if (step + 1 < steps) {
                                             hist = model_histories(model, x.first(cut + step + 1),
                                                                    cfg.forecast);
                                         }
                                     });
        if (steps > 0) {
            r.rmse = rmse(r.actual, r.forecast);
            out.summary["rmse"] = r.rmse;
            if (std::none_of(r.actual.begin(), r.actual.end(), [](double v) { return v == 0.0; })) {
                out.summary["mape"] = mape(r.actual, r.forecast);
            }
        }
        write_forecast_csv(ts, cut, r, emit("forecast.csv"));
        out.summary["test_points"] = steps;
        std::cout << "forecast: " << steps << " test points";
        if (steps > 0) std::cout << ", RMSE " << r.rmse;
        std::cout << '\n';
        break;
    }
    case C::Scenario: {
        const auto ts = load_series(cfg);
        auto so = cfg.scenario_options;
        so.report_mape = std::none_of(ts.values().begin(), ts.values().end(),
                                      [](double v) { return v == 0.0; });
        DecompositionMemo memo;
        std::vector<ScenarioReport> reports;
        for (auto sc : cfg.scenarios) {
            auto r = run_scenario(sc, ts, cfg.forecast, so, memo.decomposer());
            r.preset = cfg.input_path ? cfg.input_path->stem().string() : to_string(cfg.preset);
            write_forecast_csv(ts, train_test_split(ts, so.train_fraction).first.size(), r,
                               emit("forecast_" + to_string(sc) + ".csv"));
            reports.push_back(std::move(r));
        }
        write_json(reports_json(reports), emit("report.json"));
        const auto table = render_table(reports);
        std::ofstream(emit("table.txt")) << table;
        std::cout << table;
        break;
    }
    case C::Suite: {
        SuiteOptions opts;
        opts.length = cfg.length;
        opts.base = cfg.forecast;
        opts.scenario = cfg.scenario_options;
        opts.threads = cfg.threads;
        opts.num_ensembles = cfg.ensemble.num_ensembles;
        const auto reports = run_benchmark_suite(cfg.presets, cfg.engines, cfg.seeds, opts);
        write_json(reports_json(reports), emit("suite_report.json"));
        const auto table = render_table(reports);
        std::ofstream(emit("suite_table.txt")) << table;
        std::cout << table;
        const auto failed = std::count_if(reports.begin(), reports.end(),
                                          [](const auto& r) { return r.error.has_value(); });
        out.summary["cells"] = reports.size();
        out.summary["failed_cells"] = failed;
        break;
    }
    }
}

} // namespace

std::string to_string(Command c) {
    for (const auto& info : kCommands) {
        if (info.command == c) return info.name;
    }
    return "?";
}

std::string usage() {
    std::ostringstream os;
    os << "usage: emdcast <command> [options]\n\ncommands:\n";
    for (const auto& info : kCommands) {
        os << "  " << info.name << std::string(12 - std::string(info.name).size(), ' ')
           << info.help << '\n';
    }
    os << "\nSettings merge as defaults <- --config FILE (key = value) <- flags.\n"
          "Run 'emdcast <command> --help' for the options of a command.\n";
    return os.str();
}

CliConfig parse_args(int argc, const char* const* argv) {
    if (argc < 2) {
        throw UsageError(usage());
    }
    CLI::App app{"EMD-family decomposition and per-component forecasting", "emdcast"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every command");

    std::map<std::string, std::string> raw;
    std::map<std::string, bool> raw_flags;
    std::map<Command, CLI::App*> subs;
    std::map<Command, CLI::Option*> config_opts;
    std::string config_path;
    for (const auto& info : kCommands) {
        auto* sub = app.add_subcommand(info.name, info.help);
        subs[info.command] = sub;
        config_opts[info.command] =
            sub->add_option("--config", config_path, "Flat 'key = value' settings file");
        for (const auto& k : keys()) {
            if (!k.commands.contains(info.command)) continue;
            std::string flag = std::string("--") + k.name;
            if (flag == "--output-dir") flag = "-o," + flag;
            if (k.is_flag) {
                sub->add_flag(flag, raw_flags[k.name], k.help);
            } else {
                sub->add_option(flag, raw[k.name], k.help)->type_name("VALUE");
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.get_subcommands().empty() ? app.help()
                                                          : app.get_subcommands().front()->help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + usage());
    }

    CliConfig cfg;
    const auto* sub = app.get_subcommands().front();
    for (const auto& info : kCommands) {
        if (subs[info.command] == sub) cfg.command = info.command;
    }

    if (config_opts[cfg.command]->count() > 0) {
        cfg.flags = read_config_file(config_path, cfg.command);
    }
    for (const auto& k : keys()) {
        if (!k.commands.contains(cfg.command)) continue;
        const auto* opt = sub->get_option(std::string("--") + k.name);
        if (opt->count() == 0) continue;
        cfg.flags[k.name] = k.is_flag ? "true" : raw[k.name];
    }

    try {
        apply_settings(cfg);
        validate(cfg);
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw UsageError(std::string(e.what()) + "\nRun 'emdcast " + to_string(cfg.command) +
                         " --help' for the accepted options.");
    }
    return cfg;
}

int dispatch(const CliConfig& config) {
    int code = kExitOk;
    std::string error;
    RunResult result;
    try {
        fs::create_directories(config.output_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: cannot create output directory " << config.output_dir << ": "
                  << e.what() << '\n';
        return kExitInput;
    }
    try {
        run_command(config, result);
    } catch (const InputError& e) {
        code = kExitInput;
        error = e.what();
    } catch (const std::exception& e) {
        code = kExitComputation;
        error = e.what();
    }
    if (code != kExitOk) {
        std::cerr << "error: " << to_string(config.command) << ": " << error << '\n';
    }

    Json manifest = effective_json(config);
    manifest["exit_code"] = code;
    manifest["error"] = error.empty() ? Json(nullptr) : Json(error);
    manifest["outputs"] = result.outputs;
    manifest["summary"] = result.summary;
    try {
        write_json(manifest, config.output_dir / "run_manifest.json");
    } catch (const std::exception& e) {
        std::cerr << "error: cannot write run manifest: " << e.what() << '\n';
        if (code == kExitOk) code = kExitInput;
    }
    return code;
}

int run_cli(int argc, const char* const* argv) {
    CliConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const HelpRequested& h) {
        std::cout << h.what();
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << e.what();
        if (std::string_view(e.what()).back() != '\n') std::cerr << '\n';
        return kExitUsage;
    }
    return dispatch(cfg);
}

} // namespace emdcast
