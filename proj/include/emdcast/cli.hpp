#pragma once

#include "emdcast/bench.hpp"
#include "emdcast/error.hpp"
#include "emdcast/pipeline.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace emdcast {

/// Bad command line or configuration file. Maps to exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

enum class Command { Decompose, Spectral, Pacf, Forecast, Scenario, Suite, Boundary, Synth };

std::string to_string(Command c);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitComputation = 3;

struct CliConfig {
    Command command = Command::Decompose;
    std::optional<std::filesystem::path> input_path;
    std::filesystem::path output_dir = ".";
    /// nullopt: no decomposition (forecast and scenario only).
    std::optional<Method> method = Method::CEEMD;
    EnsembleConfig ensemble;
    Engine engine = Engine::ELM;
    Preset preset = Preset::Load;
    std::size_t length = 2000;
    std::optional<std::uint64_t> seed;
    std::vector<Scenario> scenarios{Scenario::I, Scenario::II, Scenario::III};

    // suite
    std::vector<Preset> presets{Preset::Load, Preset::Wind};
    std::vector<Engine> engines{Engine::ELM, Engine::SVR};
    std::vector<std::uint64_t> seeds;

    ForecastConfig forecast;
    ScenarioOptions scenario_options;
    std::optional<std::filesystem::path> model_path;

    std::size_t window = 256;
    std::size_t hop = 64;
    std::size_t max_lag = 200;
    /// 0 analyses the raw series; k >= 1 analyses IMF k.
    std::size_t imf = 0;
    std::size_t lookahead = 48;
    std::size_t boundary_window = 48;
    unsigned threads = 0;

    /// Effective key/value settings after merging defaults, config file and flags.
    std::map<std::string, std::string> flags;
};

/// Defaults, then `--config` file (flat `key = value`), then command-line flags. Throws
/// UsageError on unknown flags, bad values or missing required settings; `--help` throws
/// HelpRequested.
CliConfig parse_args(int argc, const char* const* argv);

/// Thrown by parse_args when help output was requested; carries the text.
class HelpRequested : public Error {
public:
    using Error::Error;
};

std::string usage();

/// Runs the command, writes outputs and run_manifest.json into output_dir, returns the
/// exit code. Never throws.
int dispatch(const CliConfig& config);

/// parse_args + dispatch with error reporting on stderr.
int run_cli(int argc, const char* const* argv);

} // namespace emdcast
