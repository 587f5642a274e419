// run_config.hpp - run configuration and its text format
//
// The format is flat key=value tokens separated by whitespace; '#' starts a
// comment. A line "[itfh]" (or any other scheme name) opens a section whose
// keys apply only when that scheme is selected. Command-line overrides are
// applied last.

#pragma once

#include "itfh/analysis.hpp"
#include "itfh/channel.hpp"
#include "itfh/config.hpp"
#include "itfh/montecarlo.hpp"
#include "itfh/waveform.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace itfh::cli {

enum class Mode { Simulate, Analytic, Efficiency, Plane, ValidateWaveform, Figure };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view name);

struct PowerGrid {
    double start_dbm = -55.0;
    double stop_dbm = -20.0;
    double step_db = 1.0;

    std::vector<double> points() const;
};

struct RunConfig {
    Mode mode = Mode::Simulate;
    std::optional<Scheme> scheme;
    SchemeParams params;
    NoiseEnvironment env;
    PowerGrid grid;
    bool grid_explicit = false; // a popt key was given; figure presets keep their own grid otherwise
    double R_b = 27.5e6;
    std::uint64_t seed = 1;
    StoppingRule rule;
    bool max_symbols_explicit = false;
    int workers = 0;
    std::string output = "-";
    MppmBackend backend = MppmBackend::Bessel;
    std::string figure;
    std::uint64_t trials = 20000;
    WaveformConfig waveform;
    bool figure_simulation = true;
};

struct Override {
    std::string key;
    std::string value;
};

struct KeyInfo {
    std::string name;
    std::string help;
};

// Every accepted key, for help text and flag generation.
const std::vector<KeyInfo>& config_keys();

// Throws ConfigError with "<source>:<line>: ..." diagnostics.
RunConfig parse_config(std::string_view text, std::string_view source = "config",
                       const std::vector<Override>& overrides = {});

RunConfig load_config(const std::string& path, const std::vector<Override>& overrides = {});

// Short "N=8 w=4 MF=16 m=0.9" description of the fields a scheme uses.
std::string describe(const SchemeParams& p);

} // namespace itfh::cli
