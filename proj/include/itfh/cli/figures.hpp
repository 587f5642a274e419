// figures.hpp - named presets that regenerate the data behind each figure

#pragma once

#include "itfh/cli/run_config.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace itfh::cli {

enum class SeriesKind { Simulated, Bessel, UnionBound, Exact };
enum class Metric { Ser, Ber };

std::string_view to_string(SeriesKind k);
std::string_view to_string(Metric m);

struct FigureSeries {
    std::string name;
    SchemeParams params;
    double R_b = 0.0;
    SeriesKind kind = SeriesKind::Simulated;
    Metric metric = Metric::Ser;
};

struct FigurePreset {
    std::string name;
    std::string title;
    PowerGrid grid;
    std::vector<FigureSeries> series;
    // Efficiency-plane presets carry no series, only these parameters.
    bool plane = false;
    double plane_m = 0.9;
    double plane_L_m = 0.7;
};

const std::vector<FigurePreset>& figure_presets();
const FigurePreset& find_figure(std::string_view name); // throws ConfigError
std::vector<std::string> figure_names();

} // namespace itfh::cli
