#include "itfh/cli/figures.hpp"

#include "itfh/errors.hpp"

#include <sstream>

namespace itfh::cli {

std::string_view to_string(SeriesKind k)
{
    switch (k) {
    case SeriesKind::Simulated: return "sim";
    case SeriesKind::Bessel: return "bessel";
    case SeriesKind::UnionBound: return "ub";
    case SeriesKind::Exact: return "exact";
    }
    return "?";
}

std::string_view to_string(Metric m)
{
    return m == Metric::Ser ? "ser" : "ber";
}

namespace {

FigureSeries series(const SchemeParams& p, double R_b, SeriesKind kind, Metric metric)
{
    FigureSeries s;
    s.params = p;
    s.R_b = R_b;
    s.kind = kind;
    s.metric = metric;
    std::ostringstream os;
    os << to_string(p.scheme) << ' ' << describe(p) << " Rb=" << R_b / 1e6 << "M " << to_string(kind);
    s.name = os.str();
    return s;
}

// Simulation plus the listed analytic approximations for one configuration.
void add(std::vector<FigureSeries>& out, const SchemeParams& p, double R_b, Metric metric,
         std::initializer_list<SeriesKind> kinds)
{
    for (SeriesKind k : kinds)
        out.push_back(series(p, R_b, k, metric));
}

std::vector<FigurePreset> build()
{
    using K = SeriesKind;
    std::vector<FigurePreset> v;

    {
        FigurePreset f;
        f.name = "fig3";
        f.title = "spectral efficiency against inverse asymptotic power efficiency";
        f.plane = true;
        f.plane_m = 0.9;
        f.plane_L_m = 0.7;
        v.push_back(f);
    }
    {
        FigurePreset f;
        f.name = "fig5";
        f.title = "MPPM symbol error, N = 12, w = 5";
        f.grid = {-36.0, -25.0, 0.5};
        add(f.series, SchemeParams::mppm(12, 5), 27.5e6, Metric::Ser, {K::Simulated, K::UnionBound, K::Bessel});
        v.push_back(f);
    }
    for (const auto& [name, metric] : {std::pair{"fig6", Metric::Ser}, std::pair{"fig7", Metric::Ber}}) {
        FigurePreset f;
        f.name = name;
        f.title = metric == Metric::Ser ? "symbol error at 27.5 Mbps" : "bit error at 27.5 Mbps";
        f.grid = {-36.0, -24.0, 0.5};
        add(f.series, SchemeParams::itfh(8, 4, 16, 0.9), 27.5e6, metric, {K::Simulated, K::Bessel});
        add(f.series, SchemeParams::qam_mppm(8, 4, 16, 0.9), 27.5e6, metric, {K::Simulated, K::Bessel});
        add(f.series, SchemeParams::sppm(8, 4, 0.5), 27.5e6, metric, {K::Simulated, K::UnionBound});
        add(f.series, SchemeParams::mppm(8, 4), 27.5e6, metric, {K::Simulated});
        v.push_back(f);
    }
    {
        FigurePreset f;
        f.name = "fig8";
        f.title = "bit error against modulation index, N = 8, w = 2, 50 Mbps";
        f.grid = {-36.0, -22.0, 0.5};
        for (double m : {0.5, 0.7, 0.9}) {
            add(f.series, SchemeParams::itfh(8, 2, 8, m), 50e6, Metric::Ber, {K::Simulated, K::UnionBound, K::Bessel});
            add(f.series, SchemeParams::qam_mppm(8, 2, 8, m), 50e6, Metric::Ber, {K::Simulated, K::UnionBound, K::Bessel});
        }
        v.push_back(f);
    }
    {
        FigurePreset f;
        f.name = "fig9";
        f.title = "bit error against alphabet size, N = 32, w = 4, m = 0.5";
        f.grid = {-36.0, -16.0, 0.5};
        const std::pair<int, double> cases[] = {{4, 100e6}, {8, 200e6}, {16, 300e6}, {32, 400e6}};
        for (const auto& [M, R_b] : cases) {
            add(f.series, SchemeParams::itfh(32, 4, M, 0.5), R_b, Metric::Ber, {K::Simulated, K::UnionBound, K::Bessel});
            add(f.series, SchemeParams::qam_mppm(32, 4, M, 0.5), R_b, Metric::Ber, {K::Simulated, K::UnionBound, K::Bessel});
        }
        v.push_back(f);
    }
    {
        FigurePreset f;
        f.name = "fig10";
        f.title = "bit error, I-TFH against SPPM";
        f.grid = {-38.0, -20.0, 0.5};
        add(f.series, SchemeParams::itfh(4, 2, 4, 0.9), 50e6, Metric::Ber, {K::Simulated, K::UnionBound, K::Bessel});
        add(f.series, SchemeParams::itfh(8, 2, 8, 0.9), 100e6, Metric::Ber, {K::Simulated, K::UnionBound, K::Bessel});
        add(f.series, SchemeParams::itfh(16, 4, 16, 0.9), 100e6, Metric::Ber, {K::Simulated, K::UnionBound, K::Bessel});
        add(f.series, SchemeParams::sppm(4, 4, 0.7), 50e6, Metric::Ber, {K::Simulated, K::UnionBound});
        add(f.series, SchemeParams::sppm(8, 8, 0.7), 100e6, Metric::Ber, {K::Simulated, K::UnionBound});
        add(f.series, SchemeParams::sppm(16, 4, 0.7), 100e6, Metric::Ber, {K::Simulated, K::UnionBound});
        v.push_back(f);
    }
    return v;
}

} // namespace

const std::vector<FigurePreset>& figure_presets()
{
    static const std::vector<FigurePreset> presets = build();
    return presets;
}

const FigurePreset& find_figure(std::string_view name)
{
    for (const auto& f : figure_presets())
        if (f.name == name)
            return f;
    throw ConfigError("unknown figure '" + std::string(name) + "' (expected fig3 or fig5..fig10)");
}

std::vector<std::string> figure_names()
{
    std::vector<std::string> names;
    for (const auto& f : figure_presets())
        names.push_back(f.name);
    return names;
}

} // namespace itfh::cli
