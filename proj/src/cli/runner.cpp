#include "itfh/cli/runner.hpp"

#include "itfh/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace itfh::cli {

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::string fmt_power(double dbm)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", dbm);
    return buf;
}

RunOptions run_options(const RunConfig& cfg)
{
    RunOptions o;
    o.workers = cfg.workers;
    return o;
}

const SchemeParams& scheme_params(const RunConfig& cfg)
{
    if (!cfg.scheme)
        throw ConfigError("a scheme is required for this mode");
    return cfg.params;
}

} // namespace

LinkState link_at(const SchemeParams& p, const NoiseEnvironment& env, double popt_dbm, double R_b)
{
    return link_state_from_optical_power(dbm_to_watts(popt_dbm), p, env, slot_duration_for_rate(p, R_b));
}

AnalyticPoint analytic_point(const SchemeParams& p, const LinkState& l, MppmBackend backend)
{
    AnalyticPoint a;
    switch (p.scheme) {
    case Scheme::ITFH:
    case Scheme::QAM_MPPM: {
        const auto est = mppm_ser(p.N, p.w, l.omega() / l.sigma_sq(), backend);
        const double pe_mppm = std::min(1.0, est.value);
        const double pe_mod = inner_ser(p, l);
        a.pe = compound_ser_from(p.w, pe_mppm, pe_mod);
        a.pb = compound_ber_from(p, pe_mppm, pe_mod);
        a.below_floor = a.pe < std::max(kReportingFloor, 10.0 * est.abs_error);
        a.exceeds_one = est.exceeds_one;
        a.backend = std::string(to_string(backend));
        break;
    }
    case Scheme::SPPM: {
        const auto e = sppm_error(p, l);
        a.pe = e.P_e_sppm;
        a.pb = e.P_b_sppm;
        a.below_floor = a.pe < kReportingFloor;
        a.backend = "ub";
        break;
    }
    case Scheme::MPPM:
    case Scheme::PPM: {
        const auto est = mppm_scheme_ser(p, l, backend);
        a.pe = est.value;
        a.pb = mppm_bit_from_symbol(bits_per_symbol(p).p2, est.value);
        a.below_floor = est.below_floor;
        a.exceeds_one = est.exceeds_one;
        a.backend = std::string(to_string(backend));
        break;
    }
    }
    return a;
}

void write_simulate(const RunConfig& cfg, std::ostream& out)
{
    const auto& p = scheme_params(cfg);
    const auto grid = cfg.grid.points();
    const auto stats = run_sweep(p, cfg.env, grid, cfg.R_b, cfg.rule, cfg.seed, run_options(cfg));
    out << "popt_dbm,ser,ser_ci95,ber,ber_ci95,symbols,seed\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& s = stats[i];
        out << fmt_power(grid[i]) << ',' << format_number(s.ser) << ',' << format_number(s.ci95_ser) << ','
            << format_number(s.ber) << ',' << format_number(s.ci95_ber) << ',' << s.symbols << ',' << s.seed << '\n';
    }
}

void write_analytic(const RunConfig& cfg, std::ostream& out, std::ostream& log)
{
    const auto& p = scheme_params(cfg);
    out << "popt_dbm,pe,pb,backend\n";
    for (double dbm : cfg.grid.points()) {
        const auto a = analytic_point(p, link_at(p, cfg.env, dbm, cfg.R_b), cfg.backend);
        if (a.exceeds_one)
            log << "note: union bound exceeds 1 at " << fmt_power(dbm) << " dBm\n";
        out << fmt_power(dbm) << ',' << (a.below_floor ? "nan" : format_number(a.pe)) << ','
            << (a.below_floor ? "nan" : format_number(a.pb)) << ',' << a.backend << '\n';
    }
}

void write_efficiency(const RunConfig& cfg, std::ostream& out)
{
    const auto& p = scheme_params(cfg);
    const auto e = efficiency(p);
    out << "scheme,params,rho,inv_eta_db\n";
    out << to_string(p.scheme) << ',' << describe(p) << ',' << format_number(e.rho) << ','
        << format_number(e.inv_eta_db) << '\n';
}

std::vector<PlaneRow> efficiency_plane(double m, double L_m)
{
    std::vector<PlaneRow> rows;
    auto push = [&](std::string scheme, std::string params, EfficiencyPoint e) {
        rows.push_back({std::move(scheme), std::move(params), std::move(e)});
    };
    for (int N = 2; N <= 512; N *= 2) {
        const std::string n = "N=" + std::to_string(N);
        push("ppm", n, efficiency_row(Scheme::PPM, N, 1, 0, m, L_m));
        for (int w = 1; w < N; ++w)
            push("mppm", n + " w=" + std::to_string(w), efficiency_row(Scheme::MPPM, N, w, 0, m, L_m));
        for (int M = 2; M <= 32; M *= 2)
            for (int w = 1; w < N; ++w)
                push("itfh", n + " w=" + std::to_string(w) + " MF=" + std::to_string(M),
                     efficiency_row(Scheme::ITFH, N, w, M, m, L_m));
        for (int M = 4; M <= 64; M *= 2)
            for (int w = 1; w < N; ++w)
                push("qam-mppm", n + " w=" + std::to_string(w) + " MQ=" + std::to_string(M),
                     efficiency_row(Scheme::QAM_MPPM, N, w, M, m, L_m));
        for (int M = 2; M <= 32; M *= 2)
            push("sppm", n + " MS=" + std::to_string(M), efficiency_row(Scheme::SPPM, N, 1, M, m, L_m));
    }
    for (int M = 2; M <= 32; M *= 2)
        push("fsk", "MF=" + std::to_string(M), fsk_efficiency(M, m));
    for (int M = 4; M <= 64; M *= 2)
        push("qam", "MQ=" + std::to_string(M), qam_efficiency(M, m));
    for (int M = 2; M <= 32; M *= 2)
        push("ossk", "MS=" + std::to_string(M), ossk_efficiency(M, L_m));
    return rows;
}

void write_plane(double m, double L_m, std::ostream& out)
{
    out << "scheme,params,rho,inv_eta_db\n";
    for (const auto& r : efficiency_plane(m, L_m))
        out << r.scheme << ',' << r.params << ',' << format_number(r.point.rho) << ','
            << format_number(r.point.inv_eta_db) << '\n';
}

bool write_waveform_report(const RunConfig& cfg, std::ostream& out)
{
    const auto& p = scheme_params(cfg);
    const double dbm = cfg.grid.points().front();
    const auto l = link_at(p, cfg.env, dbm, cfg.R_b);
    const auto rep = crosscheck(p, l, cfg.waveform, cfg.trials, cfg.seed);
    auto yes = [](bool b) { return b ? "pass" : "FAIL"; };
    out << "check,discrete,waveform,tolerance,result\n";
    out << "noiseless_max_rel_error,," << format_number(rep.noiseless_max_rel_error) << ",1e-08,"
        << yes(rep.noiseless_pass) << '\n';
    out << "noiseless_decisions,,," << (rep.noiseless_decisions_equal ? "equal" : "differ") << ','
        << yes(rep.noiseless_decisions_equal) << '\n';
    out << "ber," << format_number(rep.discrete.ber) << ',' << format_number(rep.waveform.ber) << ",ci95 overlap,"
        << yes(rep.ber_overlap) << '\n';
    out << "ser," << format_number(rep.discrete.ser) << ',' << format_number(rep.waveform.ser) << ",info,-\n";
    out << "noise_correlation,," << format_number(rep.noise_correlation) << ','
        << format_number(rep.correlation_limit) << ',' << yes(rep.correlation_pass) << '\n';
    for (const auto& s : rep.statistics) {
        out << "mean_" << s.name << ',' << format_number(s.mean_discrete) << ',' << format_number(s.mean_waveform)
            << ",ci95 overlap," << yes(s.pass) << '\n';
        out << "var_" << s.name << ',' << format_number(s.var_discrete) << ',' << format_number(s.var_waveform)
            << ",ci95 overlap," << yes(s.pass) << '\n';
    }
    out << "overall,,,," << yes(rep.pass) << '\n';
    return rep.pass;
}

void write_figure(const RunConfig& cfg, std::ostream& out, std::ostream& log)
{
    const auto& fig = find_figure(cfg.figure);
    if (fig.plane) {
        write_plane(fig.plane_m, fig.plane_L_m, out);
        return;
    }
    const auto grid = (cfg.grid_explicit ? cfg.grid : fig.grid).points();
    out << "figure,series,popt_dbm,snr,metric,value,ci95\n";
    for (std::size_t si = 0; si < fig.series.size(); ++si) {
        const auto& s = fig.series[si];
        const std::string metric(to_string(s.metric));
        if (s.kind == SeriesKind::Simulated) {
            if (!cfg.figure_simulation)
                continue;
            log << "simulating " << s.name << '\n';
            StoppingRule rule = cfg.rule;
            if (!cfg.max_symbols_explicit)
                rule.max_symbols = kFigureMaxSymbols;
            const bool ser = s.metric == Metric::Ser;
            const std::uint64_t series_seed = derive_seed(cfg.seed, si);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto l = link_at(s.params, cfg.env, grid[i], s.R_b);
                const auto st = run_point_at(s.params, l, rule, derive_seed(series_seed, i), run_options(cfg));
                out << fig.name << ',' << s.name << ',' << fmt_power(grid[i]) << ','
                    << format_number(l.omega() / l.sigma_sq()) << ',' << metric << ','
                    << format_number(ser ? st.ser : st.ber) << ',' << format_number(ser ? st.ci95_ser : st.ci95_ber)
                    << '\n';
                // Error rates only fall with power; the rest of the series would be empty too.
                if ((ser ? st.symbol_errors : st.bit_errors) == 0) {
                    log << "  no errors at " << fmt_power(grid[i]) << " dBm, series stops\n";
                    break;
                }
            }
            continue;
        }
        const MppmBackend backend = s.kind == SeriesKind::UnionBound ? MppmBackend::UnionBound
                                    : s.kind == SeriesKind::Exact    ? MppmBackend::Exact
                                                                     : MppmBackend::Bessel;
        for (double dbm : grid) {
            const auto l = link_at(s.params, cfg.env, dbm, s.R_b);
            const auto a = analytic_point(s.params, l, backend);
            const double v = s.metric == Metric::Ser ? a.pe : a.pb;
            out << fig.name << ',' << s.name << ',' << fmt_power(dbm) << ',' << format_number(l.omega() / l.sigma_sq())
                << ',' << metric << ',' << (a.below_floor ? "nan" : format_number(v)) << ",\n";
        }
    }
}

int run(const RunConfig& cfg, std::ostream& stdout_stream, std::ostream& log)
{
    std::ofstream file;
    std::ostream* out = &stdout_stream;
    if (cfg.output != "-") {
        file.open(cfg.output, std::ios::binary);
        if (!file)
            throw std::runtime_error("cannot open output file '" + cfg.output + "'");
        out = &file;
    }
    bool ok = true;
    switch (cfg.mode) {
    case Mode::Simulate: write_simulate(cfg, *out); break;
    case Mode::Analytic: write_analytic(cfg, *out, log); break;
    case Mode::Efficiency: write_efficiency(cfg, *out); break;
    case Mode::Plane: write_plane(cfg.params.m, cfg.params.L_m, *out); break;
    case Mode::ValidateWaveform: ok = write_waveform_report(cfg, *out); break;
    case Mode::Figure: write_figure(cfg, *out, log); break;
    }
    out->flush();
    if (!*out)
        throw std::runtime_error("write to output failed");
    if (!ok) {
        log << "waveform crosscheck failed\n";
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace itfh::cli
