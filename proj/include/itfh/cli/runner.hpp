// runner.hpp - executes a RunConfig and writes CSV

#pragma once

#include "itfh/cli/figures.hpp"
#include "itfh/cli/run_config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace itfh::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

// Symbol budget per simulated figure point unless max_symbols is given.
inline constexpr std::uint64_t kFigureMaxSymbols = 1'000'000;

struct AnalyticPoint {
    double pe = 0.0;
    double pb = 0.0;
    bool below_floor = false;
    bool exceeds_one = false;
    std::string backend;
};

AnalyticPoint analytic_point(const SchemeParams& p, const LinkState& l, MppmBackend backend);

// Link state at an optical power (dBm) for a bit rate.
LinkState link_at(const SchemeParams& p, const NoiseEnvironment& env, double popt_dbm, double R_b);

struct PlaneRow {
    std::string scheme;
    std::string params;
    EfficiencyPoint point;
};

// The efficiency plane: MPPM/I-TFH/QAM-MPPM over N = 2..512 (powers of two)
// and w = 1..N-1, PPM and SPPM over the same N, plus the pure FSK, QAM and
// OSSK markers.
std::vector<PlaneRow> efficiency_plane(double m, double L_m);

void write_simulate(const RunConfig& cfg, std::ostream& out);
void write_analytic(const RunConfig& cfg, std::ostream& out, std::ostream& log);
void write_efficiency(const RunConfig& cfg, std::ostream& out);
void write_plane(double m, double L_m, std::ostream& out);
// Returns true when every check passed.
bool write_waveform_report(const RunConfig& cfg, std::ostream& out);
void write_figure(const RunConfig& cfg, std::ostream& out, std::ostream& log);

// Writes to cfg.output (or `stdout_stream` for "-"); returns an exit code.
int run(const RunConfig& cfg, std::ostream& stdout_stream, std::ostream& log);

// Fixed, locale-independent number formatting used in all CSV output.
std::string format_number(double v);

} // namespace itfh::cli
