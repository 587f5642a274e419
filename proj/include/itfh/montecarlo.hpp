// montecarlo.hpp - seeded error-rate campaigns
//
// Symbols are simulated in fixed-size batches. Batch b of a point draws from
// its own generator seeded by mixing (point seed, b), and batches are merged
// and checked against the stopping rule strictly in batch order, so the
// result is the same for any worker count.

#pragma once

#include "itfh/channel.hpp"
#include "itfh/config.hpp"
#include "itfh/modems.hpp"

#include <cstdint>
#include <vector>

namespace itfh {

struct StoppingRule {
    std::uint64_t min_bit_errors = 100;
    std::uint64_t min_symbol_errors = 100;
    std::uint64_t max_symbols = 100'000'000;
};

void validate(const StoppingRule& rule);

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
    double half_width() const { return 0.5 * (hi - lo); }
    bool contains(double v) const { return v >= lo && v <= hi; }
    bool overlaps(const WilsonInterval& o) const { return lo <= o.hi && o.lo <= hi; }
};

// 95% Wilson score interval for k successes out of n.
WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054);

struct ErrorStats {
    std::uint64_t symbols = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t bits = 0;
    std::uint64_t bit_errors = 0;
    double ser = 0.0;
    double ber = 0.0;
    double ci95_ser = 0.0; // Wilson half-widths
    double ci95_ber = 0.0;
    WilsonInterval ser_interval;
    WilsonInterval ber_interval;
    std::uint64_t seed = 0;

    void merge(const ErrorStats& other);
    // Recomputes rates and intervals from the counts.
    void finalize();
};

struct RunOptions {
    int workers = 0;                   // 0: default_worker_count()
    std::uint64_t batch_symbols = 2048;
};

// ITFH_WORKERS if set, else the hardware concurrency.
int default_worker_count();

// splitmix64 finalizer, used for all seed derivation.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

ErrorStats run_point(const SchemeParams& p, const NoiseEnvironment& env, double P_opt, double R_b,
                     const StoppingRule& rule, std::uint64_t seed, const RunOptions& opts = {});

// Same campaign at a given link state.
ErrorStats run_point_at(const SchemeParams& p, const LinkState& link, const StoppingRule& rule,
                        std::uint64_t seed, const RunOptions& opts = {});

// One point per grid entry (dBm), seeds derived from (seed, index).
std::vector<ErrorStats> run_sweep(const SchemeParams& p, const NoiseEnvironment& env,
                                  const std::vector<double>& power_grid_dbm, double R_b, const StoppingRule& rule,
                                  std::uint64_t seed, const RunOptions& opts = {});

} // namespace itfh
