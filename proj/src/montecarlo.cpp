#include "itfh/montecarlo.hpp"

#include "itfh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <string>
#include <thread>

namespace itfh {

void validate(const StoppingRule& rule)
{
    if (rule.min_bit_errors == 0 || rule.min_symbol_errors == 0 || rule.max_symbols == 0)
        throw ConfigError("stopping rule thresholds must be positive");
}

WilsonInterval wilson_interval(std::uint64_t k, std::uint64_t n, double z)
{
    if (n == 0)
        return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void ErrorStats::merge(const ErrorStats& other)
{
    symbols += other.symbols;
    symbol_errors += other.symbol_errors;
    bits += other.bits;
    bit_errors += other.bit_errors;
}

void ErrorStats::finalize()
{
    ser = symbols ? static_cast<double>(symbol_errors) / static_cast<double>(symbols) : 0.0;
    ber = bits ? static_cast<double>(bit_errors) / static_cast<double>(bits) : 0.0;
    ser_interval = wilson_interval(symbol_errors, symbols);
    ber_interval = wilson_interval(bit_errors, bits);
    ci95_ser = ser_interval.half_width();
    ci95_ber = ber_interval.half_width();
}

int default_worker_count()
{
    if (const char* env = std::getenv("ITFH_WORKERS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 1024)
            throw ConfigError("ITFH_WORKERS must be an integer in [1, 1024]");
        return static_cast<int>(v);
    }
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index)
{
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ull));
}

namespace {

ErrorStats run_batch(const Modem& modem, const LinkState& link, std::uint64_t count, std::uint64_t seed)
{
    Rng rng(seed);
    const int total_bits = modem.split().total();
    const std::uint64_t mask = total_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << total_bits) - 1;
    ErrorStats s;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::uint64_t bits = rng() & mask;
        const auto tx = modem.modulate(bits);
        const auto obs = modem.observe(tx, link, rng);
        const std::uint64_t got = modem.demodulate(obs, link);
        const int wrong = std::popcount(got ^ bits);
        s.symbol_errors += wrong != 0;
        s.bit_errors += static_cast<std::uint64_t>(wrong);
    }
    s.symbols = count;
    s.bits = count * static_cast<std::uint64_t>(total_bits);
    return s;
}

bool rule_met(const ErrorStats& s, const StoppingRule& rule)
{
    return (s.symbol_errors >= rule.min_symbol_errors && s.bit_errors >= rule.min_bit_errors) ||
           s.symbols >= rule.max_symbols;
}

} // namespace

ErrorStats run_point_at(const SchemeParams& p, const LinkState& link, const StoppingRule& rule,
                        std::uint64_t seed, const RunOptions& opts)
{
    validate(rule);
    if (opts.batch_symbols == 0)
        throw ConfigError("batch size must be positive");
    const Modem modem(p);
    const int workers = opts.workers > 0 ? opts.workers : default_worker_count();
    const std::uint64_t batch = opts.batch_symbols;
    const std::uint64_t n_batches = (rule.max_symbols + batch - 1) / batch;

    std::mutex mu;
    std::uint64_t next_batch = 0;
    std::uint64_t next_merge = 0;
    bool done = false;
    std::map<std::uint64_t, ErrorStats> pending;
    ErrorStats merged;
    std::exception_ptr failure;

    auto worker = [&] {
        try {
            for (;;) {
                std::uint64_t idx;
                {
                    std::lock_guard lock(mu);
                    if (done || next_batch >= n_batches)
                        return;
                    idx = next_batch++;
                }
                const std::uint64_t count = std::min(batch, rule.max_symbols - idx * batch);
                ErrorStats s = run_batch(modem, link, count, derive_seed(seed, idx));

                std::lock_guard lock(mu);
                if (done)
                    return;
                pending.emplace(idx, s);
                for (auto it = pending.find(next_merge); it != pending.end(); it = pending.find(next_merge)) {
                    merged.merge(it->second);
                    pending.erase(it);
                    ++next_merge;
                    if (rule_met(merged, rule)) {
                        done = true;
                        break;
                    }
                }
            }
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure)
                failure = std::current_exception();
            done = true;
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);
    merged.seed = seed;
    merged.finalize();
    return merged;
}

ErrorStats run_point(const SchemeParams& p, const NoiseEnvironment& env, double P_opt, double R_b,
                     const StoppingRule& rule, std::uint64_t seed, const RunOptions& opts)
{
    validate(p);
    validate(env);
    validate(rule);
    const double T_s = slot_duration_for_rate(p, R_b);
    return run_point_at(p, link_state_from_optical_power(P_opt, p, env, T_s), rule, seed, opts);
}

std::vector<ErrorStats> run_sweep(const SchemeParams& p, const NoiseEnvironment& env,
                                  const std::vector<double>& power_grid_dbm, double R_b, const StoppingRule& rule,
                                  std::uint64_t seed, const RunOptions& opts)
{
    if (power_grid_dbm.empty())
        throw ConfigError("power grid is empty");
    std::vector<ErrorStats> out;
    out.reserve(power_grid_dbm.size());
    for (std::size_t i = 0; i < power_grid_dbm.size(); ++i)
        out.push_back(run_point(p, env, dbm_to_watts(power_grid_dbm[i]), R_b, rule, derive_seed(seed, i), opts));
    return out;
}

} // namespace itfh
