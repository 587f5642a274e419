#include "itfh/modems.hpp"

#include "itfh/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace itfh {

Modem::Modem(const SchemeParams& p) : params_(p)
{
    validate(p);
    split_ = bits_per_symbol(p);
    if (p.scheme != Scheme::SPPM)
        codebook_.emplace(p.N, p.w);
    if (p.scheme == Scheme::QAM_MPPM)
        qam_ = build_qam_constellation(ilog2(p.M_Q));
    if (p.scheme == Scheme::SPPM)
        signature_ = sppm_signature(p.M_S, p.L_m);
}

TxSymbol Modem::modulate(std::uint64_t bits) const
{
    const int total = split_.total();
    if (total < 64 && (bits >> total) != 0)
        throw ConfigError("modulate: word has more than p1 + p2 bits");

    TxSymbol tx;
    tx.source_bits = bits;
    const std::uint64_t pattern_word = split_.p2 ? bits & ((std::uint64_t{1} << split_.p2) - 1) : 0;
    const std::uint64_t inner_word = split_.p2 < 64 ? bits >> split_.p2 : 0;

    if (params_.scheme == Scheme::SPPM) {
        tx.pattern = Pattern{1} << pattern_word;
        tx.inner_indices = {static_cast<int>(inner_word)};
        return tx;
    }

    tx.pattern = encode_pattern(pattern_word, *codebook_);
    const int nb = inner_bits(params_);
    if (nb > 0) {
        const std::uint64_t mask = (std::uint64_t{1} << nb) - 1;
        tx.inner_indices.resize(static_cast<std::size_t>(params_.w));
        for (int j = 0; j < params_.w; ++j)
            tx.inner_indices[static_cast<std::size_t>(j)] =
                static_cast<int>(inner_word >> (nb * (params_.w - 1 - j)) & mask);
    }
    return tx;
}

RxObservation Modem::observe(const TxSymbol& tx, const LinkState& link, Rng& rng) const
{
    if (params_.scheme != Scheme::ITFH)
        return observe(tx, link, {}, rng);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<double> phases(static_cast<std::size_t>(params_.w));
    for (auto& th : phases)
        th = uniform(rng);
    return observe(tx, link, phases, rng);
}

RxObservation Modem::observe(const TxSymbol& tx, const LinkState& link, std::span<const double> phases,
                             Rng& rng) const
{
    const int N = params_.N;
    // Unit normals scaled by sigma, so sigma = 0 gives the noiseless statistic.
    std::normal_distribution<double> unit;
    const double sigma = link.sigma;
    auto noise = [&](Rng& g) { return sigma * unit(g); };
    RxObservation obs;
    obs.slot_samples.resize(static_cast<std::size_t>(N));

    const double pulse = std::sqrt(link.T_s) * link.I_ph;
    const double amp = params_.scheme == Scheme::SPPM
                           ? signature_.amplitudes[static_cast<std::size_t>(tx.inner_indices.at(0))]
                           : 1.0;
    for (int k = 0; k < N; ++k) {
        const double mean = (tx.pattern >> k & 1u) ? pulse * amp : 0.0;
        obs.slot_samples[static_cast<std::size_t>(k)] = mean + noise(rng);
    }

    const double tone = std::sqrt(link.T_s / 2.0) * link.I_ph * params_.m;
    if (params_.scheme == Scheme::ITFH) {
        if (phases.size() != static_cast<std::size_t>(params_.w))
            throw ConfigError("observe: one phase per signal slot is required");
        const int M = params_.M_F;
        obs.fsk_metrics.resize(static_cast<std::size_t>(N * M));
        int j = 0;
        for (int k = 0; k < N; ++k) {
            const bool signal = tx.pattern >> k & 1u;
            const int sent = signal ? tx.inner_indices[static_cast<std::size_t>(j)] : -1;
            const double th = signal ? phases[static_cast<std::size_t>(j)] : 0.0;
            for (int i = 0; i < M; ++i) {
                double re = noise(rng);
                double im = noise(rng);
                if (i == sent) {
                    re += tone * std::cos(th);
                    im += tone * std::sin(th);
                }
                obs.fsk_metrics[static_cast<std::size_t>(k * M + i)] = re * re + im * im;
            }
            if (signal)
                ++j;
        }
    } else if (params_.scheme == Scheme::QAM_MPPM) {
        obs.iq_samples.resize(static_cast<std::size_t>(N));
        int j = 0;
        for (int k = 0; k < N; ++k) {
            std::complex<double> z{noise(rng), noise(rng)};
            if (tx.pattern >> k & 1u)
                z += tone * qam_.points[static_cast<std::size_t>(tx.inner_indices[static_cast<std::size_t>(j++)])];
            obs.iq_samples[static_cast<std::size_t>(k)] = z;
        }
    }
    return obs;
}

int Modem::decide_inner(const RxObservation& obs, int slot, const LinkState& link) const
{
    if (params_.scheme == Scheme::ITFH) {
        const int M = params_.M_F;
        int best = 0;
        double best_y = -1.0;
        for (int i = 0; i < M; ++i) {
            const double y = obs.fsk_metric(slot, i, M);
            if (y > best_y) {
                best_y = y;
                best = i;
            }
        }
        return best;
    }
    if (params_.scheme == Scheme::QAM_MPPM) {
        const double scale = std::sqrt(link.T_s / 2.0) * link.I_ph * params_.m;
        return static_cast<int>(qam_.nearest(obs.iq_samples[static_cast<std::size_t>(slot)] / scale));
    }
    return 0;
}

int Modem::decide_transmitter(double r, const LinkState& link) const
{
    const double pulse = std::sqrt(link.T_s) * link.I_ph;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < signature_.amplitudes.size(); ++j) {
        const double d = std::abs(r - pulse * signature_.amplitudes[j]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

std::uint64_t Modem::demodulate(const RxObservation& obs, const LinkState& link) const
{
    const int N = params_.N;
    if (obs.slot_samples.size() != static_cast<std::size_t>(N))
        throw ConfigError("demodulate: observation has the wrong slot count");

    if (params_.scheme == Scheme::SPPM) {
        // Slot by the raw maximum, not the square law.
        int k_star = 0;
        for (int k = 1; k < N; ++k)
            if (obs.slot_samples[static_cast<std::size_t>(k)] > obs.slot_samples[static_cast<std::size_t>(k_star)])
                k_star = k;
        const int j_star = decide_transmitter(obs.slot_samples[static_cast<std::size_t>(k_star)], link);
        return (static_cast<std::uint64_t>(j_star) << split_.p2) | static_cast<std::uint64_t>(k_star);
    }

    const Pattern detected = detect_pattern(obs.slot_samples, params_.w);
    const std::uint64_t pattern_word = decode_pattern(detected, *codebook_);
    const int nb = inner_bits(params_);
    if (nb == 0)
        return pattern_word;

    std::uint64_t inner_word = 0;
    for (int k = 0; k < N; ++k)
        if (detected >> k & 1u)
            inner_word = (inner_word << nb) | static_cast<std::uint64_t>(decide_inner(obs, k, link));
    return (inner_word << split_.p2) | pattern_word;
}

TxSymbol modulate(const Modem& modem, std::uint64_t bits)
{
    return modem.modulate(bits);
}

RxObservation observe(const Modem& modem, const TxSymbol& tx, const LinkState& link, Rng& rng)
{
    return modem.observe(tx, link, rng);
}

std::uint64_t demodulate(const Modem& modem, const RxObservation& obs, const LinkState& link)
{
    return modem.demodulate(obs, link);
}

} // namespace itfh
