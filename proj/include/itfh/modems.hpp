// modems.hpp - sufficient-statistic transmitter, channel and receiver
//
// Symbols are simulated at the level of the matched-filter and correlator
// outputs rather than waveforms: per slot one real sample r_k, plus M_F
// noncoherent FSK energies (I-TFH) or one coherent I/Q pair (QAM-MPPM).
// The waveform module checks this reduction against an oversampled receiver.
//
// Bit layout of a (p1 + p2)-bit word: the high p1 bits are the inner
// symbols (first signal slot most significant, n_F or n_Q bits each, or the
// SPPM transmitter index), the low p2 bits select the slot pattern.

#pragma once

#include "itfh/config.hpp"
#include "itfh/mppm.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace itfh {

using Rng = std::mt19937_64;

struct TxSymbol {
    Pattern pattern = 0;
    std::vector<int> inner_indices; // per signal slot (ascending slot order); one entry for SPPM
    std::uint64_t source_bits = 0;
};

struct RxObservation {
    std::vector<double> slot_samples;             // r_k, N entries
    std::vector<double> fsk_metrics;              // Y_ik at [k * M_F + i], I-TFH only
    std::vector<std::complex<double>> iq_samples; // (r_k^I, r_k^Q), QAM-MPPM only

    double fsk_metric(int slot, int freq, int M_F) const
    {
        return fsk_metrics[static_cast<std::size_t>(slot * M_F + freq)];
    }
};

class Modem {
public:
    explicit Modem(const SchemeParams& p);

    const SchemeParams& params() const { return params_; }
    const BitSplit& split() const { return split_; }
    // Present for every scheme except SPPM.
    const MppmCodebook* codebook() const { return codebook_ ? &*codebook_ : nullptr; }
    const QamConstellation& constellation() const { return qam_; }
    const SppmSignature& signature() const { return signature_; }

    TxSymbol modulate(std::uint64_t bits) const;

    // One received symbol. I-TFH draws a uniform phase per signal slot first.
    RxObservation observe(const TxSymbol& tx, const LinkState& link, Rng& rng) const;
    // Same, with the I-TFH carrier phases supplied (one per signal slot).
    RxObservation observe(const TxSymbol& tx, const LinkState& link, std::span<const double> phases,
                          Rng& rng) const;

    std::uint64_t demodulate(const RxObservation& obs, const LinkState& link) const;

    // Inner decision for one slot: FSK argmax or nearest QAM point.
    int decide_inner(const RxObservation& obs, int slot, const LinkState& link) const;
    // SPPM transmitter decision from the selected slot's sample.
    int decide_transmitter(double r, const LinkState& link) const;

private:
    SchemeParams params_;
    BitSplit split_;
    std::optional<MppmCodebook> codebook_;
    QamConstellation qam_;
    SppmSignature signature_;
};

// Convenience wrappers mirroring the free-function view of the modem.
TxSymbol modulate(const Modem& modem, std::uint64_t bits);
RxObservation observe(const Modem& modem, const TxSymbol& tx, const LinkState& link, Rng& rng);
std::uint64_t demodulate(const Modem& modem, const RxObservation& obs, const LinkState& link);

} // namespace itfh
