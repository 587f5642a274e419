// waveform.hpp - oversampled receiver used to validate the discrete model
//
// A symbol is rendered as N slots of samples_per_slot midpoint samples of the
// received photocurrent. White noise of two-sided PSD N0/2 becomes i.i.d.
// samples of variance (N0/2) f_s, and the receiver filters are Riemann sums.
// All tones complete an integer number of cycles per slot.

#pragma once

#include "itfh/config.hpp"
#include "itfh/modems.hpp"
#include "itfh/montecarlo.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace itfh {

struct WaveformConfig {
    int samples_per_slot = 0; // 0: 16 (n0 + M_F)
    int n0 = 32;              // cycles per slot of the lowest tone (or the QAM carrier)
};

struct Waveform {
    int N = 0;
    int samples_per_slot = 0;
    double dt = 0.0;
    std::vector<double> samples; // N * samples_per_slot
    std::vector<double> phases;  // I-TFH carrier phase per signal slot
};

// Raw correlator outputs before the square law.
struct CorrelatorOutputs {
    RxObservation obs;
    std::vector<std::complex<double>> fsk_iq; // (r^I, r^Q) at [k * M_F + i], I-TFH only
};

class WaveformEngine {
public:
    WaveformEngine(const SchemeParams& p, const WaveformConfig& wc = {});

    const Modem& modem() const { return modem_; }
    int samples_per_slot() const { return S_; }
    int n0() const { return n0_; }
    // Highest tone index in cycles per slot.
    int top_tone() const;

    Waveform synthesize(const TxSymbol& tx, const LinkState& l, Rng& rng) const;
    Waveform synthesize(const TxSymbol& tx, const LinkState& l, const std::vector<double>& phases) const;

    // i.i.d. samples of variance (N0/2) f_s.
    std::vector<double> draw_noise(const LinkState& l, Rng& rng) const;
    void add_noise(Waveform& wf, const LinkState& l, Rng& rng) const;

    CorrelatorOutputs correlate(const Waveform& wf, const LinkState& l) const;
    RxObservation correlate_receive(const Waveform& wf, const LinkState& l) const;

    // Projections of slot k of a sample vector on the slot filter and on the
    // in-phase correlator of tone (or carrier) 0.
    std::pair<double, double> project_slot(const std::vector<double>& samples, int k, double T_s) const;

private:
    Modem modem_;
    int S_ = 0;
    int n0_ = 0;
    int tones_ = 0;
    std::vector<double> cos_; // [tone * S + j], unit amplitude
    std::vector<double> sin_;
};

struct StatisticDelta {
    std::string name;
    std::uint64_t count = 0;
    double mean_discrete = 0.0;
    double mean_waveform = 0.0;
    double var_discrete = 0.0;
    double var_waveform = 0.0;
    bool pass = false;
};

struct CrosscheckReport {
    ErrorStats discrete;
    ErrorStats waveform;
    bool ber_overlap = false;
    std::vector<StatisticDelta> statistics;
    double noise_correlation = 0.0; // slot-filter noise vs correlator noise, same slot
    double correlation_limit = 0.0; // 3 / sqrt(trials)
    bool correlation_pass = false;
    double noiseless_max_rel_error = 0.0;
    bool noiseless_decisions_equal = false;
    bool noiseless_pass = false;
    bool pass = false;
};

CrosscheckReport crosscheck(const SchemeParams& p, const LinkState& l, const WaveformConfig& wc,
                            std::uint64_t trials, std::uint64_t seed);

} // namespace itfh
