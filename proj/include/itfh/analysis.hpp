// analysis.hpp - efficiencies and analytic error-rate predictions

#pragma once

#include "itfh/config.hpp"
#include "itfh/mppm.hpp"

#include <memory>
#include <string>
#include <vector>

namespace itfh {

// ---- spectral and asymptotic power efficiency ----

struct EfficiencyPoint {
    std::string label; // scheme tag, or "fsk" / "qam" / "ossk" for the pure rows
    double rho = 0.0;  // bit/s/Hz
    double eta = 0.0;
    double inv_eta_db = 0.0; // -10 log10(eta)
};

EfficiencyPoint efficiency(const SchemeParams& p);
// The same row without the 64-slot representation limit, for plane sweeps.
// M is M_F, M_Q or M_S as the scheme requires.
EfficiencyPoint efficiency_row(Scheme s, int N, int w, int M, double m, double L_m);
EfficiencyPoint fsk_efficiency(int M_F, double m);
EfficiencyPoint qam_efficiency(int M_Q, double m);
EfficiencyPoint ossk_efficiency(int M_S, double L_m);

// Occupied bandwidth in units of 1/T_s: M_F + 1 for I-TFH, 2 otherwise.
double bandwidth_slots(const SchemeParams& p);
double occupied_bandwidth(const SchemeParams& p, double T_s);

// ---- MPPM symbol error ----

struct ProbabilityEstimate {
    double value = 0.0;
    double abs_error = 0.0;
    bool below_floor = false; // value is dominated by numerical error
    bool exceeds_one = false; // union bound past its useful range
};

// Reporting floor for analytic probabilities.
inline constexpr double kReportingFloor = 1e-12;

// Exact square-law detection error by quadrature. snr = Omega / sigma^2.
ProbabilityEstimate mppm_ser_exact(int N, int w, double snr);

// Approximation built on the large-argument Bessel asymptote of the
// signal-slot density; a double binomial sum of one-dimensional integrals.
ProbabilityEstimate mppm_ser_bessel(int N, int w, double snr);

// Ordered-pair Hamming distance counts of a codebook: pair_counts[l] is the
// number of ordered pairs (B, B') with |B - B'|^2 = 2l.
struct DistanceSpectrum {
    int p2 = 0;
    std::vector<double> pair_counts;
};

DistanceSpectrum distance_spectrum(const MppmCodebook& cb);
// Cached per (N, w); safe to call concurrently.
std::shared_ptr<const DistanceSpectrum> cached_distance_spectrum(int N, int w);

// Union bound on the ML pattern error. snr = T_s I_ph^2 / sigma^2.
ProbabilityEstimate mppm_ser_ub(const DistanceSpectrum& spectrum, double snr);
ProbabilityEstimate mppm_ser_ub(const MppmCodebook& cb, double snr);

enum class MppmBackend { Bessel, UnionBound, Exact };
std::string_view to_string(MppmBackend b);
MppmBackend backend_from_string(std::string_view name); // throws ConfigError

ProbabilityEstimate mppm_ser(int N, int w, double snr, MppmBackend backend);

// ---- inner modulations ----

double fsk_ser(int M_F, double es_over_n0);
double qam_ser(int M_Q, double es_over_n0);

// ---- compound schemes (I-TFH, QAM-MPPM) ----

double compound_ser(const SchemeParams& p, const LinkState& l, MppmBackend backend = MppmBackend::Bessel);
double compound_ber(const SchemeParams& p, const LinkState& l, MppmBackend backend = MppmBackend::Bessel);

// Pure combination rules, given the constituent symbol error probabilities.
double compound_ser_from(int w, double pe_mppm, double pe_mod);
double compound_ber_from(const SchemeParams& p, double pe_mppm, double pe_mod);

// Exact ratio sum_l C(w,l) C(N-w,l) f(l) / (C(N,w) - 1) for the two
// weightings f(l) = w - l and f(l) = l / 2.
double pattern_overlap_ratio(int N, int w);
double pattern_swap_ratio(int N, int w);

// Inner symbol error and bit error given the inner symbol error.
double inner_ser(const SchemeParams& p, const LinkState& l);
double inner_ber_from_ser(const SchemeParams& p, double pe_mod);

// ---- SPPM ----

struct SppmError {
    double P_e_sppm = 0.0;
    double P_b_sppm = 0.0;
    std::vector<double> P_e_ppm;  // per transmitter
    std::vector<double> P_e_ossk; // per transmitter
};

SppmError sppm_error(const SchemeParams& p, const LinkState& l);

// ---- plain MPPM / PPM ----

// Symbol and bit error for MPPM/PPM alone (bit error via the 2^(p2-1)
// / (2^p2 - 1) rule).
ProbabilityEstimate mppm_scheme_ser(const SchemeParams& p, const LinkState& l, MppmBackend backend);
double mppm_bit_from_symbol(int p2, double pe);

} // namespace itfh
