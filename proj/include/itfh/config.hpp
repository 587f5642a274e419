// config.hpp - scheme parameters, link quantities, constellations, signatures

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace itfh {

enum class Scheme { ITFH, QAM_MPPM, SPPM, MPPM, PPM };

std::string_view to_string(Scheme s);
Scheme scheme_from_string(std::string_view name); // throws ConfigError

// Per-scheme configuration. Fields a scheme does not use are ignored.
//   N    slot count
//   w    signal slots (1 for SPPM and PPM)
//   M_F  FSK alphabet (I-TFH)
//   M_Q  QAM alphabet (QAM-MPPM)
//   M_S  transmitter count (SPPM)
//   m    modulation index (I-TFH, QAM-MPPM)
//   L_m  amplitude limiting factor (SPPM)
struct SchemeParams {
    Scheme scheme = Scheme::ITFH;
    int N = 8;
    int w = 4;
    int M_F = 16;
    int M_Q = 16;
    int M_S = 4;
    double m = 0.9;
    double L_m = 0.5;

    static SchemeParams itfh(int N, int w, int M_F, double m);
    static SchemeParams qam_mppm(int N, int w, int M_Q, double m);
    static SchemeParams sppm(int N, int M_S, double L_m);
    static SchemeParams mppm(int N, int w);
    static SchemeParams ppm(int N);
};

// Slot patterns are held as 64-bit masks, so N is capped here.
inline constexpr int kMaxSlots = 64;

// Throws ConfigError when an invariant is violated.
void validate(const SchemeParams& p);

struct BitSplit {
    int p1 = 0; // bits carried by the inner modulation / transmitter index
    int p2 = 0; // bits carried by the slot pattern
    int total() const { return p1 + p2; }
};

BitSplit bits_per_symbol(const SchemeParams& p);

// Bits per inner symbol (n_F, n_Q or log2 M_S); zero for MPPM/PPM.
int inner_bits(const SchemeParams& p);
// Inner alphabet size (M_F, M_Q or M_S); one for MPPM/PPM.
int inner_alphabet(const SchemeParams& p);

// Physical link quantities at the receiver. sigma^2 = N0/2.
struct LinkState {
    double I_ph = 0.0; // A
    double T_s = 0.0;  // s
    double N0 = 0.0;   // A^2/Hz
    double sigma = 0.0;

    static LinkState make(double I_ph, double T_s, double N0);
    // N0 = 0; only meaningful for the sampling engines.
    static LinkState noiseless(double I_ph, double T_s);
    double sigma_sq() const { return 0.5 * N0; }
    // T_s I_ph^2, the signal-slot noncentrality of the square-law statistic
    double omega() const { return T_s * I_ph * I_ph; }
};

struct LinkQuantities {
    double E_s = 0.0;
    double d_min_sq = 0.0;
    double es_over_n0_total = 0.0;
    double es_over_n0_inner = 0.0; // FSK/QAM/OSSK part; 0 for MPPM/PPM
};

LinkQuantities link_quantities(const SchemeParams& p, const LinkState& l);

// Unit average energy QAM constellation. points[label] is the point whose
// n_Q-bit label is `label`: Gray for square QAM and the 2x4 rectangle,
// quasi-Gray for cross QAM.
struct QamConstellation {
    int bits = 0;
    std::vector<std::complex<double>> points;

    std::size_t size() const { return points.size(); }
    double average_energy() const;
    double min_distance_sq() const;
    std::size_t nearest(std::complex<double> z) const;
};

QamConstellation build_qam_constellation(int n_Q);

// The closed-form minimum squared distance used by the link and efficiency
// formulas, as tabulated for unit-energy constellations:
//   3/(2(M-1)) for even n_Q, 2/3 for n_Q = 3, 3/(2(31M/32 - 1)) otherwise.
// For square and cross QAM this is one quarter of the true geometric
// distance (the quantity that appears inside the erfc of the SER formula);
// for n_Q = 3 it is the true distance.
double qam_min_distance_sq_formula(int n_Q);

struct SppmSignature {
    std::vector<double> amplitudes; // C_0 = 1 ... C_{M_S-1} = 1 - L_m

    double sum() const;
    double sum_sq() const;
};

SppmSignature sppm_signature(int M_S, double L_m);

// Exact binomial coefficient; throws NumericalError on 128-bit overflow.
unsigned __int128 binomial(int n, int k);
double binomial_d(int n, int k);
// floor(log2 C(n, k)) for any n, by exact multiprecision arithmetic.
int floor_log2_binomial(int n, int k);
bool is_pow2(long long v);
int ilog2(long long v); // exact log2 of a power of two

} // namespace itfh
