// channel.hpp - photodetector noise model and optical power to link state

#pragma once

#include "itfh/config.hpp"

namespace itfh {

struct NoiseEnvironment {
    double temperature = 290.0;     // K
    double load_resistance = 50.0;  // ohm
    double noise_figure_db = 10.0;  // dB
    double rin_db_hz = -155.0;      // dB/Hz
    double responsivity = 0.5;      // A/W
    double electron_charge = 1.602176634e-19;
    double boltzmann = 1.380649e-23;
    double channel_gain = 1.0;      // absorbed into I_ph, kept constant

    double thermal_psd() const;
    double rin_linear() const;
};

void validate(const NoiseEnvironment& env);

// N0 = thermal + shot + RIN, in A^2/Hz.
double noise_psd(double I_DC, const NoiseEnvironment& env = {});
// Nonnegative I_DC with noise_psd(I_DC) == N0.
double dc_current_for_noise(double N0, const NoiseEnvironment& env = {});

// Peak photocurrent in a signal slot for an average detector current.
double peak_photocurrent(double I_DC, const SchemeParams& p);

LinkState link_state_from_optical_power(double P_opt, const SchemeParams& p, const NoiseEnvironment& env,
                                        double T_s);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Slot duration giving bit rate R_b: T_s = (p1 + p2) / (R_b * N).
double slot_duration_for_rate(const SchemeParams& p, double R_b);

} // namespace itfh
