#include "itfh/channel.hpp"

#include "itfh/errors.hpp"

#include <cmath>

namespace itfh {

double NoiseEnvironment::thermal_psd() const
{
    const double F = std::pow(10.0, noise_figure_db / 10.0);
    return 4.0 * boltzmann * temperature * F / load_resistance;
}

double NoiseEnvironment::rin_linear() const
{
    return std::pow(10.0, rin_db_hz / 10.0);
}

void validate(const NoiseEnvironment& env)
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ConfigError(std::string(name) + " must be positive");
    };
    positive(env.temperature, "temperature");
    positive(env.load_resistance, "load_resistance");
    positive(env.responsivity, "responsivity");
    positive(env.electron_charge, "electron_charge");
    positive(env.boltzmann, "boltzmann");
    positive(env.channel_gain, "channel_gain");
    if (!std::isfinite(env.noise_figure_db))
        throw ConfigError("noise_figure_db must be finite");
    if (!std::isfinite(env.rin_db_hz) && env.rin_db_hz != -INFINITY)
        throw ConfigError("rin_db_hz must be finite");
}

double noise_psd(double I_DC, const NoiseEnvironment& env)
{
    if (!(I_DC >= 0.0))
        throw DomainError("noise_psd: I_DC must be nonnegative");
    const double rin = env.rin_linear();
    return env.thermal_psd() + 2.0 * std::abs(env.electron_charge) * I_DC + rin * I_DC * I_DC;
}

double dc_current_for_noise(double N0, const NoiseEnvironment& env)
{
    const double thermal = env.thermal_psd();
    const double excess = N0 - thermal;
    if (!(excess >= 0.0))
        throw DomainError("dc_current_for_noise: N0 is below the thermal floor");
    const double b = 2.0 * std::abs(env.electron_charge);
    const double a = env.rin_linear();
    if (a == 0.0)
        return excess / b;
    // Cancellation-free form of (-b + sqrt(b^2 + 4 a excess)) / (2a).
    return 2.0 * excess / (b + std::sqrt(b * b + 4.0 * a * excess));
}

double peak_photocurrent(double I_DC, const SchemeParams& p)
{
    if (p.scheme == Scheme::SPPM)
        return I_DC * p.N * p.M_S / sppm_signature(p.M_S, p.L_m).sum();
    return I_DC * p.N / p.w;
}

LinkState link_state_from_optical_power(double P_opt, const SchemeParams& p, const NoiseEnvironment& env,
                                        double T_s)
{
    if (!(P_opt > 0.0))
        throw DomainError("link_state_from_optical_power: P_opt must be positive");
    const double I_DC = env.responsivity * P_opt;
    const double I_ph = env.channel_gain * peak_photocurrent(I_DC, p);
    return LinkState::make(I_ph, T_s, noise_psd(I_DC, env));
}

double dbm_to_watts(double dbm)
{
    return 1e-3 * std::pow(10.0, dbm / 10.0);
}

double watts_to_dbm(double watts)
{
    if (!(watts > 0.0))
        throw DomainError("watts_to_dbm: power must be positive");
    return 10.0 * std::log10(watts / 1e-3);
}

double slot_duration_for_rate(const SchemeParams& p, double R_b)
{
    if (!(R_b > 0.0))
        throw ConfigError("bit rate must be positive");
    return static_cast<double>(bits_per_symbol(p).total()) / (R_b * p.N);
}

} // namespace itfh
