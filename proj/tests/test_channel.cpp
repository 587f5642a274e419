#include "itfh/channel.hpp"
#include "itfh/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace itfh;

TEST_CASE("noise PSD terms")
{
    const NoiseEnvironment env;
    // Thermal term at 290 K, 50 ohm, NF 10 dB.
    const double thermal = 4.0 * 1.380649e-23 * 290.0 * 10.0 / 50.0;
    CHECK(noise_psd(0.0, env) == doctest::Approx(thermal).epsilon(1e-14));
    CHECK(noise_psd(0.0, env) == doctest::Approx(3.2031e-21).epsilon(1e-4));

    // 1 mA: thermal + shot + RIN, each written out.
    const double I = 1e-3;
    const double shot = 2.0 * 1.602176634e-19 * I;
    const double rin = std::pow(10.0, -15.5) * I * I;
    CHECK(noise_psd(I, env) == doctest::Approx(thermal + shot + rin).epsilon(1e-14));
    CHECK(noise_psd(I, env) == doctest::Approx(3.2031013e-21 + 3.204353268e-22 + 3.16227766e-22).epsilon(1e-8));

    NoiseEnvironment shot_only = env;
    shot_only.temperature = 1e-300;
    shot_only.rin_db_hz = -3000.0;
    for (double i : {1e-6, 1e-4, 1e-2})
        CHECK(noise_psd(i, shot_only) == doctest::Approx(2.0 * 1.602176634e-19 * i).epsilon(1e-12));

    CHECK_THROWS_AS(noise_psd(-1e-9, env), DomainError);
}

TEST_CASE("dc current inverts the noise model")
{
    const NoiseEnvironment env;
    CHECK(dc_current_for_noise(env.thermal_psd(), env) == 0.0);
    CHECK_THROWS_AS(dc_current_for_noise(0.5 * env.thermal_psd(), env), DomainError);

    double worst = 0.0;
    for (double i = 1e-9; i < 1.0; i *= 1.7) {
        const double n0 = noise_psd(i, env);
        worst = std::max(worst, std::abs(noise_psd(dc_current_for_noise(n0, env), env) - n0) / n0);
        CHECK(dc_current_for_noise(n0, env) == doctest::Approx(i).epsilon(1e-9));
    }
    CHECK(worst < 1e-12);

    NoiseEnvironment no_rin = env;
    no_rin.rin_db_hz = -INFINITY;
    const double n0 = env.thermal_psd() + 1e-22;
    CHECK(dc_current_for_noise(n0, no_rin) == doctest::Approx(1e-22 / (2.0 * 1.602176634e-19)).epsilon(1e-12));
}

TEST_CASE("noise PSD is strictly increasing")
{
    const NoiseEnvironment env;
    double prev = noise_psd(0.0, env);
    for (double i = 1e-12; i < 10.0; i *= 3.0) {
        const double v = noise_psd(i, env);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("optical power to link state")
{
    const NoiseEnvironment env;
    const auto p = SchemeParams::itfh(8, 4, 16, 0.9);
    const double T_s = 1e-7;
    const auto a = link_state_from_optical_power(1e-6, p, env, T_s);
    const auto b = link_state_from_optical_power(2e-6, p, env, T_s);
    CHECK(a.I_ph == doctest::Approx(0.5e-6 * 8 / 4));
    CHECK(b.I_ph == doctest::Approx(2.0 * a.I_ph).epsilon(1e-15));
    CHECK(a.N0 == doctest::Approx(noise_psd(0.5e-6, env)));
    CHECK(a.sigma * a.sigma == doctest::Approx(a.N0 / 2).epsilon(1e-14));

    const auto s = SchemeParams::sppm(8, 2, 0.7);
    const auto ls = link_state_from_optical_power(1e-6, s, env, T_s);
    CHECK(ls.I_ph == doctest::Approx(0.5e-6 * 8 * 2 / 1.3));

    CHECK_THROWS_AS(link_state_from_optical_power(0.0, p, env, T_s), DomainError);
}

TEST_CASE("unit conversions and slot duration")
{
    CHECK(dbm_to_watts(0.0) == doctest::Approx(1e-3));
    CHECK(dbm_to_watts(-30.0) == doctest::Approx(1e-6));
    CHECK(watts_to_dbm(dbm_to_watts(-37.25)) == doctest::Approx(-37.25));
    CHECK(slot_duration_for_rate(SchemeParams::itfh(8, 4, 16, 0.9), 27.5e6) == doctest::Approx(1e-7));
    CHECK(slot_duration_for_rate(SchemeParams::sppm(8, 4, 0.5), 27.5e6) == doctest::Approx(5.0 / (27.5e6 * 8)));
    CHECK_THROWS_AS(slot_duration_for_rate(SchemeParams::mppm(8, 4), 0.0), ConfigError);
}

TEST_CASE("environment validation")
{
    NoiseEnvironment env;
    CHECK_NOTHROW(validate(env));
    env.load_resistance = 0.0;
    CHECK_THROWS_AS(validate(env), ConfigError);
}
