#include "itfh/analysis.hpp"
#include "itfh/errors.hpp"
#include "itfh/modems.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace itfh;

namespace {

std::vector<SchemeParams> small_schemes()
{
    return {SchemeParams::itfh(4, 2, 4, 0.9), SchemeParams::itfh(2, 1, 2, 0.5), SchemeParams::qam_mppm(4, 2, 4, 0.9),
            SchemeParams::qam_mppm(4, 1, 8, 0.7), SchemeParams::sppm(4, 4, 0.5), SchemeParams::sppm(4, 2, 0.7),
            SchemeParams::mppm(4, 2), SchemeParams::ppm(4)};
}

double ks_exponential(std::vector<double> xs, double mean)
{
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = -std::expm1(-xs[i] / mean);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return d;
}

} // namespace

TEST_CASE("modulate layout")
{
    const Modem itfh(SchemeParams::itfh(2, 1, 2, 0.9));
    auto tx = itfh.modulate(0b00);
    CHECK(tx.pattern == itfh.codebook()->patterns()[0]);
    CHECK(tx.inner_indices == std::vector<int>{0});

    const Modem sppm(SchemeParams::sppm(4, 4, 0.5));
    tx = sppm.modulate(0b1011);
    CHECK(tx.inner_indices == std::vector<int>{2});
    CHECK(tx.pattern == Pattern{1} << 3);

    const Modem i4(SchemeParams::itfh(4, 2, 4, 0.9));
    // Word = [inner slot a: 2 bits][inner slot b: 2 bits][pattern: 2 bits].
    tx = i4.modulate(0b01'11'10);
    CHECK(tx.inner_indices == std::vector<int>{1, 3});
    CHECK(tx.pattern == i4.codebook()->patterns()[2]);
    CHECK_THROWS(i4.modulate(std::uint64_t{1} << 6));
}

TEST_CASE("noiseless round trip over every word")
{
    for (const auto& p : small_schemes()) {
        CAPTURE(std::string(to_string(p.scheme)));
        const Modem modem(p);
        const auto clean = LinkState::noiseless(1e-6, 1e-7);
        Rng rng(1);
        const int total = modem.split().total();
        for (std::uint64_t w = 0; w < (std::uint64_t{1} << total); ++w) {
            const auto tx = modem.modulate(w);
            const auto obs = modem.observe(tx, clean, rng);
            CHECK(modem.demodulate(obs, clean) == w);
        }
    }
}

TEST_CASE("noiseless observation values")
{
    const auto clean = LinkState::noiseless(2e-6, 1e-7);
    Rng rng(3);
    SUBCASE("itfh")
    {
        const Modem m(SchemeParams::itfh(4, 2, 4, 0.8));
        const auto tx = m.modulate(0b10'01'00);
        const auto obs = m.observe(tx, clean, rng);
        const double e = clean.T_s * clean.I_ph * clean.I_ph * 0.64 / 2;
        int j = 0;
        for (int k = 0; k < 4; ++k) {
            const bool sig = tx.pattern >> k & 1u;
            CHECK(obs.slot_samples[static_cast<std::size_t>(k)] ==
                  doctest::Approx(sig ? std::sqrt(clean.T_s) * clean.I_ph : 0.0));
            for (int i = 0; i < 4; ++i) {
                const double expect = sig && i == tx.inner_indices[static_cast<std::size_t>(j)] ? e : 0.0;
                CHECK(obs.fsk_metric(k, i, 4) == doctest::Approx(expect).epsilon(1e-12));
            }
            j += sig;
        }
    }
    SUBCASE("qam")
    {
        const Modem m(SchemeParams::qam_mppm(4, 2, 16, 0.9));
        const auto tx = m.modulate(0b0110'1001'11);
        const auto obs = m.observe(tx, clean, rng);
        const double s = std::sqrt(clean.T_s / 2) * clean.I_ph * 0.9;
        int j = 0;
        for (int k = 0; k < 4; ++k) {
            if (!(tx.pattern >> k & 1u)) {
                CHECK(std::abs(obs.iq_samples[static_cast<std::size_t>(k)]) == 0.0);
                continue;
            }
            const auto want = s * m.constellation().points[static_cast<std::size_t>(tx.inner_indices[static_cast<std::size_t>(j++)])];
            CHECK(std::abs(obs.iq_samples[static_cast<std::size_t>(k)] - want) < 1e-12 * s);
        }
    }
}

TEST_CASE("SPPM decision rule")
{
    const auto p = SchemeParams::sppm(4, 4, 0.5);
    const Modem m(p);
    const auto l = LinkState::make(1e-6, 1e-7, 1e-21);
    const double u = std::sqrt(l.T_s) * l.I_ph;
    RxObservation obs;
    obs.slot_samples = {0.2 * u, 0.9 * u, 0.1 * u, 0.15 * u};
    // Slot 1, transmitter 1 (C_1 = 5/6).
    CHECK(m.demodulate(obs, l) == ((1u << 2) | 1u));
    // The raw maximum is used, not the square law.
    obs.slot_samples = {-2.0 * u, 0.6 * u, 0.1 * u, 0.0};
    CHECK((m.demodulate(obs, l) & 3u) == 1u);
}

TEST_CASE("observation noise statistics")
{
    const auto p = SchemeParams::itfh(4, 2, 8, 0.9);
    const Modem m(p);
    const auto l = LinkState::make(1e-6, 1e-7, 2e-21);
    Rng rng(99);
    const int n = 100000;
    double sum = 0.0;
    std::vector<double> y_unsent, y_empty;
    for (int t = 0; t < n; ++t) {
        const auto tx = m.modulate(static_cast<std::uint64_t>(t) & 0xffu);
        const auto obs = m.observe(tx, l, rng);
        int j = 0;
        for (int k = 0; k < 4; ++k) {
            if (tx.pattern >> k & 1u) {
                sum += obs.slot_samples[static_cast<std::size_t>(k)];
                const int sent = tx.inner_indices[static_cast<std::size_t>(j++)];
                if (t % 2 == 0)
                    y_unsent.push_back(obs.fsk_metric(k, (sent + 3) % 8, 8));
            } else if (t % 2 == 1) {
                y_empty.push_back(obs.fsk_metric(k, t % 8, 8));
            }
        }
    }
    const double mean = sum / (2.0 * n);
    const double se = l.sigma / std::sqrt(2.0 * n);
    CHECK(std::abs(mean - std::sqrt(l.T_s) * l.I_ph) < 4.0 * se);
    const double crit = 1.358;
    CHECK(ks_exponential(y_unsent, 2 * l.sigma_sq()) < crit / std::sqrt(static_cast<double>(y_unsent.size())));
    CHECK(ks_exponential(y_empty, 2 * l.sigma_sq()) < crit / std::sqrt(static_cast<double>(y_empty.size())));
}

TEST_CASE("decisions are invariant to a common positive scaling")
{
    const auto p = SchemeParams::itfh(8, 4, 16, 0.9);
    const Modem m(p);
    const auto l = LinkState::make(1e-6, 1e-7, 5e-20);
    Rng rng(5);
    for (int t = 0; t < 500; ++t) {
        auto obs = m.observe(m.modulate(rng() & 0x3fffffu), l, rng);
        const auto d = m.demodulate(obs, l);
        for (auto& r : obs.slot_samples)
            r *= 3.7;
        for (auto& y : obs.fsk_metrics)
            y *= 3.7 * 3.7;
        CHECK(m.demodulate(obs, l) == d);
    }
}

TEST_CASE("isolated inner decisions reproduce the inner error formulas")
{
    // Pattern known: only the inner decision in the true signal slots counts.
    auto inner_ser_mc = [](const SchemeParams& p, double es_over_n0, int trials, std::uint64_t seed) {
        const Modem m(p);
        const double I_ph = 1e-6, T_s = 1e-7;
        // Es/N0 (inner) = T_s I_ph^2 m^2 / (4 sigma^2)
        const double s2 = T_s * I_ph * I_ph * p.m * p.m / (4.0 * es_over_n0);
        const auto l = LinkState::make(I_ph, T_s, 2.0 * s2);
        Rng rng(seed);
        long errors = 0, total = 0;
        for (int t = 0; t < trials; ++t) {
            const auto tx = m.modulate(rng() & ((std::uint64_t{1} << m.split().total()) - 1));
            const auto obs = m.observe(tx, l, rng);
            int j = 0;
            for (int k = 0; k < p.N; ++k)
                if (tx.pattern >> k & 1u) {
                    errors += m.decide_inner(obs, k, l) != tx.inner_indices[static_cast<std::size_t>(j++)];
                    ++total;
                }
        }
        return std::pair{static_cast<double>(errors) / static_cast<double>(total), total};
    };
    auto within = [](double est, long n, double truth) {
        const double se = std::sqrt(truth * (1 - truth) / static_cast<double>(n));
        return std::abs(est - truth) < 4.0 * se;
    };

    SUBCASE("noncoherent FSK, M_F = 16 at Es/N0 = 10")
    {
        const auto [est, n] = inner_ser_mc(SchemeParams::itfh(2, 1, 16, 0.9), 10.0, 200000, 17);
        CHECK(within(est, n, fsk_ser(16, 10.0)));
    }
    SUBCASE("noncoherent FSK, M_F = 2")
    {
        const auto [est, n] = inner_ser_mc(SchemeParams::itfh(2, 1, 2, 0.9), 4.0, 200000, 18);
        CHECK(within(est, n, fsk_ser(2, 4.0)));
    }
    SUBCASE("8-QAM branch")
    {
        const auto [est, n] = inner_ser_mc(SchemeParams::qam_mppm(2, 1, 8, 0.9), 40.0, 200000, 19);
        CHECK(within(est, n, qam_ser(8, 40.0)));
    }
    SUBCASE("16-QAM, high SNR")
    {
        const auto [est, n] = inner_ser_mc(SchemeParams::qam_mppm(2, 1, 16, 0.9), 60.0, 200000, 20);
        CHECK(within(est, n, qam_ser(16, 60.0)));
    }
}

TEST_CASE("SPPM transmitter decisions approach the pairwise bound")
{
    const auto p = SchemeParams::sppm(8, 4, 0.5);
    const Modem m(p);
    const double I_ph = 1e-6, T_s = 1e-7;
    // Choose sigma so that the adjacent-amplitude pairwise error is about 1e-5.
    const double step = 0.5 / 3.0;
    const double target_arg = 3.0; // erfc(3)/2 ~ 1.1e-5
    const double s2 = T_s * I_ph * I_ph * step * step / (8.0 * target_arg * target_arg);
    const auto l = LinkState::make(I_ph, T_s, 2.0 * s2);
    const auto sig = m.signature();
    double bound = 0.0;
    for (int i = 0; i < 4; ++i) {
        double b = 0.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) {
                const double d = sig.amplitudes[static_cast<std::size_t>(i)] - sig.amplitudes[static_cast<std::size_t>(j)];
                b += 0.5 * std::erfc(std::sqrt(l.omega() * d * d / (8.0 * s2)));
            }
        bound += b / 4.0;
    }
    Rng rng(23);
    std::normal_distribution<double> n;
    const long trials = 4000000;
    long errors = 0;
    for (long t = 0; t < trials; ++t) {
        const int i = static_cast<int>(rng() & 3u);
        const double r = std::sqrt(T_s) * I_ph * sig.amplitudes[static_cast<std::size_t>(i)] + l.sigma * n(rng);
        errors += m.decide_transmitter(r, l) != i;
    }
    const double est = static_cast<double>(errors) / trials;
    CHECK(est / bound == doctest::Approx(1.0).epsilon(0.25));
}
