#include "itfh/channel.hpp"
#include "itfh/errors.hpp"
#include "itfh/waveform.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace itfh;

namespace {

LinkState link_at(const SchemeParams& p, double dbm)
{
    return link_state_from_optical_power(dbm_to_watts(dbm), p, NoiseEnvironment{}, slot_duration_for_rate(p, 27.5e6));
}

double slot_energy(const Waveform& wf, int k)
{
    double e = 0.0;
    for (int s = 0; s < wf.samples_per_slot; ++s) {
        const double x = wf.samples[static_cast<std::size_t>(k * wf.samples_per_slot + s)];
        e += x * x;
    }
    return e * wf.dt;
}

} // namespace

TEST_CASE("configuration guards")
{
    const auto p = SchemeParams::itfh(8, 4, 16, 0.9);
    CHECK(WaveformEngine(p).samples_per_slot() == 16 * (32 + 16));
    CHECK(WaveformEngine(p).top_tone() == 47);
    CHECK_THROWS_AS(WaveformEngine(p, {8 * 48 - 1, 32}), ConfigError);
    CHECK_NOTHROW(WaveformEngine(p, {8 * 48, 32}));
    CHECK_THROWS_AS(WaveformEngine(p, {0, 0}), ConfigError);
}

TEST_CASE("synthesized waveforms")
{
    const auto l = LinkState::noiseless(2e-6, 1e-7);
    Rng rng(1);

    SUBCASE("I-TFH")
    {
        const auto p = SchemeParams::itfh(8, 4, 16, 0.9);
        const WaveformEngine eng(p);
        const Modem& mod = eng.modem();
        for (std::uint64_t bits : {0ull, 0x12345ull, 0x3fffffull}) {
            const auto tx = mod.modulate(bits);
            const auto wf = eng.synthesize(tx, l, rng);
            REQUIRE(wf.phases.size() == 4u);
            const int S = wf.samples_per_slot;
            for (int k = 0; k < p.N; ++k) {
                const auto first = wf.samples.begin() + k * S;
                const bool signal = tx.pattern >> k & 1u;
                double mean = 0.0;
                for (int s = 0; s < S; ++s)
                    mean += first[s];
                mean /= S;
                if (!signal) {
                    CHECK(std::all_of(first, first + S, [](double v) { return v == 0.0; }));
                    continue;
                }
                CHECK(mean == doctest::Approx(l.I_ph).epsilon(1e-12));
                CHECK(*std::min_element(first, first + S) >= l.I_ph * (1 - p.m) - 1e-18);
                // Parseval: DC plus tone power.
                CHECK(slot_energy(wf, k) == doctest::Approx(l.T_s * l.I_ph * l.I_ph * (1 + p.m * p.m / 2)).epsilon(1e-9));
            }
        }
    }
    SUBCASE("QAM-MPPM, SPPM and MPPM energies")
    {
        const auto q = SchemeParams::qam_mppm(8, 4, 16, 0.9);
        const WaveformEngine eq(q);
        const auto tx = eq.modem().modulate(0x2a5b1ull);
        const auto wf = eq.synthesize(tx, l, rng);
        int j = 0;
        for (int k = 0; k < q.N; ++k) {
            if (!(tx.pattern >> k & 1u))
                continue;
            const auto a = eq.modem().constellation().points[static_cast<std::size_t>(tx.inner_indices[static_cast<std::size_t>(j++)])];
            CHECK(slot_energy(wf, k) ==
                  doctest::Approx(l.T_s * l.I_ph * l.I_ph * (1 + q.m * q.m * std::norm(a) / 2)).epsilon(1e-9));
        }

        const auto s = SchemeParams::sppm(8, 4, 0.5);
        const WaveformEngine es(s);
        const auto ts = es.modem().modulate(0b10110);
        const auto ws = es.synthesize(ts, l, rng);
        const double c = es.modem().signature().amplitudes[static_cast<std::size_t>(ts.inner_indices[0])];
        const int slot = std::countr_zero(ts.pattern);
        CHECK(slot_energy(ws, slot) == doctest::Approx(l.T_s * l.I_ph * l.I_ph * c * c).epsilon(1e-12));

        const WaveformEngine em(SchemeParams::mppm(8, 4));
        const auto zero = em.synthesize(TxSymbol{0, {}, 0}, l, rng);
        CHECK(std::all_of(zero.samples.begin(), zero.samples.end(), [](double v) { return v == 0.0; }));
    }
}

TEST_CASE("tone orthogonality")
{
    // Feed a pure tone of each index through the correlator bank.
    const auto p = SchemeParams::itfh(4, 2, 8, 1.0);
    const WaveformEngine eng(p);
    const auto l = LinkState::noiseless(1.0, 1.0);
    const int S = eng.samples_per_slot();
    for (int i = 0; i < p.M_F; ++i) {
        Waveform wf;
        wf.N = p.N;
        wf.samples_per_slot = S;
        wf.dt = 1.0 / S;
        wf.samples.assign(static_cast<std::size_t>(p.N * S), 0.0);
        for (int s = 0; s < S; ++s)
            wf.samples[static_cast<std::size_t>(s)] =
                std::cos(2 * std::numbers::pi * (eng.n0() + i) * (s + 0.5) / S + 0.3);
        const auto out = eng.correlate(wf, l);
        for (int f = 0; f < p.M_F; ++f) {
            const double y = out.obs.fsk_metric(0, f, p.M_F);
            if (f == i)
                CHECK(y == doctest::Approx(0.5).epsilon(1e-12));
            else
                CHECK(y < 1e-26);
        }
        CHECK(std::abs(out.obs.slot_samples[0]) < 1e-13);
    }
}

TEST_CASE("noiseless correlator outputs")
{
    const auto p = SchemeParams::itfh(8, 4, 16, 0.9);
    const WaveformEngine eng(p);
    const auto l = LinkState::noiseless(3e-6, 1e-7);
    Rng rng(4);
    const double pulse = std::sqrt(l.T_s) * l.I_ph;
    const double y = l.T_s * l.I_ph * l.I_ph * p.m * p.m / 2;
    for (int t = 0; t < 20; ++t) {
        const std::uint64_t bits = rng() & ((1u << 22) - 1);
        const auto tx = eng.modem().modulate(bits);
        const auto obs = eng.correlate_receive(eng.synthesize(tx, l, rng), l);
        int j = 0;
        for (int k = 0; k < p.N; ++k) {
            const bool signal = tx.pattern >> k & 1u;
            CHECK(std::abs(obs.slot_samples[static_cast<std::size_t>(k)] - (signal ? pulse : 0.0)) <= 1e-10 * pulse);
            const int sent = signal ? tx.inner_indices[static_cast<std::size_t>(j++)] : -1;
            for (int f = 0; f < p.M_F; ++f)
                CHECK(std::abs(obs.fsk_metric(k, f, p.M_F) - (f == sent ? y : 0.0)) <= 1e-8 * y);
        }
        CHECK(eng.modem().demodulate(obs, l) == bits);
    }
}

TEST_CASE("filtered noise variance")
{
    const auto p = SchemeParams::mppm(8, 4);
    const WaveformEngine eng(p);
    const auto l = link_at(p, -30);
    Rng rng(8);
    double s = 0.0, ss = 0.0;
    std::uint64_t n = 0;
    for (int t = 0; t < 12500; ++t) {
        const auto z = eng.draw_noise(l, rng);
        for (int k = 0; k < p.N; ++k) {
            const double r = eng.project_slot(z, k, l.T_s).first;
            s += r;
            ss += r * r;
            ++n;
        }
    }
    const double mean = s / n;
    const double var = ss / n - mean * mean;
    CHECK(var == doctest::Approx(l.sigma_sq()).epsilon(0.03));
}

TEST_CASE("engine crosscheck")
{
    struct Case {
        SchemeParams p;
        double dbm;
        std::uint64_t trials;
    };
    for (const auto& c : {Case{SchemeParams::mppm(8, 4), -31.0, 20000}, Case{SchemeParams::itfh(8, 4, 16, 0.9), -31.0, 4000},
                          Case{SchemeParams::qam_mppm(8, 4, 16, 0.9), -29.0, 6000},
                          Case{SchemeParams::sppm(8, 4, 0.5), -28.0, 20000}}) {
        const auto rep = crosscheck(c.p, link_at(c.p, c.dbm), {}, c.trials, 77);
        CAPTURE(to_string(c.p.scheme));
        CAPTURE(rep.discrete.ber);
        CAPTURE(rep.waveform.ber);
        CAPTURE(rep.noise_correlation);
        CHECK(rep.noiseless_pass);
        CHECK(rep.noiseless_max_rel_error < 1e-8);
        CHECK(rep.ber_overlap);
        CHECK(rep.correlation_pass);
        CHECK(rep.discrete.bit_errors > 0u);
        for (const auto& d : rep.statistics) {
            CAPTURE(d.name);
            CAPTURE(d.mean_discrete);
            CAPTURE(d.mean_waveform);
            CAPTURE(d.var_discrete);
            CAPTURE(d.var_waveform);
            CHECK(d.pass);
        }
        CHECK(rep.pass);
    }
    CHECK_THROWS_AS(crosscheck(SchemeParams::mppm(8, 4), link_at(SchemeParams::mppm(8, 4), -30), {}, 1, 1), ConfigError);
}
