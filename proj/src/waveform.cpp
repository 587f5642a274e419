#include "itfh/waveform.hpp"

#include "itfh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

namespace itfh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int tone_count(const SchemeParams& p)
{
    return p.scheme == Scheme::ITFH ? p.M_F : 1;
}

} // namespace

WaveformEngine::WaveformEngine(const SchemeParams& p, const WaveformConfig& wc) : modem_(p)
{
    if (wc.n0 < 1)
        throw ConfigError("waveform: n0 must be a positive integer");
    if (wc.samples_per_slot < 0)
        throw ConfigError("waveform: samples_per_slot must be nonnegative");
    n0_ = wc.n0;
    tones_ = tone_count(p);
    const int span = n0_ + tones_;
    S_ = wc.samples_per_slot ? wc.samples_per_slot : 16 * span;
    if (S_ < 8 * span)
        throw ConfigError("waveform: samples_per_slot must be at least 8 (n0 + tones) = " +
                          std::to_string(8 * span));

    cos_.resize(static_cast<std::size_t>(tones_ * S_));
    sin_.resize(cos_.size());
    for (int i = 0; i < tones_; ++i)
        for (int j = 0; j < S_; ++j) {
            const double arg = kTwoPi * (n0_ + i) * (j + 0.5) / S_;
            cos_[static_cast<std::size_t>(i * S_ + j)] = std::cos(arg);
            sin_[static_cast<std::size_t>(i * S_ + j)] = std::sin(arg);
        }
}

int WaveformEngine::top_tone() const
{
    return n0_ + tones_ - 1;
}

Waveform WaveformEngine::synthesize(const TxSymbol& tx, const LinkState& l, Rng& rng) const
{
    std::vector<double> phases;
    if (modem_.params().scheme == Scheme::ITFH) {
        std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
        phases.resize(static_cast<std::size_t>(modem_.params().w));
        for (auto& th : phases)
            th = uniform(rng);
    }
    return synthesize(tx, l, phases);
}

Waveform WaveformEngine::synthesize(const TxSymbol& tx, const LinkState& l, const std::vector<double>& phases) const
{
    const auto& p = modem_.params();
    Waveform wf;
    wf.N = p.N;
    wf.samples_per_slot = S_;
    wf.dt = l.T_s / S_;
    wf.samples.assign(static_cast<std::size_t>(p.N * S_), 0.0);
    wf.phases = phases;
    if (p.scheme == Scheme::ITFH && phases.size() != static_cast<std::size_t>(p.w))
        throw ConfigError("synthesize: one phase per signal slot is required");

    int j = 0;
    for (int k = 0; k < p.N; ++k) {
        if (!(tx.pattern >> k & 1u))
            continue;
        double* out = wf.samples.data() + static_cast<std::ptrdiff_t>(k) * S_;
        switch (p.scheme) {
        case Scheme::ITFH: {
            const int n = n0_ + tx.inner_indices[static_cast<std::size_t>(j)];
            const double th = phases[static_cast<std::size_t>(j)];
            for (int s = 0; s < S_; ++s)
                out[s] = l.I_ph * (1.0 + p.m * std::cos(kTwoPi * n * (s + 0.5) / S_ + th));
            break;
        }
        case Scheme::QAM_MPPM: {
            const auto a = modem_.constellation().points[static_cast<std::size_t>(tx.inner_indices[static_cast<std::size_t>(j)])];
            for (int s = 0; s < S_; ++s)
                out[s] = l.I_ph * (1.0 + p.m * (a.real() * cos_[static_cast<std::size_t>(s)] +
                                                a.imag() * sin_[static_cast<std::size_t>(s)]));
            break;
        }
        case Scheme::SPPM: {
            const double c = modem_.signature().amplitudes[static_cast<std::size_t>(tx.inner_indices.at(0))];
            std::fill(out, out + S_, l.I_ph * c);
            break;
        }
        case Scheme::MPPM:
        case Scheme::PPM:
            std::fill(out, out + S_, l.I_ph);
            break;
        }
        ++j;
    }
    return wf;
}

std::vector<double> WaveformEngine::draw_noise(const LinkState& l, Rng& rng) const
{
    const double sd = std::sqrt(0.5 * l.N0 * S_ / l.T_s);
    std::normal_distribution<double> unit;
    std::vector<double> z(static_cast<std::size_t>(modem_.params().N * S_));
    for (auto& v : z)
        v = sd * unit(rng);
    return z;
}

void WaveformEngine::add_noise(Waveform& wf, const LinkState& l, Rng& rng) const
{
    const auto z = draw_noise(l, rng);
    for (std::size_t i = 0; i < z.size(); ++i)
        wf.samples[i] += z[i];
}

CorrelatorOutputs WaveformEngine::correlate(const Waveform& wf, const LinkState& l) const
{
    const auto& p = modem_.params();
    if (wf.samples.size() != static_cast<std::size_t>(p.N * S_))
        throw ConfigError("correlate: waveform does not match the engine");
    const double dt = l.T_s / S_;
    const double h = 1.0 / std::sqrt(l.T_s);
    const double g = std::sqrt(2.0 / l.T_s);

    CorrelatorOutputs out;
    out.obs.slot_samples.resize(static_cast<std::size_t>(p.N));
    if (p.scheme == Scheme::ITFH) {
        out.obs.fsk_metrics.resize(static_cast<std::size_t>(p.N * tones_));
        out.fsk_iq.resize(out.obs.fsk_metrics.size());
    } else if (p.scheme == Scheme::QAM_MPPM) {
        out.obs.iq_samples.resize(static_cast<std::size_t>(p.N));
    }

    for (int k = 0; k < p.N; ++k) {
        const double* x = wf.samples.data() + static_cast<std::ptrdiff_t>(k) * S_;
        double dc = 0.0;
        for (int s = 0; s < S_; ++s)
            dc += x[s];
        out.obs.slot_samples[static_cast<std::size_t>(k)] = dc * h * dt;
        if (p.scheme != Scheme::ITFH && p.scheme != Scheme::QAM_MPPM)
            continue;
        for (int i = 0; i < tones_; ++i) {
            const double* c = cos_.data() + static_cast<std::ptrdiff_t>(i) * S_;
            const double* sn = sin_.data() + static_cast<std::ptrdiff_t>(i) * S_;
            double re = 0.0, im = 0.0;
            for (int s = 0; s < S_; ++s) {
                re += x[s] * c[s];
                im += x[s] * sn[s];
            }
            const std::complex<double> z{re * g * dt, im * g * dt};
            if (p.scheme == Scheme::ITFH) {
                out.fsk_iq[static_cast<std::size_t>(k * tones_ + i)] = z;
                out.obs.fsk_metrics[static_cast<std::size_t>(k * tones_ + i)] = std::norm(z);
            } else {
                out.obs.iq_samples[static_cast<std::size_t>(k)] = z;
            }
        }
    }
    return out;
}

RxObservation WaveformEngine::correlate_receive(const Waveform& wf, const LinkState& l) const
{
    return correlate(wf, l).obs;
}

std::pair<double, double> WaveformEngine::project_slot(const std::vector<double>& samples, int k, double T_s) const
{
    const double dt = T_s / S_;
    const double* x = samples.data() + static_cast<std::ptrdiff_t>(k) * S_;
    double dc = 0.0, re = 0.0;
    for (int s = 0; s < S_; ++s) {
        dc += x[s];
        re += x[s] * cos_[static_cast<std::size_t>(s)];
    }
    return {dc * dt / std::sqrt(T_s), re * dt * std::sqrt(2.0 / T_s)};
}

// ---- crosscheck ----

namespace {

struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double var = 0.0;
    double m4 = 0.0;
};

Moments moments(const std::vector<double>& v)
{
    Moments m;
    m.n = v.size();
    if (v.size() < 2)
        return m;
    double s = 0.0;
    for (double x : v)
        s += x;
    m.mean = s / static_cast<double>(v.size());
    double s2 = 0.0, s4 = 0.0;
    for (double x : v) {
        const double d = (x - m.mean) * (x - m.mean);
        s2 += d;
        s4 += d * d;
    }
    m.var = s2 / static_cast<double>(v.size() - 1);
    m.m4 = s4 / static_cast<double>(v.size());
    return m;
}

using Samples = std::map<std::string, std::vector<double>>;

void collect(const Modem& modem, const TxSymbol& tx, const RxObservation& obs, const LinkState& l, Samples& out)
{
    const auto& p = modem.params();
    const double pulse = std::sqrt(l.T_s) * l.I_ph;
    const double tone = std::sqrt(l.T_s / 2.0) * l.I_ph * p.m;
    int j = 0;
    for (int k = 0; k < p.N; ++k) {
        const bool signal = tx.pattern >> k & 1u;
        const double r = obs.slot_samples[static_cast<std::size_t>(k)];
        if (!signal) {
            out["r_empty"].push_back(r);
            if (p.scheme == Scheme::ITFH)
                out["y_empty"].push_back(obs.fsk_metric(k, 0, p.M_F));
            if (p.scheme == Scheme::QAM_MPPM)
                out["iq_empty_re"].push_back(obs.iq_samples[static_cast<std::size_t>(k)].real());
            continue;
        }
        const int inner = tx.inner_indices.empty() ? 0 : tx.inner_indices[static_cast<std::size_t>(p.scheme == Scheme::SPPM ? 0 : j)];
        const double amp = p.scheme == Scheme::SPPM ? modem.signature().amplitudes[static_cast<std::size_t>(inner)] : 1.0;
        out["r_signal_noise"].push_back(r - pulse * amp);
        if (p.scheme == Scheme::ITFH) {
            out["y_sent"].push_back(obs.fsk_metric(k, inner, p.M_F));
            out["y_unsent"].push_back(obs.fsk_metric(k, (inner + 1) % p.M_F, p.M_F));
        }
        if (p.scheme == Scheme::QAM_MPPM) {
            const auto e = obs.iq_samples[static_cast<std::size_t>(k)] -
                           tone * modem.constellation().points[static_cast<std::size_t>(inner)];
            out["iq_signal_re"].push_back(e.real());
            out["iq_signal_im"].push_back(e.imag());
        }
        ++j;
    }
}

void tally(ErrorStats& s, std::uint64_t sent, std::uint64_t got, int bits)
{
    const int wrong = std::popcount(sent ^ got);
    s.symbols += 1;
    s.bits += static_cast<std::uint64_t>(bits);
    s.symbol_errors += wrong != 0;
    s.bit_errors += static_cast<std::uint64_t>(wrong);
}

double rel_diff(double a, double b, double scale)
{
    return std::abs(a - b) / scale;
}

} // namespace

CrosscheckReport crosscheck(const SchemeParams& p, const LinkState& l, const WaveformConfig& wc,
                            std::uint64_t trials, std::uint64_t seed)
{
    if (trials < 2)
        throw ConfigError("crosscheck: at least two trials are required");
    const WaveformEngine engine(p, wc);
    const Modem& modem = engine.modem();
    const int total_bits = modem.split().total();
    const std::uint64_t mask = total_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << total_bits) - 1;
    CrosscheckReport rep;

    // Noiseless: both engines must produce the same statistics and decisions.
    {
        const LinkState clean = LinkState::noiseless(l.I_ph, l.T_s);
        Rng rng(derive_seed(seed, 0));
        const double pulse = std::sqrt(l.T_s) * l.I_ph;
        const double tone = std::sqrt(l.T_s / 2.0) * l.I_ph * p.m;
        rep.noiseless_decisions_equal = true;
        for (int t = 0; t < 64; ++t) {
            const std::uint64_t bits = rng() & mask;
            const auto tx = modem.modulate(bits);
            const auto wf = engine.synthesize(tx, clean, rng);
            const auto wobs = engine.correlate_receive(wf, clean);
            const auto dobs = p.scheme == Scheme::ITFH ? modem.observe(tx, clean, wf.phases, rng)
                                                       : modem.observe(tx, clean, rng);
            for (int k = 0; k < p.N; ++k)
                rep.noiseless_max_rel_error =
                    std::max(rep.noiseless_max_rel_error, rel_diff(wobs.slot_samples[static_cast<std::size_t>(k)],
                                                                   dobs.slot_samples[static_cast<std::size_t>(k)], pulse));
            for (std::size_t i = 0; i < dobs.fsk_metrics.size(); ++i)
                rep.noiseless_max_rel_error = std::max(
                    rep.noiseless_max_rel_error, rel_diff(wobs.fsk_metrics[i], dobs.fsk_metrics[i], tone * tone));
            for (std::size_t i = 0; i < dobs.iq_samples.size(); ++i)
                rep.noiseless_max_rel_error =
                    std::max(rep.noiseless_max_rel_error, std::abs(wobs.iq_samples[i] - dobs.iq_samples[i]) / tone);
            const auto dw = modem.demodulate(wobs, clean);
            const auto dd = modem.demodulate(dobs, clean);
            if (dw != dd || dd != bits)
                rep.noiseless_decisions_equal = false;
        }
        rep.noiseless_pass = rep.noiseless_decisions_equal && rep.noiseless_max_rel_error < 1e-8;
    }

    // Matched noisy campaigns with independent noise streams.
    Rng rng_bits(derive_seed(seed, 1));
    Rng rng_d(derive_seed(seed, 2));
    Rng rng_w(derive_seed(seed, 3));
    Samples sd, sw;
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        const std::uint64_t bits = rng_bits() & mask;
        const auto tx = modem.modulate(bits);

        const auto dobs = modem.observe(tx, l, rng_d);
        tally(rep.discrete, bits, modem.demodulate(dobs, l), total_bits);
        collect(modem, tx, dobs, l, sd);

        auto wf = engine.synthesize(tx, l, rng_w);
        const auto noise = engine.draw_noise(l, rng_w);
        for (std::size_t i = 0; i < noise.size(); ++i)
            wf.samples[i] += noise[i];
        const auto [a, b] = engine.project_slot(noise, 0, l.T_s);
        sa += a;
        sb += b;
        saa += a * a;
        sbb += b * b;
        sab += a * b;
        const auto wobs = engine.correlate_receive(wf, l);
        tally(rep.waveform, bits, modem.demodulate(wobs, l), total_bits);
        collect(modem, tx, wobs, l, sw);
    }
    rep.discrete.seed = rep.waveform.seed = seed;
    rep.discrete.finalize();
    rep.waveform.finalize();
    rep.ber_overlap = rep.discrete.ber_interval.overlaps(rep.waveform.ber_interval);

    const double n = static_cast<double>(trials);
    const double cov = sab / n - (sa / n) * (sb / n);
    const double va = saa / n - (sa / n) * (sa / n);
    const double vb = sbb / n - (sb / n) * (sb / n);
    rep.noise_correlation = cov / std::sqrt(va * vb);
    rep.correlation_limit = 3.0 / std::sqrt(n);
    rep.correlation_pass = std::abs(rep.noise_correlation) < rep.correlation_limit;

    bool stats_pass = true;
    constexpr double z = 1.959963984540054;
    for (const auto& [name, dv] : sd) {
        const auto& wv = sw[name];
        const Moments md = moments(dv);
        const Moments mw = moments(wv);
        StatisticDelta d;
        d.name = name;
        d.count = std::min(md.n, mw.n);
        d.mean_discrete = md.mean;
        d.mean_waveform = mw.mean;
        d.var_discrete = md.var;
        d.var_waveform = mw.var;
        auto se_mean = [](const Moments& m) { return std::sqrt(m.var / static_cast<double>(m.n)); };
        auto se_var = [](const Moments& m) {
            return std::sqrt(std::max(0.0, m.m4 - m.var * m.var) / static_cast<double>(m.n));
        };
        d.pass = md.n > 1 && mw.n > 1 && std::abs(md.mean - mw.mean) <= z * (se_mean(md) + se_mean(mw)) &&
                 std::abs(md.var - mw.var) <= z * (se_var(md) + se_var(mw));
        stats_pass = stats_pass && d.pass;
        rep.statistics.push_back(d);
    }

    rep.pass = rep.noiseless_pass && rep.ber_overlap && rep.correlation_pass && stats_pass;
    return rep;
}

} // namespace itfh
