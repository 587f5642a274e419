#include "itfh/analysis.hpp"

#include "itfh/errors.hpp"
#include "itfh/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

namespace itfh {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kEps = std::numeric_limits<double>::epsilon();
// Beyond this many standard deviations the Gaussian kernel is below 1e-300.
constexpr double kGaussTail = 40.0;

double clamp01(double v)
{
    return std::clamp(v, 0.0, 1.0);
}

double phi(double u)
{
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
}

// Neumaier's compensated summation.
class CompensatedSum {
public:
    void add(double x)
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            c_ += (sum_ - t) + x;
        else
            c_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

// log(erf(x)) for x >= 0 without losing the tail near 1.
double log_erf(double x)
{
    const double c = std::erfc(x);
    return c < 0.5 ? std::log1p(-c) : std::log(std::erf(x));
}

numerics::QuadratureResult integrate_checked(const std::function<double(double)>& f, double lo, double hi,
                                             const numerics::QuadratureOptions& opts, const char* what)
{
    auto r = numerics::integrate_adaptive(f, lo, hi, opts);
    if (!r.converged)
        throw NumericalError(std::string(what) + ": quadrature did not converge");
    return r;
}

void require_mppm_shape(int N, int w, double snr)
{
    if (N < 2 || w < 1 || w >= N)
        throw ConfigError("MPPM needs 1 <= w < N");
    if (!(snr > 0.0) || !std::isfinite(snr))
        throw DomainError("signal-to-noise ratio must be positive and finite");
}

bool is_compound(Scheme s)
{
    return s == Scheme::ITFH || s == Scheme::QAM_MPPM;
}

double snr_of(const LinkState& l)
{
    return l.omega() / l.sigma_sq();
}

EfficiencyPoint make_point(std::string label, double rho, double eta)
{
    if (!(rho > 0.0) || !(eta > 0.0))
        throw DomainError("efficiency: nonpositive result for " + label);
    return {std::move(label), rho, eta, -10.0 * std::log10(eta)};
}

double ossk_eta_factor(int M_S, double L_m)
{
    const auto sig = sppm_signature(M_S, L_m);
    const double d = M_S - 1.0;
    return M_S * L_m * L_m / (4.0 * d * d * sig.sum_sq());
}

} // namespace

// ---- efficiency ----

double bandwidth_slots(const SchemeParams& p)
{
    return p.scheme == Scheme::ITFH ? p.M_F + 1.0 : 2.0;
}

double occupied_bandwidth(const SchemeParams& p, double T_s)
{
    if (!(T_s > 0.0))
        throw DomainError("occupied_bandwidth: T_s must be positive");
    return bandwidth_slots(p) / T_s;
}

EfficiencyPoint efficiency(const SchemeParams& p)
{
    validate(p);
    const int M = p.scheme == Scheme::ITFH ? p.M_F : p.scheme == Scheme::QAM_MPPM ? p.M_Q : p.M_S;
    return efficiency_row(p.scheme, p.N, p.w, M, p.m, p.L_m);
}

EfficiencyPoint efficiency_row(Scheme s, int N, int w, int M, double m, double L_m)
{
    if (N < 2 || w < 1 || w >= N)
        throw ConfigError("efficiency: need N >= 2 and 1 <= w < N");
    const double pattern_bits = floor_log2_binomial(N, w);
    const double m2 = m * m;
    const std::string label(to_string(s));
    const double twoN = 2.0 * N;
    switch (s) {
    case Scheme::MPPM:
        return make_point(label, pattern_bits / twoN, pattern_bits / (2.0 * w));
    case Scheme::PPM: {
        const double bits = ilog2(N);
        return make_point(label, bits / twoN, bits / 2.0);
    }
    case Scheme::ITFH: {
        const double bits = w * ilog2(M) + pattern_bits;
        return make_point(label, bits / ((M + 1.0) * N), m2 * bits / (4.0 * w * (1.0 + m2 / 2.0)));
    }
    case Scheme::QAM_MPPM: {
        const double bits = w * ilog2(M) + pattern_bits;
        return make_point(label, bits / twoN,
                          m2 * bits / (8.0 * w * (1.0 + m2 / 2.0)) * qam_min_distance_sq_formula(ilog2(M)));
    }
    case Scheme::SPPM: {
        const double bits = ilog2(static_cast<long long>(M) * N);
        return make_point(label, bits / twoN, bits * ossk_eta_factor(M, L_m));
    }
    }
    throw ConfigError("efficiency: unknown scheme");
}

EfficiencyPoint fsk_efficiency(int M_F, double m)
{
    const int n = ilog2(M_F);
    if (n < 1 || !(m > 0.0 && m <= 1.0))
        throw ConfigError("fsk_efficiency: need M_F >= 2 and m in (0, 1]");
    const double m2 = m * m;
    return make_point("fsk", n / (M_F + 1.0), m2 * n / (4.0 * (1.0 + m2 / 2.0)));
}

EfficiencyPoint qam_efficiency(int M_Q, double m)
{
    const int n = ilog2(M_Q);
    if (n < 2 || !(m > 0.0 && m <= 1.0))
        throw ConfigError("qam_efficiency: need M_Q >= 4 and m in (0, 1]");
    const double m2 = m * m;
    return make_point("qam", n / 2.0, m2 * n / (8.0 * (1.0 + m2 / 2.0)) * qam_min_distance_sq_formula(n));
}

EfficiencyPoint ossk_efficiency(int M_S, double L_m)
{
    const int n = ilog2(M_S);
    if (n < 1 || !(L_m > 0.0 && L_m < 1.0))
        throw ConfigError("ossk_efficiency: need M_S >= 2 and L_m in (0, 1)");
    return make_point("ossk", n / 2.0, n * ossk_eta_factor(M_S, L_m));
}

// ---- MPPM symbol error ----

ProbabilityEstimate mppm_ser_exact(int N, int w, double snr)
{
    require_mppm_shape(N, w, snr);
    const double a = std::sqrt(snr);
    const int n_empty = N - w;
    // Error = w * integral f(t) Q(t)^(w-1) (1 - erf(t/sqrt2)^(N-w)) dt, using
    // w * integral f Q^(w-1) dt == 1 so nothing is subtracted from 1.
    auto f = [&](double t) {
        const double dens = phi(t - a) + phi(t + a);
        if (dens == 0.0)
            return 0.0;
        const double q = numerics::marcum_q_half(a, t);
        const double miss = -std::expm1(n_empty * log_erf(t / kSqrt2));
        return dens * std::pow(q, w - 1) * miss;
    };
    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-10;
    opts.abs_tol = 1e-300;
    auto lo = integrate_checked(f, 0.0, a, opts, "mppm_ser_exact");
    auto hi = integrate_checked(f, a, a + kGaussTail, opts, "mppm_ser_exact");
    ProbabilityEstimate out;
    out.value = clamp01(w * (lo.value + hi.value));
    out.abs_error = w * (lo.abs_error + hi.abs_error);
    out.below_floor = out.value < kReportingFloor;
    return out;
}

ProbabilityEstimate mppm_ser_bessel(int N, int w, double snr)
{
    require_mppm_shape(N, w, snr);
    const double a = std::sqrt(snr);
    const double lead = w / std::ldexp(1.0, w - 1);
    const double log_tail = numerics::log_erfc(a / kSqrt2);

    numerics::QuadratureOptions opts;
    opts.rel_tol = 1e-14;
    opts.abs_tol = 1e-300;
    opts.max_subdivisions = 8000;

    CompensatedSum sum;
    double magnitude = 0.0;
    double quad_error = 0.0;
    for (int p = 0; p <= w - 1; ++p) {
        const double outer = binomial_d(w - 1, p) * std::exp((w - 1 - p) * log_tail);
        if (outer == 0.0)
            continue;
        for (int l = 0; l <= N - w; ++l) {
            const double coef = lead * outer * binomial_d(N - w, l) * ((l & 1) ? -1.0 : 1.0);
            // Substituting u = t - sqrt(Omega)/sigma puts the kernel at the origin.
            auto f = [p, l, a](double u) {
                const double k = phi(u);
                if (k == 0.0)
                    return 0.0;
                return k * numerics::erfc_pow(u / kSqrt2, static_cast<unsigned>(p)) *
                       numerics::erfc_pow((u + a) / kSqrt2, static_cast<unsigned>(l));
            };
            auto left = integrate_checked(f, -a, 0.0, opts, "mppm_ser_bessel");
            auto right = integrate_checked(f, 0.0, kGaussTail, opts, "mppm_ser_bessel");
            const double term = coef * (left.value + right.value);
            sum.add(term);
            magnitude += std::abs(term);
            quad_error += std::abs(coef) * (left.abs_error + right.abs_error);
        }
    }
    // 1 - sum, compensated as well: the sum is close to 1 at high SNR.
    CompensatedSum result;
    result.add(1.0);
    result.add(-sum.value());
    const double cancellation = (magnitude + 1.0) * 8.0 * kEps + quad_error;

    ProbabilityEstimate out;
    out.value = clamp01(result.value());
    out.abs_error = cancellation;
    out.below_floor = out.value < std::max(kReportingFloor, 10.0 * cancellation);
    return out;
}

DistanceSpectrum distance_spectrum(const MppmCodebook& cb)
{
    const int N = cb.N();
    const int w = cb.w();
    const int lmax = std::min(w, N - w);
    const auto total = binomial(N, w);
    const double S = static_cast<double>(cb.size());
    const double E = static_cast<double>(total) - S;

    DistanceSpectrum spec;
    spec.p2 = cb.p2();
    spec.pair_counts.assign(static_cast<std::size_t>(lmax + 1), 0.0);

    const double direct_work = S * S / 2.0;
    const double excluded_work = S * E;
    if (std::min(direct_work, excluded_work) > 2e10)
        throw NumericalError("distance_spectrum: codebook too large for pairwise enumeration");

    const auto& pats = cb.patterns();
    if (direct_work <= excluded_work) {
        std::vector<unsigned long long> counts(spec.pair_counts.size(), 0);
        for (std::size_t i = 0; i < pats.size(); ++i)
            for (std::size_t j = i + 1; j < pats.size(); ++j)
                counts[static_cast<std::size_t>(std::popcount(pats[i] ^ pats[j]) / 2)] += 2;
        for (std::size_t l = 0; l < counts.size(); ++l)
            spec.pair_counts[l] = static_cast<double>(counts[l]);
        return spec;
    }

    // Every pattern of weight w has C(w,l) C(N-w,l) neighbours at distance
    // 2l; remove the neighbours that fall outside the codebook.
    std::vector<long long> removed(spec.pair_counts.size(), 0);
    std::vector<int> idx(static_cast<std::size_t>(w));
    for (int i = 0; i < w; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    for (std::size_t rank = 0;; ++rank) {
        if (rank >= pats.size()) {
            Pattern x = 0;
            for (int s : idx)
                x |= Pattern{1} << s;
            for (Pattern b : pats)
                ++removed[static_cast<std::size_t>(std::popcount(x ^ b) / 2)];
        }
        int i = w - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == N - w + i)
            --i;
        if (i < 0)
            break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < w; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    for (int l = 1; l <= lmax; ++l)
        spec.pair_counts[static_cast<std::size_t>(l)] =
            S * binomial_d(w, l) * binomial_d(N - w, l) - static_cast<double>(removed[static_cast<std::size_t>(l)]);
    return spec;
}

std::shared_ptr<const DistanceSpectrum> cached_distance_spectrum(int N, int w)
{
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const DistanceSpectrum>> cache;
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find({N, w}); it != cache.end())
            return it->second;
    }
    auto spec = std::make_shared<const DistanceSpectrum>(distance_spectrum(MppmCodebook(N, w)));
    std::lock_guard lock(mu);
    return cache.emplace(std::make_pair(N, w), spec).first->second;
}

ProbabilityEstimate mppm_ser_ub(const DistanceSpectrum& spectrum, double snr)
{
    if (!(snr > 0.0))
        throw DomainError("mppm_ser_ub: signal-to-noise ratio must be positive");
    CompensatedSum sum;
    for (std::size_t l = 1; l < spectrum.pair_counts.size(); ++l)
        sum.add(spectrum.pair_counts[l] * std::erfc(std::sqrt(snr * 2.0 * static_cast<double>(l) / 8.0)));
    ProbabilityEstimate out;
    out.value = sum.value() / std::ldexp(1.0, spectrum.p2 + 1);
    out.exceeds_one = out.value > 1.0;
    out.below_floor = out.value < kReportingFloor;
    return out;
}

ProbabilityEstimate mppm_ser_ub(const MppmCodebook& cb, double snr)
{
    return mppm_ser_ub(distance_spectrum(cb), snr);
}

std::string_view to_string(MppmBackend b)
{
    switch (b) {
    case MppmBackend::Bessel: return "bessel";
    case MppmBackend::UnionBound: return "ub";
    case MppmBackend::Exact: return "exact";
    }
    return "?";
}

MppmBackend backend_from_string(std::string_view name)
{
    if (name == "bessel")
        return MppmBackend::Bessel;
    if (name == "ub")
        return MppmBackend::UnionBound;
    if (name == "exact")
        return MppmBackend::Exact;
    throw ConfigError("unknown backend '" + std::string(name) + "' (expected bessel, ub or exact)");
}

ProbabilityEstimate mppm_ser(int N, int w, double snr, MppmBackend backend)
{
    switch (backend) {
    case MppmBackend::Bessel: return mppm_ser_bessel(N, w, snr);
    case MppmBackend::Exact: return mppm_ser_exact(N, w, snr);
    case MppmBackend::UnionBound: return mppm_ser_ub(*cached_distance_spectrum(N, w), snr);
    }
    throw ConfigError("unknown backend");
}

// ---- inner modulations ----

double fsk_ser(int M_F, double es_over_n0)
{
    if (M_F < 2)
        throw ConfigError("fsk_ser: M_F must be at least 2");
    if (!(es_over_n0 >= 0.0))
        throw DomainError("fsk_ser: Es/N0 must be nonnegative");
    CompensatedSum sum;
    for (int l = 1; l <= M_F - 1; ++l) {
        const double sign = (l & 1) ? 1.0 : -1.0;
        sum.add(sign / (l + 1.0) * binomial_d(M_F - 1, l) * std::exp(-l / (l + 1.0) * es_over_n0));
    }
    return clamp01(sum.value());
}

double qam_ser(int M_Q, double es_over_n0)
{
    const int n = ilog2(M_Q);
    if (n < 2)
        throw ConfigError("qam_ser: M_Q must be at least 4");
    if (!(es_over_n0 >= 0.0))
        throw DomainError("qam_ser: Es/N0 must be nonnegative");
    const double M = M_Q;
    double pe;
    if (n % 2 == 0)
        pe = 2.0 * (1.0 - 1.0 / std::sqrt(M)) * std::erfc(std::sqrt(3.0 / (2.0 * (M - 1.0)) * es_over_n0));
    else if (n == 3)
        pe = 1.25 * std::erfc(std::sqrt(es_over_n0 / 6.0));
    else
        pe = 2.0 * (1.0 - 1.0 / std::sqrt(2.0 * M)) *
             std::erfc(std::sqrt(3.0 / (2.0 * (31.0 * M / 32.0 - 1.0)) * es_over_n0));
    return clamp01(pe);
}

// ---- compound ----

double inner_ser(const SchemeParams& p, const LinkState& l)
{
    const auto q = link_quantities(p, l);
    if (p.scheme == Scheme::ITFH)
        return fsk_ser(p.M_F, q.es_over_n0_inner);
    if (p.scheme == Scheme::QAM_MPPM)
        return qam_ser(p.M_Q, q.es_over_n0_inner);
    throw ConfigError("inner_ser: scheme has no inner modulation");
}

double inner_ber_from_ser(const SchemeParams& p, double pe_mod)
{
    const int n = inner_bits(p);
    if (p.scheme == Scheme::ITFH)
        return std::ldexp(1.0, n - 1) / (std::ldexp(1.0, n) - 1.0) * pe_mod;
    if (p.scheme == Scheme::QAM_MPPM)
        return pe_mod / n;
    throw ConfigError("inner_ber_from_ser: scheme has no inner modulation");
}

double mppm_bit_from_symbol(int p2, double pe)
{
    if (p2 < 1)
        throw ConfigError("mppm_bit_from_symbol: p2 must be positive");
    return std::ldexp(1.0, p2 - 1) / (std::ldexp(1.0, p2) - 1.0) * pe;
}

double compound_ser_from(int w, double pe_mppm, double pe_mod)
{
    // log1p form keeps tiny probabilities from cancelling to zero
    if (pe_mppm >= 1.0 || pe_mod >= 1.0)
        return 1.0;
    return clamp01(-std::expm1(std::log1p(-pe_mppm) + w * std::log1p(-pe_mod)));
}

namespace {

// sum_l C(w,l) C(N-w,l) f(l) in exact integers, f(l) = l or w - l.
unsigned __int128 overlap_sum(int N, int w, bool swapped)
{
    unsigned __int128 s = 0;
    for (int l = 1; l <= std::min(w, N - w); ++l) {
        const unsigned __int128 c = binomial(w, l) * binomial(N - w, l);
        s += c * static_cast<unsigned>(swapped ? l : w - l);
    }
    return s;
}

} // namespace

double pattern_overlap_ratio(int N, int w)
{
    const auto denom = binomial(N, w) - 1;
    if (denom == 0)
        throw ConfigError("pattern_overlap_ratio: single-pattern set");
    return static_cast<double>(overlap_sum(N, w, false)) / static_cast<double>(denom);
}

double pattern_swap_ratio(int N, int w)
{
    const auto denom = binomial(N, w) - 1;
    if (denom == 0)
        throw ConfigError("pattern_swap_ratio: single-pattern set");
    return static_cast<double>(overlap_sum(N, w, true)) / (2.0 * static_cast<double>(denom));
}

double compound_ber_from(const SchemeParams& p, double pe_mppm, double pe_mod)
{
    if (!is_compound(p.scheme))
        throw ConfigError("compound_ber: scheme must be itfh or qam-mppm");
    const BitSplit split = bits_per_symbol(p);
    const double total = split.total();
    const double n_mod = inner_bits(p);
    const double pb_mppm = mppm_bit_from_symbol(split.p2, pe_mppm);
    const double pb_mod = inner_ber_from_ser(p, pe_mod);
    const double pb = split.p2 / total * pb_mppm + split.p1 / total * (1.0 - pe_mppm) * pb_mod +
                      n_mod / total * pe_mppm * pb_mod * pattern_overlap_ratio(p.N, p.w) +
                      n_mod / total * pe_mppm * pattern_swap_ratio(p.N, p.w);
    return clamp01(pb);
}

namespace {

double compound_pe_mppm(const SchemeParams& p, const LinkState& l, MppmBackend backend)
{
    if (!is_compound(p.scheme))
        throw ConfigError("compound error rates need an itfh or qam-mppm scheme");
    validate(p);
    return clamp01(mppm_ser(p.N, p.w, snr_of(l), backend).value);
}

} // namespace

double compound_ser(const SchemeParams& p, const LinkState& l, MppmBackend backend)
{
    const double pe_mppm = compound_pe_mppm(p, l, backend);
    return compound_ser_from(p.w, pe_mppm, inner_ser(p, l));
}

double compound_ber(const SchemeParams& p, const LinkState& l, MppmBackend backend)
{
    const double pe_mppm = compound_pe_mppm(p, l, backend);
    return compound_ber_from(p, pe_mppm, inner_ser(p, l));
}

// ---- SPPM ----

SppmError sppm_error(const SchemeParams& p, const LinkState& l)
{
    if (p.scheme != Scheme::SPPM)
        throw ConfigError("sppm_error: scheme must be sppm");
    validate(p);
    const auto sig = sppm_signature(p.M_S, p.L_m);
    const auto& C = sig.amplitudes;
    const int M = p.M_S;
    const double omega = l.omega();
    const double s2 = l.sigma_sq();
    const BitSplit split = bits_per_symbol(p);

    SppmError out;
    out.P_e_ppm.resize(static_cast<std::size_t>(M));
    out.P_e_ossk.resize(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i) {
        const double ci = C[static_cast<std::size_t>(i)];
        // Both are union bounds; cap at one so the products stay probabilities.
        out.P_e_ppm[static_cast<std::size_t>(i)] =
            std::min(1.0, (p.N - 1) / 2.0 * std::erfc(std::sqrt(omega * ci * ci / (4.0 * s2))));
        double ossk = 0.0;
        for (int j = 0; j < M; ++j) {
            if (j == i)
                continue;
            const double d = ci - C[static_cast<std::size_t>(j)];
            ossk += std::erfc(std::sqrt(omega * d * d / (8.0 * s2)));
        }
        out.P_e_ossk[static_cast<std::size_t>(i)] = std::min(1.0, ossk / 2.0);
    }

    double correct = 0.0, pe_ppm = 0.0, ossk_bits = 0.0;
    const double ossk_bit_factor = std::ldexp(1.0, split.p1 - 1) / (std::ldexp(1.0, split.p1) - 1.0);
    for (int i = 0; i < M; ++i) {
        const double ppm = out.P_e_ppm[static_cast<std::size_t>(i)];
        const double ossk = out.P_e_ossk[static_cast<std::size_t>(i)];
        correct += (1.0 - ppm) * (1.0 - ossk);
        pe_ppm += ppm;
        ossk_bits += (1.0 - ppm) * ossk_bit_factor * ossk;
    }
    correct /= M;
    pe_ppm /= M;
    ossk_bits /= M;

    const double total = split.total();
    out.P_e_sppm = clamp01(1.0 - correct);
    out.P_b_sppm = clamp01(split.p2 / total * mppm_bit_from_symbol(split.p2, pe_ppm) +
                           split.p1 / total * ossk_bits + split.p1 / total * pe_ppm / 2.0);
    return out;
}

ProbabilityEstimate mppm_scheme_ser(const SchemeParams& p, const LinkState& l, MppmBackend backend)
{
    if (p.scheme != Scheme::MPPM && p.scheme != Scheme::PPM)
        throw ConfigError("mppm_scheme_ser: scheme must be mppm or ppm");
    validate(p);
    return mppm_ser(p.N, p.w, snr_of(l), backend);
}

} // namespace itfh
