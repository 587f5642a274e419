#include "itfh/config.hpp"

#include "itfh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace itfh {

namespace {

int floor_log2_u128(unsigned __int128 v)
{
    int r = -1;
    while (v) {
        v >>= 1;
        ++r;
    }
    return r;
}

unsigned gray_to_binary(unsigned g)
{
    unsigned b = g;
    for (unsigned s = g >> 1; s; s >>= 1)
        b ^= s;
    return b;
}

void require(bool cond, const char* what)
{
    if (!cond)
        throw ConfigError(what);
}

} // namespace

std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::ITFH: return "itfh";
    case Scheme::QAM_MPPM: return "qam-mppm";
    case Scheme::SPPM: return "sppm";
    case Scheme::MPPM: return "mppm";
    case Scheme::PPM: return "ppm";
    }
    return "?";
}

Scheme scheme_from_string(std::string_view name)
{
    std::string n(name);
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == "itfh" || n == "i-tfh")
        return Scheme::ITFH;
    if (n == "qam-mppm" || n == "qam_mppm" || n == "qammppm")
        return Scheme::QAM_MPPM;
    if (n == "sppm")
        return Scheme::SPPM;
    if (n == "mppm")
        return Scheme::MPPM;
    if (n == "ppm")
        return Scheme::PPM;
    throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

SchemeParams SchemeParams::itfh(int N, int w, int M_F, double m)
{
    SchemeParams p;
    p.scheme = Scheme::ITFH;
    p.N = N;
    p.w = w;
    p.M_F = M_F;
    p.m = m;
    validate(p);
    return p;
}

SchemeParams SchemeParams::qam_mppm(int N, int w, int M_Q, double m)
{
    SchemeParams p;
    p.scheme = Scheme::QAM_MPPM;
    p.N = N;
    p.w = w;
    p.M_Q = M_Q;
    p.m = m;
    validate(p);
    return p;
}

SchemeParams SchemeParams::sppm(int N, int M_S, double L_m)
{
    SchemeParams p;
    p.scheme = Scheme::SPPM;
    p.N = N;
    p.w = 1;
    p.M_S = M_S;
    p.L_m = L_m;
    validate(p);
    return p;
}

SchemeParams SchemeParams::mppm(int N, int w)
{
    SchemeParams p;
    p.scheme = Scheme::MPPM;
    p.N = N;
    p.w = w;
    validate(p);
    return p;
}

SchemeParams SchemeParams::ppm(int N)
{
    SchemeParams p;
    p.scheme = Scheme::PPM;
    p.N = N;
    p.w = 1;
    validate(p);
    return p;
}

void validate(const SchemeParams& p)
{
    require(p.N >= 2, "N must be at least 2");
    require(p.N <= kMaxSlots, "N must not exceed 64");
    switch (p.scheme) {
    case Scheme::SPPM:
        require(p.w == 1, "SPPM uses w = 1");
        require(is_pow2(p.N), "SPPM needs N a power of two");
        require(p.M_S >= 2 && is_pow2(p.M_S), "M_S must be a power of two >= 2");
        require(p.L_m > 0.0 && p.L_m < 1.0, "L_m must satisfy 0 < L_m < 1");
        break;
    case Scheme::PPM:
        require(p.w == 1, "PPM uses w = 1");
        require(is_pow2(p.N), "PPM needs N a power of two");
        break;
    case Scheme::ITFH:
        require(p.w >= 1 && p.w <= p.N, "w must satisfy 1 <= w <= N");
        require(p.M_F >= 2 && is_pow2(p.M_F), "M_F must be a power of two >= 2");
        require(p.m > 0.0 && p.m <= 1.0, "m must satisfy 0 < m <= 1");
        break;
    case Scheme::QAM_MPPM:
        require(p.w >= 1 && p.w <= p.N, "w must satisfy 1 <= w <= N");
        require(p.M_Q >= 4 && p.M_Q <= 256 && is_pow2(p.M_Q), "M_Q must be a power of two in [4, 256]");
        require(p.m > 0.0 && p.m <= 1.0, "m must satisfy 0 < m <= 1");
        break;
    case Scheme::MPPM:
        require(p.w >= 1 && p.w <= p.N, "w must satisfy 1 <= w <= N");
        break;
    }
    require(bits_per_symbol(p).total() <= 64, "more than 64 bits per symbol");
}

BitSplit bits_per_symbol(const SchemeParams& p)
{
    const auto pattern_bits = [&] { return floor_log2_u128(binomial(p.N, p.w)); };
    switch (p.scheme) {
    case Scheme::ITFH: return {p.w * ilog2(p.M_F), pattern_bits()};
    case Scheme::QAM_MPPM: return {p.w * ilog2(p.M_Q), pattern_bits()};
    case Scheme::SPPM:
        require(is_pow2(p.N), "SPPM needs N a power of two");
        return {ilog2(p.M_S), ilog2(p.N)};
    case Scheme::MPPM: return {0, pattern_bits()};
    case Scheme::PPM:
        require(is_pow2(p.N), "PPM needs N a power of two");
        return {0, ilog2(p.N)};
    }
    return {};
}

int inner_bits(const SchemeParams& p)
{
    switch (p.scheme) {
    case Scheme::ITFH: return ilog2(p.M_F);
    case Scheme::QAM_MPPM: return ilog2(p.M_Q);
    case Scheme::SPPM: return ilog2(p.M_S);
    default: return 0;
    }
}

int inner_alphabet(const SchemeParams& p)
{
    return 1 << inner_bits(p);
}

LinkState LinkState::make(double I_ph, double T_s, double N0)
{
    if (!(I_ph > 0.0) || !(T_s > 0.0) || !(N0 > 0.0))
        throw DomainError("LinkState: I_ph, T_s and N0 must be positive");
    return LinkState{I_ph, T_s, N0, std::sqrt(0.5 * N0)};
}

LinkState LinkState::noiseless(double I_ph, double T_s)
{
    if (!(I_ph > 0.0) || !(T_s > 0.0))
        throw DomainError("LinkState: I_ph and T_s must be positive");
    return LinkState{I_ph, T_s, 0.0, 0.0};
}

LinkQuantities link_quantities(const SchemeParams& p, const LinkState& l)
{
    const double omega = l.omega();
    const double s2 = l.sigma_sq();
    const double m2 = p.m * p.m;
    LinkQuantities q;
    switch (p.scheme) {
    case Scheme::ITFH:
        q.E_s = p.w * omega * (1.0 + m2 / 2.0);
        q.d_min_sq = omega * m2;
        q.es_over_n0_inner = omega * m2 / (4.0 * s2);
        break;
    case Scheme::QAM_MPPM:
        q.E_s = p.w * omega * (1.0 + m2 / 2.0);
        q.d_min_sq = omega * m2 / 2.0 * qam_min_distance_sq_formula(ilog2(p.M_Q));
        q.es_over_n0_inner = omega * m2 / (4.0 * s2);
        break;
    case Scheme::SPPM: {
        const auto sig = sppm_signature(p.M_S, p.L_m);
        const double step = p.L_m / (p.M_S - 1);
        q.E_s = omega * sig.sum_sq() / p.M_S;
        q.d_min_sq = omega * step * step;
        q.es_over_n0_inner = omega * sig.sum_sq() / (2.0 * p.M_S * s2);
        break;
    }
    case Scheme::MPPM:
    case Scheme::PPM:
        q.E_s = p.w * omega;
        q.d_min_sq = 2.0 * omega;
        break;
    }
    q.es_over_n0_total = q.E_s / (2.0 * s2);
    return q;
}

double QamConstellation::average_energy() const
{
    double e = 0.0;
    for (auto z : points)
        e += std::norm(z);
    return e / static_cast<double>(points.size());
}

double QamConstellation::min_distance_sq() const
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            best = std::min(best, std::norm(points[i] - points[j]));
    return best;
}

std::size_t QamConstellation::nearest(std::complex<double> z) const
{
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = std::norm(z - points[i]);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

QamConstellation build_qam_constellation(int n_Q)
{
    if (n_Q < 2 || n_Q > 8)
        throw ConfigError("QAM bits per symbol must be in [2, 8]");
    QamConstellation c;
    c.bits = n_Q;
    const unsigned M = 1u << n_Q;
    c.points.resize(M);

    // Q gets the low bits of the label, I the high bits.
    const int ky = n_Q / 2;
    const int kx = n_Q - ky;
    const int W = 1 << kx; // columns
    const int H = 1 << ky; // rows
    const bool cross = (n_Q % 2 == 1) && n_Q >= 5;
    const int s = W / 8; // width of each folded column block / corner

    for (unsigned label = 0; label < M; ++label) {
        const int x = static_cast<int>(gray_to_binary(label >> ky));
        const int y = static_cast<int>(gray_to_binary(label & static_cast<unsigned>(H - 1)));
        int X = x, Y = y;
        if (cross && (x < s || x >= W - s)) {
            // Fold the outer columns of the W x H rectangle into the bands
            // above and below it, giving the (3W/4)^2 square minus corners.
            const bool left = x < s;
            const int a = left ? x : W - 1 - x;
            const bool top = y >= H / 2;
            const int b = top ? y - H / 2 : H / 2 - 1 - y;
            const int cx = 2 * s + b;
            X = left ? cx : W - 1 - cx;
            Y = top ? H + a : -1 - a;
        }
        c.points[label] = {2.0 * X - (W - 1), 2.0 * Y - (H - 1)};
    }

    const double scale = 1.0 / std::sqrt(c.average_energy());
    for (auto& z : c.points)
        z *= scale;
    return c;
}

double qam_min_distance_sq_formula(int n_Q)
{
    if (n_Q < 2 || n_Q > 8)
        throw ConfigError("QAM bits per symbol must be in [2, 8]");
    const double M = std::ldexp(1.0, n_Q);
    if (n_Q % 2 == 0)
        return 3.0 / (2.0 * (M - 1.0));
    if (n_Q == 3)
        return 2.0 / 3.0;
    return 3.0 / (2.0 * (31.0 / 32.0 * M - 1.0));
}

double SppmSignature::sum() const
{
    double s = 0.0;
    for (double c : amplitudes)
        s += c;
    return s;
}

double SppmSignature::sum_sq() const
{
    double s = 0.0;
    for (double c : amplitudes)
        s += c * c;
    return s;
}

SppmSignature sppm_signature(int M_S, double L_m)
{
    require(M_S >= 2 && is_pow2(M_S), "M_S must be a power of two >= 2");
    require(L_m > 0.0 && L_m < 1.0, "L_m must satisfy 0 < L_m < 1");
    SppmSignature sig;
    sig.amplitudes.resize(static_cast<std::size_t>(M_S));
    for (int i = 0; i < M_S; ++i)
        sig.amplitudes[static_cast<std::size_t>(i)] = 1.0 - L_m * i / (M_S - 1);
    return sig;
}

unsigned __int128 binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    const auto limit = std::numeric_limits<unsigned __int128>::max();
    for (int i = 1; i <= k; ++i) {
        const unsigned __int128 f = static_cast<unsigned __int128>(n - k + i);
        if (r > limit / f)
            throw NumericalError("binomial coefficient overflows 128 bits");
        r = r * f / static_cast<unsigned __int128>(i); // exact: r*f is C(n-k+i, i) * i
    }
    return r;
}

double binomial_d(int n, int k)
{
    return static_cast<double>(binomial(n, k));
}

int floor_log2_binomial(int n, int k)
{
    if (k < 0 || n < 0 || k > n)
        throw DomainError("floor_log2_binomial: need 0 <= k <= n");
    k = std::min(k, n - k);
    // Little-endian base 2^32 limbs; r = r * (n - k + i) / i stays integral.
    std::vector<std::uint32_t> r{1};
    for (int i = 1; i <= k; ++i) {
        std::uint64_t carry = 0;
        for (auto& limb : r) {
            const std::uint64_t v = std::uint64_t{limb} * static_cast<std::uint64_t>(n - k + i) + carry;
            limb = static_cast<std::uint32_t>(v);
            carry = v >> 32;
        }
        if (carry)
            r.push_back(static_cast<std::uint32_t>(carry));
        std::uint64_t rem = 0;
        for (auto it = r.rbegin(); it != r.rend(); ++it) {
            const std::uint64_t v = (rem << 32) | *it;
            *it = static_cast<std::uint32_t>(v / static_cast<std::uint64_t>(i));
            rem = v % static_cast<std::uint64_t>(i);
        }
        while (r.size() > 1 && r.back() == 0)
            r.pop_back();
    }
    return static_cast<int>(32 * (r.size() - 1)) + std::bit_width(r.back()) - 1;
}

bool is_pow2(long long v)
{
    return v > 0 && (v & (v - 1)) == 0;
}

int ilog2(long long v)
{
    if (!is_pow2(v))
        throw ConfigError("value is not a power of two");
    return std::countr_zero(static_cast<unsigned long long>(v));
}

} // namespace itfh
