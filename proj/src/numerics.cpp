#include "itfh/numerics.hpp"

#include "itfh/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace itfh::numerics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

void check_params(const Chisq1Params& p)
{
    if (!(p.sigma_sq > 0.0) || !std::isfinite(p.sigma_sq))
        throw DomainError("chisq1: sigma_sq must be positive");
    if (!(p.omega >= 0.0) || !std::isfinite(p.omega))
        throw DomainError("chisq1: omega must be nonnegative");
}

void check_x(double x)
{
    if (!(x >= 0.0))
        throw DomainError("chisq1: x must be nonnegative");
}

// Kronrod 15-point abscissae (descending, last is the centre) and weights;
// Gauss 7-point weights for the odd-indexed abscissae plus the centre.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    double abs_value; // integral of |f|, for the roundoff floor
    unsigned depth;
};

struct ByError {
    bool operator()(const Segment& l, const Segment& r) const { return l.error < r.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b, unsigned depth)
{
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    double abs_sum = std::abs(fc) * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(centre - dx);
        const double f2 = f(centre + dx);
        kronrod += kWgk[j] * (f1 + f2);
        abs_sum += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1)
            gauss += kWg[j / 2] * (f1 + f2);
    }
    Segment s{a, b, kronrod * half, std::abs((kronrod - gauss) * half), abs_sum * std::abs(half), depth};
    if (!std::isfinite(s.value) || !std::isfinite(s.error))
        s.error = std::numeric_limits<double>::infinity();
    return s;
}

} // namespace

double bessel_i_neg_half(double z)
{
    if (!(z > 0.0))
        throw DomainError("bessel_i_neg_half: z must be positive");
    if (z <= 700.0)
        return std::sqrt(2.0 / (kPi * z)) * std::cosh(z);
    return std::exp(log_bessel_i_neg_half(z));
}

double log_bessel_i_neg_half(double z)
{
    if (!(z > 0.0))
        throw DomainError("log_bessel_i_neg_half: z must be positive");
    // cosh(z) = e^z (1 + e^{-2z}) / 2
    return 0.5 * std::log(2.0 / (kPi * z)) + z + std::log1p(std::exp(-2.0 * z)) - std::numbers::ln2;
}

double marcum_q_half(double a, double b)
{
    if (!(a >= 0.0) || !(b >= 0.0))
        throw DomainError("marcum_q_half: arguments must be nonnegative");
    const double q = 0.5 * std::erfc((b - a) / kSqrt2) + 0.5 * std::erfc((b + a) / kSqrt2);
    return std::clamp(q, 0.0, 1.0);
}

double chisq1_pdf(double x, const Chisq1Params& p)
{
    check_params(p);
    check_x(x);
    if (x == 0.0)
        return std::numeric_limits<double>::infinity();
    const double s2 = p.sigma_sq;
    if (p.omega == 0.0)
        return std::exp(-x / (2.0 * s2)) / std::sqrt(2.0 * kPi * x * s2);

    // (1/2s)(omega/x)^{1/4} e^{-(x+omega)/2s} I_{-1/2}(sqrt(x omega)/s), with the
    // Bessel closed form folded into the exponentials so nothing overflows.
    const double rx = std::sqrt(x);
    const double ro = std::sqrt(p.omega);
    const double lo = std::exp(-(rx - ro) * (rx - ro) / (2.0 * s2));
    const double hi = std::exp(-(rx + ro) * (rx + ro) / (2.0 * s2));
    return (lo + hi) / (2.0 * std::sqrt(2.0 * kPi * s2 * x));
}

double chisq1_cdf(double x, const Chisq1Params& p)
{
    check_params(p);
    check_x(x);
    if (x == 0.0)
        return 0.0;
    if (p.omega == 0.0)
        return std::erf(std::sqrt(x / (2.0 * p.sigma_sq)));
    const double s = std::sqrt(p.sigma_sq);
    return std::clamp(1.0 - marcum_q_half(std::sqrt(p.omega) / s, std::sqrt(x) / s), 0.0, 1.0);
}

double chisq1_cdf_approx(double x, const Chisq1Params& p)
{
    check_params(p);
    check_x(x);
    if (p.omega == 0.0)
        throw DomainError("chisq1_cdf_approx: defined for signal slots only (omega > 0)");
    const double d = std::sqrt(2.0 * p.sigma_sq);
    const double v = 1.0 - 0.5 * std::erfc(std::sqrt(p.omega) / d) -
                     0.5 * std::erfc((std::sqrt(x) - std::sqrt(p.omega)) / d);
    return std::clamp(v, 0.0, 1.0);
}

double log_erfc(double u)
{
    if (u <= 25.0)
        return std::log(std::erfc(u));
    // erfc(u) ~ e^{-u^2}/(u sqrt(pi)) * (1 - 1/(2u^2) + 3/(4u^4) - 15/(8u^6) + 105/(16u^8))
    const double v = 1.0 / (2.0 * u * u);
    const double series = 1.0 - v * (1.0 - 3.0 * v * (1.0 - 5.0 * v * (1.0 - 7.0 * v)));
    return -u * u - std::log(u * std::sqrt(kPi)) + std::log(series);
}

double erfc_pow(double u, unsigned k)
{
    if (k == 0)
        return 1.0;
    if (k == 1 && u <= 25.0)
        return std::erfc(u);
    return std::exp(static_cast<double>(k) * log_erfc(u));
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& opts)
{
    if (!(opts.rel_tol > 0.0) && !(opts.abs_tol > 0.0))
        throw DomainError("integrate_adaptive: a positive tolerance is required");
    QuadratureResult out;
    if (lo == hi) {
        out.converged = true;
        return out;
    }
    const double sign = hi > lo ? 1.0 : -1.0;
    if (hi < lo)
        std::swap(lo, hi);

    std::priority_queue<Segment, std::vector<Segment>, ByError> heap;
    Segment first = gk15(f, lo, hi, 0);
    out.evaluations = 15;
    double value = first.value;
    double error = first.error;
    double abs_value = first.abs_value;
    heap.push(first);

    constexpr double eps = std::numeric_limits<double>::epsilon();
    unsigned splits = 0;
    for (;;) {
        const double target = std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
        // Below ~50 eps of the absolute integral, further splitting only chases roundoff.
        if (error <= target || error <= 50.0 * eps * abs_value) {
            out.converged = std::isfinite(value);
            break;
        }
        if (splits >= opts.max_subdivisions)
            break;
        Segment worst = heap.top();
        if (worst.depth >= opts.max_depth)
            break;
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Segment left = gk15(f, worst.a, mid, worst.depth + 1);
        Segment right = gk15(f, mid, worst.b, worst.depth + 1);
        out.evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        abs_value += left.abs_value + right.abs_value - worst.abs_value;
        heap.push(left);
        heap.push(right);
        ++splits;
    }

    // Re-sum from the segments to shed the drift of the running updates.
    double v = 0.0, e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    out.value = sign * v;
    out.abs_error = e;
    return out;
}

} // namespace itfh::numerics
