// numerics.hpp - special functions and quadrature for square-law statistics
//
// The square-law detector output X = |r|^2 of a real Gaussian sample is a
// scaled chi-square variable with one degree of freedom: central in empty
// slots, noncentral (noncentrality omega) in signal slots. Everything here is
// pure and thread-safe.

#pragma once

#include <functional>

namespace itfh::numerics {

// Parameters of a scaled one-degree-of-freedom chi-square variable
// X = (G + sqrt(omega))^2 with G ~ Normal(0, sigma_sq).
struct Chisq1Params {
    double sigma_sq = 1.0; // noise variance per dimension, N0/2
    double omega = 0.0;    // noncentrality, T_s * I_ph^2 for a signal slot
};

// Modified Bessel function of the first kind, order -1/2:
// I_{-1/2}(z) = sqrt(2/(pi z)) cosh(z). Finite for z <= 700.
double bessel_i_neg_half(double z);

// log I_{-1/2}(z), usable for any z > 0.
double log_bessel_i_neg_half(double z);

// Half-order Marcum Q-function, via the reduction
// Q_{1/2}(a, b) = (erfc((b - a)/sqrt2) + erfc((b + a)/sqrt2)) / 2.
double marcum_q_half(double a, double b);

double chisq1_pdf(double x, const Chisq1Params& p);
double chisq1_cdf(double x, const Chisq1Params& p);

// Signal-slot CDF built on the large-argument Bessel asymptote:
// 1 - erfc(sqrt(omega/2s))/2 - erfc((sqrt(x) - sqrt(omega))/sqrt(2s))/2.
// Note the first erfc is constant in x, so the limit at x -> inf is below 1.
double chisq1_cdf_approx(double x, const Chisq1Params& p);

// log(erfc(u)); asymptotic expansion beyond u = 25 where erfc underflows.
double log_erfc(double u);

// erfc(u)^k evaluated in the log domain. erfc_pow(u, 0) == 1.
double erfc_pow(double u, unsigned k);

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    unsigned max_depth = 60;
    unsigned max_subdivisions = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    unsigned evaluations = 0;
    bool converged = false;
};

// Globally adaptive Gauss-Kronrod (7/15) on [lo, hi]. The rule is open, so
// integrable endpoint singularities are tolerated. Semi-infinite integrals
// are handled by passing a finite truncation point as hi.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    const QuadratureOptions& opts = {});

} // namespace itfh::numerics
