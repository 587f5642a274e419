#include "itfh/analysis.hpp"
#include "itfh/channel.hpp"
#include "itfh/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

using namespace itfh;

namespace {

double gk(const auto& f, double a, double b)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 40, 1e-14);
}

LinkState fig6_link(const SchemeParams& p, double dbm)
{
    return link_state_from_optical_power(dbm_to_watts(dbm), p, NoiseEnvironment{}, slot_duration_for_rate(p, 27.5e6));
}

} // namespace

TEST_CASE("efficiency rows")
{
    const auto qam = efficiency(SchemeParams::qam_mppm(8, 4, 16, 0.9));
    CHECK(qam.rho == doctest::Approx(1.375));
    const auto itfh = efficiency(SchemeParams::itfh(8, 4, 16, 0.9));
    CHECK(itfh.rho == doctest::Approx(22.0 / (17 * 8)));
    CHECK(itfh.inv_eta_db == doctest::Approx(-10 * std::log10(itfh.eta)));

    // Bandwidth at 27.5 Mbps is R_b / rho.
    CHECK(27.5e6 / qam.rho == doctest::Approx(20e6));
    CHECK(27.5e6 / itfh.rho == doctest::Approx(170e6));
    const auto p = SchemeParams::itfh(8, 4, 16, 0.9);
    CHECK(occupied_bandwidth(p, slot_duration_for_rate(p, 27.5e6)) == doctest::Approx(170e6));

    const double r = efficiency(SchemeParams::itfh(8, 2, 8, 0.7)).eta / efficiency(SchemeParams::qam_mppm(8, 2, 8, 0.9)).eta;
    CHECK(r == doctest::Approx(2.05).epsilon(0.01));

    // Closed forms written out.
    CHECK(efficiency(SchemeParams::mppm(8, 4)).eta == doctest::Approx(6.0 / 8));
    CHECK(efficiency(SchemeParams::mppm(8, 4)).rho == doctest::Approx(6.0 / 16));
    CHECK(efficiency(SchemeParams::ppm(16)).eta == doctest::Approx(2.0));
    CHECK(efficiency(SchemeParams::ppm(16)).rho == doctest::Approx(4.0 / 32));
    const auto s = efficiency(SchemeParams::sppm(8, 4, 0.7));
    const double sum_sq = 1 + std::pow(1 - 0.7 / 3, 2) + std::pow(1 - 1.4 / 3, 2) + 0.09;
    CHECK(s.eta == doctest::Approx(5 * 4 * 0.49 / (4 * 9 * sum_sq)));
    CHECK(s.rho == doctest::Approx(5.0 / 16));
    CHECK(fsk_efficiency(16, 0.9).rho == doctest::Approx(4.0 / 17));
    CHECK(qam_efficiency(8, 0.9).eta ==
          doctest::Approx(0.81 * 3 / (8 * 1.405) * build_qam_constellation(3).min_distance_sq()));
    CHECK(ossk_efficiency(2, 0.7).eta == doctest::Approx(2 * 0.49 / (4 * (1 + 0.09))));

    // The unrestricted row agrees with the validated one.
    CHECK(efficiency_row(Scheme::ITFH, 8, 4, 16, 0.9, 0.5).eta == doctest::Approx(itfh.eta));
    CHECK(efficiency_row(Scheme::MPPM, 512, 256, 0, 0.9, 0.7).rho > 0.0);
}

TEST_CASE("exact MPPM error against independent oracles")
{
    SUBCASE("N = 2, w = 1 by direct integration of the chi-square laws")
    {
        for (double snr : {0.5, 4.0, 25.0}) {
            boost::math::non_central_chi_squared_distribution<double> sig(1.0, snr);
            boost::math::chi_squared_distribution<double> empty(1.0);
            // Substitute x = t^2 to remove the origin singularity.
            auto f = [&](double t) { return 2.0 * t * boost::math::pdf(sig, t * t) * boost::math::cdf(empty, t * t); };
            const double oracle = 1.0 - gk(f, 1e-300, std::sqrt(snr) + 40.0);
            CHECK(mppm_ser_exact(2, 1, snr).value == doctest::Approx(oracle).epsilon(1e-8));
        }
    }
    SUBCASE("sampling oracle")
    {
        const int N = 6, w = 2;
        const double snr = 9.0;
        std::mt19937_64 rng(41);
        std::normal_distribution<double> n;
        const int trials = 400000;
        int errors = 0;
        for (int t = 0; t < trials; ++t) {
            // Slots 0..w-1 carry the pulse; error unless they are the top w.
            double min_sig = INFINITY, max_empty = -INFINITY;
            for (int k = 0; k < N; ++k) {
                const double r = (k < w ? std::sqrt(snr) : 0.0) + n(rng);
                if (k < w)
                    min_sig = std::min(min_sig, r * r);
                else
                    max_empty = std::max(max_empty, r * r);
            }
            errors += max_empty > min_sig;
        }
        const double est = static_cast<double>(errors) / trials;
        const double pe = mppm_ser_exact(N, w, snr).value;
        CHECK(std::abs(est - pe) < 4.0 * std::sqrt(pe * (1 - pe) / trials));
    }
    SUBCASE("vanishing signal gives a uniform guess")
    {
        for (auto [N, w] : {std::pair{8, 4}, std::pair{12, 5}, std::pair{4, 1}})
            CHECK(mppm_ser_exact(N, w, 1e-8).value == doctest::Approx(1.0 - 1.0 / binomial_d(N, w)).epsilon(1e-3));
    }
    CHECK_THROWS_AS(mppm_ser_exact(8, 4, 0.0), DomainError);
    CHECK_THROWS_AS(mppm_ser_exact(8, 8, 1.0), ConfigError);
}

TEST_CASE("Bessel approximation")
{
    CHECK(std::abs(mppm_ser_bessel(2, 1, 25.0).value - mppm_ser_exact(2, 1, 25.0).value) < 1e-6);
    for (int N : {4, 8, 16})
        CHECK(std::abs(mppm_ser_bessel(N, 1, 30.0).value - mppm_ser_exact(N, 1, 30.0).value) < 1e-6);

    // Tracks the exact value once the reflected Gaussian mass is negligible.
    double worst = 0.0;
    for (double snr = 13.0; snr <= 100.0; snr += 1.0)
        worst = std::max(worst, std::abs(mppm_ser_bessel(12, 5, snr).value - mppm_ser_exact(12, 5, snr).value));
    CHECK(worst < 1e-3);

    // Values never leave [0, 1] and decrease with SNR.
    double prev = 1.0;
    for (double snr = 0.5; snr <= 60.0; snr *= 1.3) {
        const auto b = mppm_ser_bessel(8, 4, snr);
        CHECK(b.value >= 0.0);
        CHECK(b.value <= 1.0);
        if (!b.below_floor) {
            CHECK(b.value <= prev + 1e-12);
            prev = b.value;
        }
    }
    // Deep in the tail the cancellation error dominates and is flagged.
    CHECK(mppm_ser_bessel(12, 5, 200.0).below_floor);
    CHECK_FALSE(mppm_ser_bessel(12, 5, 20.0).below_floor);
}

TEST_CASE("union bound")
{
    for (double snr : {1.0, 10.0, 40.0})
        CHECK(mppm_ser_ub(build_codebook(2, 1), snr).value ==
              doctest::Approx(0.5 * std::erfc(std::sqrt(snr * 2.0 / 8.0))).epsilon(1e-14));

    // Distance spectrum against brute force over ordered pairs.
    for (auto [N, w] : {std::pair{8, 4}, std::pair{12, 5}, std::pair{10, 3}, std::pair{9, 2}, std::pair{32, 4}}) {
        CAPTURE(N);
        CAPTURE(w);
        const auto cb = build_codebook(N, w);
        std::vector<double> brute(static_cast<std::size_t>(std::min(w, N - w) + 1), 0.0);
        const auto& pats = cb.patterns();
        for (std::size_t i = 0; i < pats.size(); ++i)
            for (std::size_t j = 0; j < pats.size(); ++j)
                if (i != j)
                    brute[static_cast<std::size_t>(std::popcount(pats[i] ^ pats[j]) / 2)] += 1.0;
        const auto spec = distance_spectrum(cb);
        CHECK(spec.pair_counts == brute);
        CHECK(spec.p2 == cb.p2());
    }

    const auto low = mppm_ser_ub(build_codebook(12, 5), 1.0);
    CHECK(low.exceeds_one);
    CHECK(low.value > 1.0);
    const auto high = mppm_ser_ub(build_codebook(12, 5), 40.0);
    CHECK_FALSE(high.exceeds_one);
    CHECK(mppm_ser(12, 5, 40.0, MppmBackend::UnionBound).value == doctest::Approx(high.value));
}

TEST_CASE("backend names")
{
    for (auto b : {MppmBackend::Bessel, MppmBackend::UnionBound, MppmBackend::Exact})
        CHECK(backend_from_string(to_string(b)) == b);
    CHECK_THROWS_AS(backend_from_string("simpson"), ConfigError);
}

TEST_CASE("noncoherent FSK symbol error")
{
    for (double g : {0.0, 0.7, 3.0, 12.0})
        CHECK(fsk_ser(2, g) == doctest::Approx(0.5 * std::exp(-g / 2)).epsilon(1e-14));
    CHECK(fsk_ser(32, 0.0) == doctest::Approx(31.0 / 32).epsilon(1e-12));

    // Integral form of the Rician / Rayleigh competition.
    for (int M : {4, 16, 32})
        for (double g : {0.5, 5.0, 20.0}) {
            const double a = std::sqrt(2.0 * g);
            auto f = [&](double x) {
                return x * std::exp(-0.5 * (x * x + a * a)) * std::cyl_bessel_i(0.0, a * x) *
                       std::pow(-std::expm1(-0.5 * x * x), M - 1);
            };
            const double pe = 1.0 - gk(f, 0.0, a + 40.0);
            CAPTURE(M);
            CAPTURE(g);
            CHECK(std::abs(fsk_ser(M, g) - pe) < 1e-10 + 1e-7 * pe);
        }
}

TEST_CASE("QAM symbol error branches")
{
    const double g = 20.0;
    CHECK(qam_ser(16, g) == doctest::Approx(2 * 0.75 * std::erfc(std::sqrt(3.0 / 30 * g))));
    CHECK(qam_ser(8, g) == doctest::Approx(1.25 * std::erfc(std::sqrt(g / 6))));
    CHECK(qam_ser(32, g) == doctest::Approx(2 * (1 - 1 / std::sqrt(64.0)) * std::erfc(std::sqrt(3.0 / 60 * g))));
    CHECK(qam_ser(4, 0.0) == 1.0); // capped
}

TEST_CASE("compound combination rules")
{
    CHECK(compound_ser_from(4, 0.01, 0.0) == doctest::Approx(0.01));
    CHECK(compound_ser_from(1, 0.1, 0.2) == doctest::Approx(1 - 0.9 * 0.8));
    CHECK(compound_ser_from(3, 0.0, 0.1) == doctest::Approx(1 - std::pow(0.9, 3)));

    const auto p = SchemeParams::itfh(8, 4, 16, 0.9);
    CHECK(compound_ber_from(p, 0.0, 0.0) == 0.0);

    // Single-pulse case: the two pattern sums collapse to 0 and 1/2.
    const auto p1 = SchemeParams::itfh(4, 1, 4, 0.9);
    CHECK(pattern_overlap_ratio(4, 1) == 0.0);
    CHECK(pattern_swap_ratio(4, 1) == doctest::Approx(0.5));
    for (double pe : {1e-3, 0.2})
        for (double pm : {1e-4, 0.05}) {
            // p1 = 2, p2 = 2, n_mod = 2
            const double pb_mppm = 2.0 / 3 * pe;
            const double pb_mod = 2.0 / 3 * pm;
            const double three_term = 0.5 * pb_mppm + 0.5 * (1 - pe) * pb_mod + 0.5 * pe * 0.5;
            CHECK(compound_ber_from(p1, pe, pm) == doctest::Approx(three_term).epsilon(1e-14));
        }

    // Exact small-case sums: N = 4, w = 2 has C = 6 and l = 1 (4 patterns), l = 2 (1 pattern).
    CHECK(pattern_overlap_ratio(4, 2) == doctest::Approx((4 * 1 + 1 * 0) / 5.0));
    CHECK(pattern_swap_ratio(4, 2) == doctest::Approx((4 * 1 + 1 * 2) / 10.0));

    // Sanity ceiling: every constituent probability at one.
    for (const auto& q : {SchemeParams::itfh(8, 4, 16, 0.9), SchemeParams::qam_mppm(8, 4, 16, 0.9),
                          SchemeParams::itfh(8, 2, 8, 0.5), SchemeParams::qam_mppm(8, 2, 8, 0.9),
                          SchemeParams::itfh(32, 4, 32, 0.5), SchemeParams::qam_mppm(32, 4, 4, 0.5),
                          SchemeParams::itfh(16, 4, 16, 0.9), SchemeParams::itfh(4, 2, 4, 0.9)})
        CHECK(compound_ber_from(q, 1.0, 1.0) <= 1.0);
}

TEST_CASE("compound predictions decrease with power")
{
    for (const auto& p : {SchemeParams::itfh(8, 4, 16, 0.9), SchemeParams::qam_mppm(8, 4, 16, 0.9)}) {
        double ps = 1.0, pb = 1.0;
        for (double dbm = -45.0; dbm <= -22.0; dbm += 0.5) {
            const auto l = fig6_link(p, dbm);
            const double s = compound_ser(p, l);
            const double b = compound_ber(p, l);
            CHECK(s <= ps);
            CHECK(b <= pb);
            CHECK(b <= s);
            ps = s;
            pb = b;
        }
    }
    CHECK_THROWS_AS(compound_ser(SchemeParams::mppm(8, 4), fig6_link(SchemeParams::mppm(8, 4), -30)), ConfigError);
}

TEST_CASE("SPPM error")
{
    const auto p = SchemeParams::sppm(8, 2, 0.7);
    const auto l = LinkState::make(1e-6, 1e-7, 1e-20);
    const auto e = sppm_error(p, l);
    const double s2 = l.sigma_sq(), om = l.omega();
    const double ossk = 0.5 * std::erfc(std::sqrt(om * 0.49 / (8 * s2)));
    CHECK(e.P_e_ossk[0] == doctest::Approx(ossk));
    CHECK(e.P_e_ossk[1] == doctest::Approx(ossk));
    const double ppm0 = 3.5 * std::erfc(std::sqrt(om / (4 * s2)));
    const double ppm1 = 3.5 * std::erfc(std::sqrt(om * 0.09 / (4 * s2)));
    CHECK(e.P_e_ppm[0] == doctest::Approx(ppm0));
    CHECK(e.P_e_ppm[1] == doctest::Approx(std::min(1.0, ppm1)));
    const double pe = 1 - 0.5 * ((1 - ppm0) * (1 - ossk) + (1 - std::min(1.0, ppm1)) * (1 - ossk));
    CHECK(e.P_e_sppm == doctest::Approx(pe));

    const auto quiet = sppm_error(SchemeParams::sppm(8, 4, 0.5), LinkState::make(1e-3, 1e-7, 1e-21));
    CHECK(quiet.P_e_sppm == 0.0);
    CHECK(quiet.P_b_sppm == 0.0);
    CHECK_THROWS_AS(sppm_error(SchemeParams::mppm(8, 4), l), ConfigError);
}
