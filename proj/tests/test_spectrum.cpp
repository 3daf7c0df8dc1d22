#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sizespec/spectrum.hpp"

using namespace sizespec;

namespace {

const double inf = std::numeric_limits<double>::infinity();

template <class F>
double integrate(F f, double a = 0.0, double b = inf)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

SizeSpectrum spectrum_2025() { return {8.36, 5.76, GrowthCurve::logistic(0.0653, 0.112)}; }

}  // namespace

TEST_CASE("gamma density")
{
    const SizeSpectrum expo(1.0, 1.0, GrowthCurve::logistic(0.5, 1.0));
    CHECK(pdf_K(expo, 1e-12) == doctest::Approx(1.0));

    const auto s = spectrum_2025();
    const double mode = (s.alpha() - 1.0) * s.beta();
    CHECK(mode == doctest::Approx(42.39).epsilon(1e-4));
    CHECK(pdf_K(s, mode) > pdf_K(s, 30.0));
    CHECK(pdf_K(s, mode) > pdf_K(s, 60.0));
    CHECK(std::abs(integrate([&](double k) { return pdf_K(s, k); }) - 1.0) <= 1e-8);
    CHECK_THROWS_AS(pdf_K(s, 0.0), std::domain_error);
}

TEST_CASE("weight density normalization and moments")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(1.5, 20.0), b(1.0, 20.0), f0(0.02, 0.5), r(0.01, 0.1), t(0.0, 150.0);
    for (int n = 0; n < 20; ++n) {
        const SizeSpectrum s(a(rng), b(rng), GrowthCurve::logistic(f0(rng), r(rng)));
        const double day = t(rng);
        const double mass = integrate([&](double w) { return pdf_W(s, day, w); });
        const double mean = integrate([&](double w) { return w * pdf_W(s, day, w); });
        const double m = mean_weight(s, day);
        const double var = integrate([&](double w) { return (w - m) * (w - m) * pdf_W(s, day, w); });
        CHECK(std::abs(mass - 1.0) <= 1e-8);
        CHECK(std::abs(mean / m - 1.0) <= 1e-6);
        CHECK(std::abs(var / weight_variance(s, day) - 1.0) <= 1e-6);
    }
}

TEST_CASE("2025 survey statistics")
{
    const auto s = spectrum_2025();
    CHECK(mean_weight(s, 113.0) == doctest::Approx(48.15).epsilon(2e-4));
    CHECK(std::sqrt(weight_variance(s, 113.0)) == doctest::Approx(16.65).epsilon(5e-4));
    CHECK(mean_weight(s, 0.0) == doctest::Approx(3.14).epsilon(2e-3));

    const SizeSpectrum vb2019(9.60, 22.1, GrowthCurve::von_bertalanffy(0.0422, 0.05));
    CHECK(mean_weight(vb2019, 0.0) == doctest::Approx(8.95).epsilon(1e-3));
}

TEST_CASE("density at the asymptote equals the K density")
{
    const SizeSpectrum s(4.0, 3.0, GrowthCurve::logistic(0.5, 1.0));
    const double day = 1e4;  // f rounds to 1
    REQUIRE(s.curve()(day) == 1.0);
    for (double w : {1.0, 5.0, 12.0, 30.0}) CHECK(pdf_W(s, day, w) == pdf_K(s, w));
}

TEST_CASE("mean weight is nondecreasing in time")
{
    const SizeSpectrum s(8.36, 6.83, GrowthCurve::logistic_time_varying(0.199, 0.027, 6.39e-4));
    double prev = 0.0;
    for (double t = 0.0; t <= 250.0; t += 0.5) {
        const double m = mean_weight(s, t);
        CHECK(m >= prev);
        prev = m;
    }
}

TEST_CASE("regularized incomplete gamma")
{
    CHECK(gamma_cdf(1.0, std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(gamma_cdf(2.0, 0.0) == 0.0);
    CHECK(gamma_cdf(2.0, inf) == 1.0);
    for (double a = 1.0; a <= 50.0; a += 0.5) {
        const double p = gamma_cdf(a, a);
        // P(a, a) - 1/2 decays like 1/(3 sqrt(2 pi a)); it is below 0.06 from a = 5 on.
        if (a >= 5.0) CHECK(std::abs(p - 0.5) <= 0.06);
        const double lg = std::lgamma(a);
        const double oracle =
            integrate([&](double x) { return std::exp((a - 1.0) * std::log(x) - x - lg); }, 0.0, a);
        CHECK(std::abs(p - oracle) <= 1e-10);
    }
    CHECK_THROWS_AS(gamma_cdf(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_cdf(1.0, -1.0), std::domain_error);
}

TEST_CASE("quantiles invert the distribution function")
{
    const SizeSpectrum expo(1.0, 1.0, GrowthCurve::logistic(0.5, 1.0));
    CHECK(quantile_W(expo, 1e4, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> a(0.2, 60.0), p(1e-6, 1.0 - 1e-6);
    for (int n = 0; n < 100; ++n) {
        const double alpha = a(rng), prob = p(rng);
        CHECK(std::abs(gamma_cdf(alpha, gamma_quantile(alpha, prob)) - prob) <= 1e-10);
    }

    const auto s = spectrum_2025();
    double prev = inf;
    for (double q = 0.1; q > 1e-12; q /= 10.0) {
        const double w = quantile_W(s, 100.0, q);
        CHECK(w > 0.0);
        CHECK(w < prev);
        prev = w;
    }
    CHECK_THROWS_AS(gamma_quantile(2.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_quantile(2.0, 1.0), std::domain_error);
}

TEST_CASE("equal-probability quantization")
{
    const auto s = spectrum_2025();
    const auto one = quantize_spectrum(s, 113.0, 1);
    REQUIRE(one.size() == 1);
    CHECK(one[0].probability == 1.0);
    CHECK(one[0].weight == doctest::Approx(quantile_W(s, 113.0, 0.5)));

    for (int n : {64, 256, 512}) {
        const auto pts = quantize_spectrum(s, 113.0, n);
        double mass = 0.0, mean = 0.0, second = 0.0;
        for (std::size_t q = 0; q < pts.size(); ++q) {
            if (q > 0) CHECK(pts[q].weight > pts[q - 1].weight);
            mass += pts[q].probability;
            mean += pts[q].probability * pts[q].weight;
            second += pts[q].probability * pts[q].weight * pts[q].weight;
        }
        const double m = mean_weight(s, 113.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(mean / m - 1.0) <= (n == 64 ? 0.02 : 0.005));
        // Midpoint placement trims the tails, so the variance deficit is about 1.75 / n.
        if (n == 512) CHECK(std::abs((second - mean * mean) / weight_variance(s, 113.0) - 1.0) <= 0.005);
    }
}

TEST_CASE("allometry")
{
    CHECK(allometry_weight(Allometry(0.0054, 3.19), 20.0) == doctest::Approx(76.4).epsilon(1e-3));
    CHECK(allometry_weight(Allometry(1.0, 3.0), 2.0) == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(allometry_weight(Allometry(0.7, 2.4), 1.0) == 0.7);
    CHECK_THROWS_AS(allometry_weight(Allometry(1.0, 3.0), 0.0), std::domain_error);
    CHECK_THROWS_AS(Allometry(0.0, 3.0), std::domain_error);
}
