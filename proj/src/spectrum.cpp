#include "sizespec/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "sizespec/errors.hpp"

namespace sizespec {

SizeSpectrum::SizeSpectrum(double alpha, double beta, GrowthCurve curve)
    : alpha_(alpha), beta_(beta), curve_(curve)
{
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::domain_error("size spectrum: shape alpha must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::domain_error("size spectrum: scale beta must be positive");
}

double pdf_K(const SizeSpectrum& s, double k)
{
    if (!(k > 0.0)) throw std::domain_error("pdf_K: weight must be positive");
    const double a = s.alpha();
    const double b = s.beta();
    return std::exp((a - 1.0) * std::log(k) - k / b - std::lgamma(a) - a * std::log(b));
}

double pdf_W(const SizeSpectrum& s, double t, double w)
{
    if (!(w > 0.0)) throw std::domain_error("pdf_W: weight must be positive");
    const double f = s.curve()(t);
    return pdf_K(s, w / f) / f;
}

double mean_weight(const SizeSpectrum& s, double t)
{
    return s.alpha() * s.beta() * s.curve()(t);
}

double weight_variance(const SizeSpectrum& s, double t)
{
    const double f = s.curve()(t);
    return s.alpha() * s.beta() * s.beta() * f * f;
}

double gamma_cdf(double alpha, double x)
{
    if (!(alpha > 0.0)) throw std::domain_error("gamma_cdf: shape must be positive");
    if (!(x >= 0.0)) throw std::domain_error("gamma_cdf: argument must be nonnegative");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return boost::math::gamma_p(alpha, x);
}

double gamma_quantile(double alpha, double p)
{
    if (!(alpha > 0.0)) throw std::domain_error("gamma_quantile: shape must be positive");
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gamma_quantile: probability must lie in (0,1)");

    constexpr int max_iterations = 200;
    constexpr double tolerance = 1e-12;

    // Bracket [lo, hi] with P(lo) < p <= P(hi).
    double lo = 0.0;
    double hi = std::max(alpha, 1.0);
    int iterations = 0;
    while (gamma_cdf(alpha, hi) < p) {
        lo = hi;
        hi *= 2.0;
        if (++iterations > max_iterations)
            throw NumericalError("gamma_quantile: failed to bracket p = " + std::to_string(p));
    }

    const double log_norm = std::lgamma(alpha);
    double x = 0.5 * (lo + hi);
    for (; iterations < max_iterations; ++iterations) {
        const double residual = gamma_cdf(alpha, x) - p;
        if (std::abs(residual) <= tolerance) return x;
        if (residual < 0.0) lo = x; else hi = x;

        const double density = std::exp((alpha - 1.0) * std::log(x) - x - log_norm);
        double next = density > 0.0 ? x - residual / density : lo - 1.0;
        // Fall back to bisection whenever Newton leaves the bracket.
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) {
            if (std::abs(residual) <= 1e-10) return x;
            break;
        }
        x = next;
    }
    throw NumericalError("gamma_quantile: no convergence for alpha = " + std::to_string(alpha) +
                         ", p = " + std::to_string(p));
}

double quantile_W(const SizeSpectrum& s, double t, double p)
{
    return s.curve()(t) * s.beta() * gamma_quantile(s.alpha(), p);
}

std::vector<WeightPoint> quantize_spectrum(const SizeSpectrum& s, double t, int n)
{
    if (n < 1) throw std::domain_error("quantize_spectrum: need at least one point");
    std::vector<WeightPoint> points;
    points.reserve(static_cast<std::size_t>(n));
    const double mass = 1.0 / n;
    for (int q = 1; q <= n; ++q)
        points.push_back({quantile_W(s, t, (q - 0.5) / n), mass});
    return points;
}

Allometry::Allometry(double a_, double b_) : a(a_), b(b_)
{
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("allometry: a and b must be positive");
}

double allometry_weight(const Allometry& am, double length_cm)
{
    if (!(length_cm > 0.0)) throw std::domain_error("allometry_weight: length must be positive");
    return am.a * std::pow(length_cm, am.b);
}

}  // namespace sizespec
