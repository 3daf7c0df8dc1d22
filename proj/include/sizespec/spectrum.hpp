#pragma once

#include <vector>

#include "sizespec/growth.hpp"

namespace sizespec {

/// Gamma law for the asymptotic weight K (shape alpha, scale beta in grams)
/// composed with a growth curve: the body weight at day t is W_t = K f(t).
class SizeSpectrum {
public:
    SizeSpectrum(double alpha, double beta, GrowthCurve curve);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const GrowthCurve& curve() const { return curve_; }

    double mean_K() const { return alpha_ * beta_; }
    double var_K() const { return alpha_ * beta_ * beta_; }

private:
    double alpha_;
    double beta_;
    GrowthCurve curve_;
};

struct WeightPoint {
    double weight;       // g
    double probability;  // quadrature weight, sums to one over a discretization
};

double pdf_K(const SizeSpectrum& s, double k);
double pdf_W(const SizeSpectrum& s, double t, double w);

// alpha beta f(t).
double mean_weight(const SizeSpectrum& s, double t);
// alpha beta^2 f(t)^2.
double weight_variance(const SizeSpectrum& s, double t);

// Regularized lower incomplete gamma P(alpha, x).
double gamma_cdf(double alpha, double x);

// Inverse of gamma_cdf in x. Throws NumericalError when the safeguarded
// Newton iteration does not reach |P(alpha, x) - p| <= 1e-12 in 200 steps.
double gamma_quantile(double alpha, double p);

double quantile_W(const SizeSpectrum& s, double t, double p);

// Equal-probability discretization of W_t: point q sits at the
// (q - 1/2)/n quantile and carries probability 1/n.
std::vector<WeightPoint> quantize_spectrum(const SizeSpectrum& s, double t, int n);

/// Weight-length relation w = a l^b.
struct Allometry {
    double a;  // g / cm^b
    double b;

    Allometry(double a, double b);
};

double allometry_weight(const Allometry& am, double length_cm);

}  // namespace sizespec
