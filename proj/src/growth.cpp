#include "sizespec/growth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sizespec {

std::string_view to_string(GrowthVariant v)
{
    switch (v) {
    case GrowthVariant::VonBertalanffy: return "vb";
    case GrowthVariant::Logistic: return "logistic";
    case GrowthVariant::LogisticTimeVarying: return "logistic-tv";
    }
    return "unknown";
}

GrowthVariant parse_growth_variant(std::string_view name)
{
    if (name == "vb" || name == "von-bertalanffy") return GrowthVariant::VonBertalanffy;
    if (name == "logistic") return GrowthVariant::Logistic;
    if (name == "logistic-tv") return GrowthVariant::LogisticTimeVarying;
    throw std::invalid_argument("unknown growth variant '" + std::string(name) + "'");
}

GrowthCurve::GrowthCurve(GrowthVariant v, double f0, double r, double r0, double r1)
    : variant_(v), f0_(f0), r_(r), r0_(r0), r1_(r1)
{
    if (!(f0 > 0.0 && f0 < 1.0))
        throw std::domain_error("growth curve: f0 must lie strictly inside (0,1), got " + std::to_string(f0));
    if (v == GrowthVariant::LogisticTimeVarying) {
        if (!(r0 >= 0.0) || !(r1 >= 0.0) || !(r0 + r1 > 0.0) || !std::isfinite(r0 + r1))
            throw std::domain_error("growth curve: need r0 >= 0, r1 >= 0 and r0 + r1 > 0");
    } else if (!(r > 0.0) || !std::isfinite(r)) {
        throw std::domain_error("growth curve: rate r must be positive");
    }
}

GrowthCurve GrowthCurve::von_bertalanffy(double f0, double r)
{
    return {GrowthVariant::VonBertalanffy, f0, r, 0.0, 0.0};
}

GrowthCurve GrowthCurve::logistic(double f0, double r)
{
    return {GrowthVariant::Logistic, f0, r, 0.0, 0.0};
}

GrowthCurve GrowthCurve::logistic_time_varying(double f0, double r0, double r1)
{
    return {GrowthVariant::LogisticTimeVarying, f0, 0.0, r0, r1};
}

double GrowthCurve::operator()(double t) const
{
    if (!(t >= 0.0)) throw std::domain_error("growth curve: time must be nonnegative");
    if (t == 0.0) return f0_;
    switch (variant_) {
    case GrowthVariant::VonBertalanffy: {
        const double inner = 1.0 - (1.0 - std::cbrt(f0_)) * std::exp(-r_ * t / 3.0);
        return inner * inner * inner;
    }
    case GrowthVariant::Logistic:
        return 1.0 / ((1.0 / f0_ - 1.0) * std::exp(-r_ * t) + 1.0);
    case GrowthVariant::LogisticTimeVarying: {
        // Integrated rate R(t) = r0 t + r1 t^2 / 2.
        const double integrated = r0_ * t + 0.5 * r1_ * t * t;
        return 1.0 / ((1.0 / f0_ - 1.0) * std::exp(-integrated) + 1.0);
    }
    }
    return 0.0;
}

double GrowthCurve::rate_of_change(double t, double f) const
{
    switch (variant_) {
    case GrowthVariant::VonBertalanffy: {
        const double c = std::cbrt(std::max(f, 0.0));
        return r_ * c * c * (1.0 - c);
    }
    case GrowthVariant::Logistic:
        return r_ * f * (1.0 - f);
    case GrowthVariant::LogisticTimeVarying:
        return (r0_ + r1_ * t) * f * (1.0 - f);
    }
    return 0.0;
}

double eval_f(const GrowthCurve& curve, double t) { return curve(t); }

double eval_f_ode_oracle(const GrowthCurve& curve, double t)
{
    if (!(t >= 0.0)) throw std::domain_error("growth oracle: time must be nonnegative");
    if (t == 0.0) return curve.f0();

    // Keep (rate * h) <= 5e-3 so the RK4 local error stays below 1e-10.
    double max_rate = curve.r();
    if (curve.variant() == GrowthVariant::LogisticTimeVarying) max_rate = curve.r0() + curve.r1() * t;
    const double h_target = std::min(0.05, 5e-3 / std::max(max_rate, 1e-3));
    const auto steps = static_cast<long>(std::ceil(t / h_target));
    const double h = t / static_cast<double>(steps);

    double f = curve.f0();
    for (long n = 0; n < steps; ++n) {
        const double s = static_cast<double>(n) * h;
        const double k1 = curve.rate_of_change(s, f);
        const double k2 = curve.rate_of_change(s + 0.5 * h, f + 0.5 * h * k1);
        const double k3 = curve.rate_of_change(s + 0.5 * h, f + 0.5 * h * k2);
        const double k4 = curve.rate_of_change(s + h, f + h * k3);
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return f;
}

}  // namespace sizespec
