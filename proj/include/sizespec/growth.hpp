#pragma once

#include <string>
#include <string_view>

namespace sizespec {

enum class GrowthVariant { VonBertalanffy, Logistic, LogisticTimeVarying };

std::string_view to_string(GrowthVariant v);
// Accepts "vb", "von-bertalanffy", "logistic", "logistic-tv".
GrowthVariant parse_growth_variant(std::string_view name);

/// Normalized growth fraction f(t) in (0,1), with f(0) = f0.
///
/// Von Bertalanffy and logistic curves use a constant rate `r`; the
/// time-varying logistic curve uses r(t) = r0 + r1 t. Time is in days
/// from the season origin.
class GrowthCurve {
public:
    static GrowthCurve von_bertalanffy(double f0, double r);
    static GrowthCurve logistic(double f0, double r);
    static GrowthCurve logistic_time_varying(double f0, double r0, double r1);

    GrowthVariant variant() const { return variant_; }
    double f0() const { return f0_; }
    double r() const { return r_; }
    double r0() const { return r0_; }
    double r1() const { return r1_; }

    // Closed-form f(t); throws std::domain_error for t < 0.
    double operator()(double t) const;

    // Right-hand side of the growth ODE, df/dt at (t, f).
    double rate_of_change(double t, double f) const;

private:
    GrowthCurve(GrowthVariant v, double f0, double r, double r0, double r1);

    GrowthVariant variant_;
    double f0_;
    double r_ = 0.0;
    double r0_ = 0.0;
    double r1_ = 0.0;
};

double eval_f(const GrowthCurve& curve, double t);

// Fixed-step RK4 integration of the curve's ODE from f(0) = f0. Used as an
// independent check on the closed forms.
double eval_f_ode_oracle(const GrowthCurve& curve, double t);

}  // namespace sizespec
