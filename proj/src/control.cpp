#include "sizespec/control.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sizespec/errors.hpp"

namespace sizespec {

PowerUtility::PowerUtility(double psi) : psi_(psi), exponent_(psi + 1.0)
{
    if (!(psi > -1.0) || !std::isfinite(psi)) throw std::domain_error("utility: psi must exceed -1");
}

double PowerUtility::rho(double y) const
{
    if (psi_ == 0.0) return y;
    return std::pow(y, exponent_) / exponent_;
}

double PowerUtility::inverse(double y) const
{
    if (psi_ == 0.0) return y;
    return std::pow(exponent_ * y, 1.0 / exponent_);
}

double PowerUtility::lambda(double y) const
{
    if (psi_ == 0.0) return 1.0;
    if (y == 0.0) return psi_ > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::pow(exponent_ * y, -psi_ / exponent_);
}

ControlProblem::ControlProblem(SizeSpectrum spectrum, ControlParameters p)
    : spectrum_(spectrum), params_(p), utility_(p.psi)
{
    auto fail = [](const std::string& what) { throw InputError("control problem: " + what); };
    if (!(p.d >= 0.0)) fail("d must be >= 0");
    if (!(p.k >= 0.0)) fail("k must be >= 0");
    if (!(p.gamma > 1.0)) fail("gamma must exceed 1");
    if (!(p.kappa > 0.0 && p.kappa <= 1.0)) fail("kappa must lie in (0,1]");
    if (!(p.eta >= 0.0)) fail("eta must be >= 0");
    if (!(p.u_bar >= 0.0)) fail("u_bar must be >= 0");
    if (!(p.h_bar > 0.0)) fail("h_bar must be positive");
    if (!(p.x_bar > 0.0)) fail("x_bar must be positive");
    const double ratio = p.x_bar / p.h_bar;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) fail("x_bar must be a multiple of h_bar");
    if (!(p.t0 > 0.0 && p.t0 < p.T)) fail("need 0 < t0 < T");
}

double ControlProblem::max_total_intensity() const
{
    const auto& p = params_;
    return p.u_bar + p.d + p.k * std::pow(p.u_bar, p.gamma);
}

double rho(const ControlProblem& problem, double y) { return problem.utility().rho(y); }
double rho_inv(const ControlProblem& problem, double y) { return problem.utility().inverse(y); }
double lambda_deriv(const ControlProblem& problem, double y) { return problem.utility().lambda(y); }

double harvest_fn(const ControlProblem& problem, double x) { return std::min(problem.params().h_bar, x); }

ThetaChoice maximize_theta(double A, double B, const ControlProblem& problem)
{
    const auto& p = problem.params();
    const double kB = p.k * B;
    const auto objective = [&](double theta) { return A * theta + kB * std::pow(theta, p.gamma); };

    if (kB < 0.0) {
        // Strictly concave: stationary point, clamped into [0, U].
        if (!(A > 0.0)) return {0.0, 0.0};
        const double theta = std::min(std::pow(A / (-p.gamma * kB), 1.0 / (p.gamma - 1.0)), p.u_bar);
        return {theta, objective(theta)};
    }
    // Convex or linear: one of the endpoints.
    const double top = objective(p.u_bar);
    if (top > 0.0) return {p.u_bar, top};
    return {0.0, 0.0};
}

double stability_bound(const ControlProblem& problem) { return 1.0 / problem.max_total_intensity(); }

bool check_stability_bound(const ControlProblem& problem, double dt)
{
    return dt > 0.0 && dt < stability_bound(problem);
}

double lemma_b1_gap(const PowerUtility& utility, double x, double y)
{
    if (x == y) return 0.0;
    const double lam = utility.lambda(x);
    if (std::isinf(lam)) return y > x ? lam : -lam;
    return lam * (y - x) - (utility.inverse(y) - utility.inverse(x));
}

double lemma_b1_gap(const ControlProblem& problem, double x, double y)
{
    return lemma_b1_gap(problem.utility(), x, y);
}

double Lattice::terminal_mean_weight() const
{
    double m = 0.0;
    for (const auto& p : w_points) m += p.weight * p.probability;
    return m;
}

Lattice make_lattice(const ControlProblem& problem, double dt, int n_w)
{
    const auto& p = problem.params();
    if (!(dt > 0.0)) throw InputError("lattice: dt must be positive");
    if (!check_stability_bound(problem, dt))
        throw InputError("lattice: dt = " + std::to_string(dt) +
                         " violates the stability bound dt < 1/(U + d + k U^gamma) = " +
                         std::to_string(stability_bound(problem)));
    if (n_w < 1) throw InputError("lattice: n_w must be >= 1");

    const double steps = (p.T - p.t0) / dt;
    const double n_t = std::round(steps);
    if (n_t < 1.0 || std::abs(steps - n_t) > 1e-6 * std::max(1.0, steps))
        throw InputError("lattice: horizon T - t0 must be an integer multiple of dt");
    const double n_x = std::round(p.x_bar / p.h_bar);

    Lattice lat;
    lat.dt = dt;
    lat.dx = p.h_bar;
    lat.n_t = static_cast<int>(n_t);
    lat.n_x = static_cast<int>(n_x);
    lat.n_w = n_w;
    lat.w_points = quantize_spectrum(problem.spectrum(), p.T, n_w);
    return lat;
}

int SolverOutput::g_slice(int i) const
{
    for (std::size_t s = 0; s < g_steps.size(); ++s)
        if (g_steps[s] == i) return static_cast<int>(s);
    return -1;
}

}  // namespace sizespec
