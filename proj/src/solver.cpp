#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "sizespec/control.hpp"
#include "sizespec/errors.hpp"

namespace sizespec {

namespace {

// Post-catastrophe state x_j (1 - kappa), as a linear interpolation between
// nodes lo and lo + 1. kappa = 1 lands exactly on node 0.
struct JumpTarget {
    int lo = 0;
    double frac = 0.0;

    double blend(double at_lo, double at_hi) const
    {
        return frac == 0.0 ? at_lo : (1.0 - frac) * at_lo + frac * at_hi;
    }
};

JumpTarget catastrophe_target(int j, double kappa)
{
    if (kappa == 1.0) return {};
    const double pos = j * (1.0 - kappa);
    JumpTarget target{static_cast<int>(std::floor(pos)), 0.0};
    target.frac = pos - target.lo;
    if (target.frac < 1e-12) target.frac = 0.0;
    return target;
}

void require_stable(const ControlProblem& problem, const Lattice& lattice)
{
    if (!check_stability_bound(problem, lattice.dt))
        throw InputError("solve: dt = " + std::to_string(lattice.dt) +
                         " violates the stability bound dt < " + std::to_string(stability_bound(problem)));
    if (std::abs(lattice.dx - problem.params().h_bar) > 1e-12 * problem.params().h_bar)
        throw InputError("solve: lattice dx must equal h_bar");
    if (lattice.n_w != static_cast<int>(lattice.w_points.size()) || lattice.n_w < 1)
        throw InputError("solve: lattice weight points do not match n_w");
}

std::vector<double> harvest_weights(const ControlProblem& problem, const Lattice& lattice)
{
    std::vector<double> w(static_cast<std::size_t>(lattice.n_t));
    for (int i = 0; i < lattice.n_t; ++i) w[i] = problem.mean_weight_at(lattice.time(problem, i));
    return w;
}

[[noreturn]] void non_finite(int i, int j, const char* what)
{
    std::ostringstream msg;
    msg << "solve: non-finite " << what << " at node (i=" << i << ", j=" << j << ")";
    throw NumericalError(msg.str());
}

}  // namespace

SolverOutput solve(const ControlProblem& problem, const Lattice& lattice, const SolverOptions& options)
{
    require_stable(problem, lattice);
    const auto& p = problem.params();
    const auto& u = problem.utility();
    const int nt = lattice.n_t, nx = lattice.n_x, nw = lattice.n_w;
    const std::size_t slice_size = static_cast<std::size_t>(nx + 1) * nw;
    const double dt = lattice.dt;
    const double rho0 = u.rho(0.0);
    // lambda is singular at 0 for convex utilities.
    const double lambda_floor = p.psi > 0.0 ? 1e-12 : 0.0;

    std::vector<double> omega(nw), wq(nw);
    for (int q = 0; q < nw; ++q) {
        omega[q] = lattice.w_points[q].probability;
        wq[q] = lattice.w_points[q].weight;
    }
    const double terminal_w = lattice.terminal_mean_weight();
    const std::vector<double> harvest_w = harvest_weights(problem, lattice);

    SolverOutput out;
    out.n_x = nx;
    out.n_w = nw;
    out.phi = Grid2(nt + 1, nx + 1);
    out.theta_hat = Grid2(nt + 1, nx + 1);
    out.g_big = Grid2(nt + 1, nx + 1);
    const int stride = std::max(1, options.g_stride);

    // Bound constants.
    std::vector<double> g_upper(nw);
    double integrability = 0.0;
    for (int q = 0; q < nw; ++q) {
        g_upper[q] = u.rho(wq[q] * p.x_bar);
        integrability += omega[q] * u.lambda(g_upper[q]) * (g_upper[q] - rho0);
    }
    const double harvest_w_max = *std::max_element(harvest_w.begin(), harvest_w.end());
    auto& bounds = out.bounds;
    bounds.phi_bar = p.u_bar * p.h_bar * harvest_w_max +
                     problem.max_total_intensity() * p.eta * (terminal_w * p.x_bar + integrability);
    bounds.lower_phi_checked = p.psi >= 0.0;
    const double phi_cap0 = p.eta * terminal_w * p.x_bar;
    const double phi_slack = 1e-12 * (phi_cap0 + bounds.phi_bar * nt * dt + 1.0);
    bounds.min_phi = std::numeric_limits<double>::infinity();
    bounds.max_phi = -std::numeric_limits<double>::infinity();

    const auto record = [&](int i, int j, const char* what, double excess) {
        ++bounds.violations;
        if (bounds.violations == 1) {
            std::ostringstream msg;
            msg << what << " at (i=" << i << ", j=" << j << "), excess " << excess;
            bounds.first_violation = msg.str();
        }
        bounds.worst_excess = std::max(bounds.worst_excess, excess);
    };
    const auto check_slice = [&](int i, const std::vector<double>& g) {
        const double cap = phi_cap0 + bounds.phi_bar * (nt - i) * dt;
        for (int j = 0; j <= nx; ++j) {
            const double v = out.phi(i, j);
            bounds.min_phi = std::min(bounds.min_phi, v);
            bounds.max_phi = std::max(bounds.max_phi, v);
            if (bounds.lower_phi_checked && v < -phi_slack) record(i, j, "phi below 0", -v);
            if (v > cap + phi_slack) record(i, j, "phi above upper bound", v - cap);
            for (int q = 0; q < nw; ++q) {
                const double gv = g[static_cast<std::size_t>(j) * nw + q];
                const double slack = 1e-12 * (std::abs(g_upper[q]) + std::abs(rho0)) + 1e-300;
                if (gv < rho0 - slack) record(i, j, "g below rho(0)", rho0 - gv);
                if (gv > g_upper[q] + slack) record(i, j, "g above rho(w X)", gv - g_upper[q]);
            }
        }
    };

    // Slices at i + 1 (next) and i (cur); rinv and lam cache rho^(-1)(g), lambda(g).
    std::vector<double> g_next(slice_size), g_cur(slice_size);
    std::vector<double> rinv_next(slice_size), lam_next(slice_size);
    std::vector<double> phi_next(nx + 1), phi_cur(nx + 1);
    std::vector<double> g_target(nw), rinv_target(nw);

    const auto finish_slice = [&](int i, const std::vector<double>& g) {
        for (int j = 0; j <= nx; ++j) {
            double big = 0.0;
            for (int q = 0; q < nw; ++q) {
                const std::size_t idx = static_cast<std::size_t>(j) * nw + q;
                rinv_next[idx] = u.inverse(g[idx]);
                lam_next[idx] = u.lambda(std::max(g[idx], lambda_floor));
                big += omega[q] * rinv_next[idx];
            }
            out.g_big(i, j) = big;
        }
        if (i % stride == 0 || i == nt) {
            out.g_steps.push_back(i);
            out.g_field.insert(out.g_field.end(), g.begin(), g.end());
        }
        if (options.check_bounds) check_slice(i, g);
    };

    // Terminal layer.
    for (int j = 0; j <= nx; ++j) {
        phi_next[j] = p.eta * terminal_w * lattice.x(j);
        out.phi(nt, j) = phi_next[j];
        for (int q = 0; q < nw; ++q) g_next[static_cast<std::size_t>(j) * nw + q] = u.rho(wq[q] * lattice.x(j));
    }
    finish_slice(nt, g_next);

    for (int i = nt - 1; i >= 0; --i) {
        phi_cur[0] = 0.0;
        for (int q = 0; q < nw; ++q) g_cur[q] = rho0;
        out.theta_hat(i, 0) = 0.0;

        for (int j = 1; j <= nx; ++j) {
            const std::size_t row = static_cast<std::size_t>(j) * nw;
            const std::size_t down = row - nw;  // x_j - h_bar
            const JumpTarget cat = catastrophe_target(j, p.kappa);
            const std::size_t cat_lo = static_cast<std::size_t>(cat.lo) * nw;
            const std::size_t cat_hi = cat.frac == 0.0 ? cat_lo : cat_lo + nw;

            // eta-terms written as omega-weighted lambda(x)(y-x) - (rho^(-1)(y) - rho^(-1)(x)).
            double gap_harvest = 0.0, gap_catastrophe = 0.0;
            for (int q = 0; q < nw; ++q) {
                const double gj = g_next[row + q];
                const double lam = lam_next[row + q];
                const double rj = rinv_next[row + q];
                g_target[q] = cat.blend(g_next[cat_lo + q], g_next[cat_hi + q]);
                rinv_target[q] = cat.frac == 0.0 ? rinv_next[cat_lo + q] : u.inverse(g_target[q]);
                gap_harvest += omega[q] * (lam * (g_next[down + q] - gj) - (rinv_next[down + q] - rj));
                gap_catastrophe += omega[q] * (lam * (g_target[q] - gj) - (rinv_target[q] - rj));
            }

            const double phi_target = cat.blend(phi_next[cat.lo], phi_next[cat.lo + (cat.frac == 0.0 ? 0 : 1)]);
            const double A = (phi_next[j - 1] - phi_next[j]) + p.h_bar * harvest_w[i] + p.eta * gap_harvest;
            const double B = (phi_target - phi_next[j]) + p.eta * gap_catastrophe;
            const ThetaChoice choice = maximize_theta(A, B, problem);
            const double theta = choice.theta;
            const double nu = p.d + p.k * std::pow(theta, p.gamma);

            phi_cur[j] = phi_next[j] + dt * (choice.value + p.d * B);
            if (!std::isfinite(phi_cur[j]) || !std::isfinite(theta)) non_finite(i, j, "value");
            out.theta_hat(i, j) = theta;

            for (int q = 0; q < nw; ++q) {
                const double gj = g_next[row + q];
                const double gv = gj + dt * (theta * (g_next[down + q] - gj) + nu * (g_target[q] - gj));
                if (!std::isfinite(gv)) non_finite(i, j, "g");
                g_cur[row + q] = gv;
            }
        }

        for (int j = 0; j <= nx; ++j) out.phi(i, j) = phi_cur[j];
        std::swap(phi_cur, phi_next);
        std::swap(g_cur, g_next);
        finish_slice(i, g_next);
    }
    std::reverse(out.g_steps.begin(), out.g_steps.end());
    // Slices were appended from i = nt downwards; reorder to ascending time.
    {
        std::vector<double> ordered;
        ordered.reserve(out.g_field.size());
        const std::size_t count = out.g_steps.size();
        for (std::size_t s = count; s-- > 0;)
            ordered.insert(ordered.end(), out.g_field.begin() + static_cast<std::ptrdiff_t>(s * slice_size),
                           out.g_field.begin() + static_cast<std::ptrdiff_t>((s + 1) * slice_size));
        out.g_field = std::move(ordered);
    }
    return out;
}

ReferenceOutput solve_reference_hjb(const ControlProblem& problem, const Lattice& lattice)
{
    require_stable(problem, lattice);
    const auto& p = problem.params();
    const int nt = lattice.n_t, nx = lattice.n_x;
    const double terminal_w = lattice.terminal_mean_weight();
    const std::vector<double> harvest_w = harvest_weights(problem, lattice);

    ReferenceOutput out{Grid2(nt + 1, nx + 1), Grid2(nt + 1, nx + 1)};
    for (int j = 0; j <= nx; ++j) out.phi(nt, j) = p.eta * terminal_w * lattice.x(j);

    for (int i = nt - 1; i >= 0; --i) {
        out.phi(i, 0) = 0.0;
        for (int j = 1; j <= nx; ++j) {
            const JumpTarget cat = catastrophe_target(j, p.kappa);
            const double phi_target =
                cat.blend(out.phi(i + 1, cat.lo), out.phi(i + 1, cat.lo + (cat.frac == 0.0 ? 0 : 1)));
            const double A = (out.phi(i + 1, j - 1) - out.phi(i + 1, j)) + p.h_bar * harvest_w[i];
            const double B = phi_target - out.phi(i + 1, j);
            const ThetaChoice choice = maximize_theta(A, B, problem);
            out.theta_hat(i, j) = choice.theta;
            out.phi(i, j) = out.phi(i + 1, j) + lattice.dt * (choice.value + p.d * B);
        }
    }
    return out;
}

}  // namespace sizespec
