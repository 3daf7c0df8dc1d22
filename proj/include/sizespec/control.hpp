#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sizespec/spectrum.hpp"

namespace sizespec {

/// Power utility rho(y) = y^(psi+1) / (psi+1), psi > -1, with its inverse
/// and lambda = d rho^(-1) / dy.
class PowerUtility {
public:
    explicit PowerUtility(double psi);

    double psi() const { return psi_; }
    double rho(double y) const;
    double inverse(double y) const;
    // +infinity at y = 0 when psi > 0.
    double lambda(double y) const;

private:
    double psi_;
    double exponent_;  // psi + 1
};

struct ControlParameters {
    double d;       // base catastrophe rate, 1/day
    double k;       // effort-driven catastrophe coefficient, 1/day
    double gamma;   // effort exponent, > 1
    double kappa;   // fraction removed by a catastrophe, (0,1]
    double eta;     // terminal utility multiplier, >= 0
    double psi;     // utility shape, > -1
    double u_bar;   // maximum arrival intensity, 1/day
    double h_bar;   // individuals removed per harvest
    double x_bar;   // population cap, a multiple of h_bar
    double t0;      // first day of the harvesting season
    double T;       // last day

    bool operator==(const ControlParameters&) const = default;
};

/// Harvesting problem on [t0, T]: jump dynamics driven by harvest arrivals
/// (intensity theta) and catastrophes (intensity d + k theta^gamma), with
/// harvest benefit and a certainty-equivalent terminal biomass utility.
class ControlProblem {
public:
    ControlProblem(SizeSpectrum spectrum, ControlParameters params);

    const SizeSpectrum& spectrum() const { return spectrum_; }
    const ControlParameters& params() const { return params_; }
    const PowerUtility& utility() const { return utility_; }

    // U + d + k U^gamma, the largest total jump intensity.
    double max_total_intensity() const;
    // Mean weight at absolute season day t.
    double mean_weight_at(double day) const { return mean_weight(spectrum_, day); }

private:
    SizeSpectrum spectrum_;
    ControlParameters params_;
    PowerUtility utility_;
};

double rho(const ControlProblem& problem, double y);
double rho_inv(const ControlProblem& problem, double y);
double lambda_deriv(const ControlProblem& problem, double y);

// min(h_bar, x).
double harvest_fn(const ControlProblem& problem, double x);

struct ThetaChoice {
    double theta;
    double value;  // A theta + k B theta^gamma at theta
};

// Exact maximizer of A theta + k B theta^gamma over [0, U]; ties go to the
// smaller theta.
ThetaChoice maximize_theta(double A, double B, const ControlProblem& problem);

// 1 / (U + d + k U^gamma).
double stability_bound(const ControlProblem& problem);
bool check_stability_bound(const ControlProblem& problem, double dt);

// lambda(x)(y - x) - (rho^(-1)(y) - rho^(-1)(x)); nonnegative for psi > 0,
// nonpositive for psi < 0, zero for psi = 0.
double lemma_b1_gap(const PowerUtility& utility, double x, double y);
double lemma_b1_gap(const ControlProblem& problem, double x, double y);

/// Space-time-weight lattice. dx equals h_bar so a harvest moves exactly
/// one node down; the weight axis is an equal-probability discretization
/// of the terminal weight law.
struct Lattice {
    double dt;
    double dx;
    int n_t;
    int n_x;
    int n_w;
    std::vector<WeightPoint> w_points;

    double time(const ControlProblem& problem, int i) const { return problem.params().t0 + i * dt; }
    double x(int j) const { return j * dx; }
    // Sum of w_q omega_q: the terminal mean weight seen by the scheme.
    double terminal_mean_weight() const;
};

// Throws InputError on a non-integral horizon or cap, or when dt violates the
// stability bound.
Lattice make_lattice(const ControlProblem& problem, double dt, int n_w = 64);

/// Dense row-major (time, x) grid.
class Grid2 {
public:
    Grid2() = default;
    Grid2(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const std::vector<double>& data() const { return data_; }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

struct BoundReport {
    double phi_bar = 0.0;          // per-day growth constant of the upper bound on Phi
    bool lower_phi_checked = true; // false when psi < 0
    long violations = 0;
    double worst_excess = 0.0;
    std::string first_violation;
    double min_phi = 0.0;
    double max_phi = 0.0;

    bool passed() const { return violations == 0; }
};

struct SolverOptions {
    int g_stride = 100;  // store g every g_stride time steps (plus the final step)
    bool check_bounds = true;
};

struct SolverOutput {
    Grid2 phi;        // value, g * individuals
    Grid2 theta_hat;  // equilibrium intensity, 1/day
    Grid2 g_big;      // nonlinear expectation of terminal biomass
    std::vector<int> g_steps;      // time indices stored in g_field
    std::vector<double> g_field;   // [slice][j][q]
    int n_x = 0;
    int n_w = 0;
    BoundReport bounds;

    double g(std::size_t slice, int j, int q) const
    {
        return g_field[(slice * static_cast<std::size_t>(n_x + 1) + j) * n_w + q];
    }
    // Index into g_steps of time step i, or -1 when that slice was not stored.
    int g_slice(int i) const;
};

SolverOutput solve(const ControlProblem& problem, const Lattice& lattice, const SolverOptions& options = {});

struct ReferenceOutput {
    Grid2 phi;
    Grid2 theta_hat;
};

// Standard dynamic-programming sweep: same Phi recursion with the terminal
// payoff eta * W_T * x and no g-terms. Valid on its own when eta = 0 or psi = 0.
ReferenceOutput solve_reference_hjb(const ControlProblem& problem, const Lattice& lattice);

}  // namespace sizespec
