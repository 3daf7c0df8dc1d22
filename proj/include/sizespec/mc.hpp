#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sizespec/control.hpp"

namespace sizespec {

/// Intensity lookup on a (time, population) grid, nearest node in both axes.
class PolicyGrid {
public:
    PolicyGrid(double t0, double dt, double dx, Grid2 theta);

    double operator()(double day, double x) const;
    const Grid2& theta() const { return theta_; }

private:
    double t0_;
    double dt_;
    double dx_;
    Grid2 theta_;
};

struct SimulationConfig {
    ControlProblem problem;
    std::optional<PolicyGrid> policy;       // equilibrium policy from solve
    std::optional<double> constant_theta;   // overrides policy when set
    std::vector<WeightPoint> terminal_weights;  // w_q, omega_q used in the terminal utility
    double x0;
    long n_paths;
    std::uint64_t seed;
    double dt_sim;
    int threads = 1;

    // Throws InputError when a per-step event probability would exceed one.
    void validate() const;
};

struct Estimate {
    double value = 0.0;
    double se = 0.0;
};

struct PopulationSummary {
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct PathRecord {
    double harvest_benefit;
    double terminal_population;
};

struct SimulationResult {
    Estimate j_estimate;
    Estimate harvest_term;
    Estimate terminal_term;
    double extinction_fraction = 0.0;
    PopulationSummary terminal_population;
    std::vector<PathRecord> paths;  // in path-index order
};

// Simulates n_paths trajectories from (t0, x0) to T and estimates the
// objective with the terminal certainty equivalent taken across paths.
SimulationResult simulate_paths(const SimulationConfig& config);

// Same dynamics started from (day, x).
SimulationResult simulate_from(const SimulationConfig& config, double day, double x);

// E[rho(w X_T) | X_day = x] under the configured policy.
Estimate estimate_g(const SimulationConfig& config, double x, double day, double w);

}  // namespace sizespec
