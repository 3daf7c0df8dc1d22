#include "sizespec/mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "sizespec/errors.hpp"

namespace sizespec {

PolicyGrid::PolicyGrid(double t0, double dt, double dx, Grid2 theta)
    : t0_(t0), dt_(dt), dx_(dx), theta_(std::move(theta))
{
    if (!(dt > 0.0) || !(dx > 0.0) || theta_.rows() < 1 || theta_.cols() < 1)
        throw InputError("policy grid: empty grid or nonpositive spacing");
}

double PolicyGrid::operator()(double day, double x) const
{
    const int i = std::clamp(static_cast<int>(std::lround((day - t0_) / dt_)), 0, theta_.rows() - 1);
    const int j = std::clamp(static_cast<int>(std::lround(x / dx_)), 0, theta_.cols() - 1);
    return theta_(i, j);
}

void SimulationConfig::validate() const
{
    if (n_paths < 1) throw InputError("simulation: n_paths must be >= 1");
    if (!(x0 >= 0.0)) throw InputError("simulation: x0 must be >= 0");
    if (!(dt_sim > 0.0)) throw InputError("simulation: dt_sim must be positive");
    if (!(dt_sim * problem.max_total_intensity() < 1.0))
        throw InputError("simulation: dt_sim * (U + d + k U^gamma) must be < 1");
    if (!constant_theta && !policy) throw InputError("simulation: no policy and no constant intensity");
    if (constant_theta && !(*constant_theta >= 0.0 && *constant_theta <= problem.params().u_bar))
        throw InputError("simulation: constant intensity must lie in [0, U]");
    if (terminal_weights.empty()) throw InputError("simulation: terminal weight points are empty");
}

namespace {

std::mt19937_64 path_engine(std::uint64_t seed, long path)
{
    const auto p = static_cast<std::uint64_t>(path);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32)};
    return std::mt19937_64(seq);
}

struct StepPlan {
    int steps = 0;
    double start = 0.0;
    std::vector<double> mean_weight;  // at each step's left endpoint
};

StepPlan plan_steps(const SimulationConfig& c, double day)
{
    const double T = c.problem.params().T;
    StepPlan plan;
    plan.start = day;
    plan.steps = std::max(0, static_cast<int>(std::lround((T - day) / c.dt_sim)));
    plan.mean_weight.resize(static_cast<std::size_t>(plan.steps));
    for (int s = 0; s < plan.steps; ++s) plan.mean_weight[s] = c.problem.mean_weight_at(day + s * c.dt_sim);
    return plan;
}

// 53 random bits mapped to [0, 1).
double next_uniform(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

PathRecord run_path(const SimulationConfig& c, const StepPlan& plan, double x, long path)
{
    const auto& p = c.problem.params();
    auto engine = path_engine(c.seed, path);
    double benefit = 0.0;
    // Policies are close to bang-bang, so the last intensity is usually reused.
    double cached_theta = -1.0;
    double p_catastrophe = 0.0;
    for (int s = 0; s < plan.steps && x > 0.0; ++s) {
        const double t = plan.start + s * c.dt_sim;
        const double theta = c.constant_theta ? *c.constant_theta : (*c.policy)(t, x);
        if (theta != cached_theta) {
            cached_theta = theta;
            p_catastrophe = (p.d + p.k * std::pow(theta, p.gamma)) * c.dt_sim;
        }
        const double p_harvest = theta * c.dt_sim;
        const double u_h = next_uniform(engine);
        const double u_c = next_uniform(engine);
        // Harvest first, then catastrophe, both acting on the left limit.
        if (u_h < p_harvest) {
            const double h = std::min(p.h_bar, x);
            benefit += plan.mean_weight[s] * h;
            x -= h;
        }
        if (u_c < p_catastrophe) x = (1.0 - p.kappa) * x;
    }
    return {benefit, x};
}

std::vector<PathRecord> run_paths(const SimulationConfig& c, double day, double x)
{
    const StepPlan plan = plan_steps(c, day);
    std::vector<PathRecord> records(static_cast<std::size_t>(c.n_paths));
    const int threads = std::max(1, std::min<int>(c.threads, static_cast<int>(c.n_paths)));
    const auto work = [&](int worker) {
        for (long path = worker; path < c.n_paths; path += threads) records[path] = run_path(c, plan, x, path);
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    return records;
}

double sample_sd(const std::vector<double>& v, double mean)
{
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double mean_of(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

SimulationResult summarize(const SimulationConfig& c, std::vector<PathRecord> records)
{
    const auto& u = c.problem.utility();
    const double eta = c.problem.params().eta;
    const std::size_t n = records.size();
    const double root_n = std::sqrt(static_cast<double>(n));

    std::vector<double> benefit(n), pop(n);
    for (std::size_t k = 0; k < n; ++k) {
        benefit[k] = records[k].harvest_benefit;
        pop[k] = records[k].terminal_population;
    }

    SimulationResult r;
    const double harvest_mean = mean_of(benefit);
    r.harvest_term = {harvest_mean, sample_sd(benefit, harvest_mean) / root_n};

    // Certainty equivalent per weight point, across paths; its standard error
    // comes from the linearization rho^(-1)(m + e) ~ rho^(-1)(m) + lambda(m) e.
    std::vector<double> influence(n, 0.0), utilities(n);
    double terminal = 0.0;
    for (const auto& wp : c.terminal_weights) {
        for (std::size_t k = 0; k < n; ++k) utilities[k] = u.rho(wp.weight * pop[k]);
        const double m = mean_of(utilities);
        terminal += wp.probability * u.inverse(m);
        const double slope = eta * wp.probability * (m > 0.0 ? u.lambda(m) : 0.0);
        for (std::size_t k = 0; k < n; ++k) influence[k] += slope * (utilities[k] - m);
    }
    terminal *= eta;
    r.terminal_term = {terminal, sample_sd(influence, 0.0) / root_n};

    std::vector<double> total(n);
    for (std::size_t k = 0; k < n; ++k) total[k] = benefit[k] - harvest_mean + influence[k];
    r.j_estimate = {r.harvest_term.value + r.terminal_term.value, sample_sd(total, 0.0) / root_n};

    long extinct = 0;
    for (double x : pop) extinct += x <= 0.0 ? 1 : 0;
    r.extinction_fraction = static_cast<double>(extinct) / static_cast<double>(n);
    const double pop_mean = mean_of(pop);
    r.terminal_population = {pop_mean, sample_sd(pop, pop_mean), *std::min_element(pop.begin(), pop.end()),
                             *std::max_element(pop.begin(), pop.end())};
    r.paths = std::move(records);
    return r;
}

}  // namespace

SimulationResult simulate_from(const SimulationConfig& config, double day, double x)
{
    config.validate();
    if (!(x >= 0.0)) throw InputError("simulation: start population must be >= 0");
    return summarize(config, run_paths(config, day, x));
}

SimulationResult simulate_paths(const SimulationConfig& config)
{
    return simulate_from(config, config.problem.params().t0, config.x0);
}

Estimate estimate_g(const SimulationConfig& config, double x, double day, double w)
{
    config.validate();
    const auto& u = config.problem.utility();
    const auto records = run_paths(config, day, x);
    std::vector<double> values(records.size());
    for (std::size_t k = 0; k < records.size(); ++k) values[k] = u.rho(w * records[k].terminal_population);
    const double m = mean_of(values);
    return {m, sample_sd(values, m) / std::sqrt(static_cast<double>(values.size()))};
}

}  // namespace sizespec
