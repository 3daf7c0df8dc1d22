#include <iostream>

#include "CLI11.hpp"

#include "sizespec/experiment.hpp"

int main(int argc, char** argv)
{
    using namespace sizespec;
    CLI::App app{"Size-spectrum growth fitting and equilibrium harvesting solver"};
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Fit a growth curve and gamma size spectrum to survey data");
    fit_cmd->add_option("--daily", fit.daily_csv, "Daily catch CSV (day,mean_weight_g,sample_count)")->required();
    fit_cmd->add_option("--intensive", fit.intensive_csv, "Intensive survey CSV (weight_g)")->required();
    fit_cmd->add_option("--survey-day", fit.survey_day, "Day of the intensive survey")->required();
    fit_cmd->add_option("--variant", fit.variant, "vb, logistic or logistic-tv")->capture_default_str();
    fit_cmd->add_option("--out", fit.out_json, "Output model JSON")->required();

    SolveArgs solve;
    std::string solve_out;
    int solve_stride = 0;
    auto* solve_cmd = app.add_subcommand("solve", "Solve the extended HJB system for each sweep cell");
    solve_cmd->add_option("--config", solve.config, "Experiment config JSON")->required();
    auto* solve_out_opt = solve_cmd->add_option("--out", solve_out, "Override output_dir");
    auto* solve_stride_opt = solve_cmd->add_option("--stride", solve_stride, "CSV time stride in steps");
    solve_cmd->add_option("--threads", solve.threads, "Sweep cells solved in parallel")->capture_default_str();
    solve_cmd->add_flag("--write-g", solve.write_g, "Also write the stored g field");

    SimulateArgs sim;
    std::string sim_out, sim_paths;
    std::uint64_t sim_seed = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo evaluation of a stored policy");
    sim_cmd->add_option("--config", sim.config, "Experiment config JSON with an mc section")->required();
    sim_cmd->add_option("--policy", sim.policy_dir, "Directory written by solve")->required();
    auto* sim_out_opt = sim_cmd->add_option("--out", sim_out, "Result JSON (default <policy>/simulation.json)");
    auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Override mc.seed");
    sim_cmd->add_option("--threads", sim.threads, "Worker threads")->capture_default_str();
    auto* sim_paths_opt = sim_cmd->add_option("--paths-csv", sim_paths, "Per-path CSV dump");

    ReportArgs report;
    std::vector<std::string> run_dirs;
    auto* report_cmd = app.add_subcommand("report", "Collect solve outputs into one long-format CSV");
    report_cmd->add_option("runs", run_dirs, "Run directories")->required();
    report_cmd->add_option("--out", report.out, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*fit_cmd) return cmd_fit(fit, std::cout, std::cerr);
    if (*solve_cmd) {
        if (*solve_out_opt) solve.out = solve_out;
        if (*solve_stride_opt) solve.stride = solve_stride;
        return cmd_solve(solve, std::cout, std::cerr);
    }
    if (*sim_cmd) {
        if (*sim_out_opt) sim.out = sim_out;
        if (*sim_seed_opt) sim.seed = sim_seed;
        if (*sim_paths_opt) sim.paths_csv = sim_paths;
        return cmd_simulate(sim, std::cout, std::cerr);
    }
    for (const auto& d : run_dirs) report.run_dirs.emplace_back(d);
    return cmd_report(report, std::cout, std::cerr);
}
