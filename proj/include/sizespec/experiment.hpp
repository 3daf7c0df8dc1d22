#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "sizespec/calibration.hpp"
#include "sizespec/control.hpp"

namespace sizespec {

struct GrowthSpec {
    GrowthVariant variant = GrowthVariant::Logistic;
    double f0 = 0.0;
    double r = 0.0;
    double r0 = 0.0;
    double r1 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    SizeSpectrum spectrum() const;
    bool operator==(const GrowthSpec&) const = default;
};

struct LatticeSpec {
    double dt = 0.0;
    int n_w = 64;
    int stride = 100;
    bool operator==(const LatticeSpec&) const = default;
};

struct MonteCarloSpec {
    double x0 = 0.0;
    long n_paths = 0;
    std::uint64_t seed = 0;
    std::optional<double> dt_sim;
    bool operator==(const MonteCarloSpec&) const = default;
};

struct SweepSpec {
    std::vector<double> eta;
    std::vector<double> psi;
    bool operator==(const SweepSpec&) const = default;
};

/// Everything one `solve` / `simulate` run needs. JSON field names carry
/// their units (dt_day, h_bar_individuals, ...).
struct ExperimentConfig {
    GrowthSpec growth;
    ControlParameters control{};
    LatticeSpec lattice;
    std::optional<SweepSpec> sweep;
    std::filesystem::path output_dir;
    std::optional<MonteCarloSpec> mc;

    ControlProblem problem() const;
    // (eta, psi) cells: the sweep product, or the single control setting.
    std::vector<std::pair<double, double>> cells() const;
    bool operator==(const ExperimentConfig& o) const;
};

// Throws InputError on missing or invalid fields. `base_dir` resolves a
// relative growth.model_json path.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

// 64-bit FNV-1a, hex encoded.
std::string content_hash(std::string_view bytes);

// Time-by-x matrix CSV: header `t_day,<x_0>,<x_1>,...`, one row per stored step.
void write_matrix_csv(const std::filesystem::path& path, const Grid2& grid, const ControlProblem& problem,
                      const Lattice& lattice, int stride);
struct MatrixCsv {
    std::vector<double> t;
    std::vector<double> x;
    Grid2 values;
};
MatrixCsv read_matrix_csv(const std::filesystem::path& path);

struct FitArgs {
    std::filesystem::path daily_csv;
    std::filesystem::path intensive_csv;
    double survey_day = 0.0;
    std::string variant = "logistic";
    std::filesystem::path out_json;
};

struct SolveArgs {
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;
    std::optional<int> stride;
    int threads = 1;
    bool write_g = false;
};

struct SimulateArgs {
    std::filesystem::path config;
    std::filesystem::path policy_dir;
    std::optional<std::filesystem::path> out;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::optional<std::filesystem::path> paths_csv;
};

struct ReportArgs {
    std::vector<std::filesystem::path> run_dirs;
    std::filesystem::path out;
};

// Exit codes: 0 ok, 1 numerical failure, 2 input error.
int cmd_fit(const FitArgs& args, std::ostream& log, std::ostream& err);
int cmd_solve(const SolveArgs& args, std::ostream& log, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& log, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& log, std::ostream& err);

}  // namespace sizespec
