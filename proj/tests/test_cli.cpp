#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sizespec/errors.hpp"
#include "sizespec/experiment.hpp"
#include "synthetic.hpp"

using namespace sizespec;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "sizespec_cli_test" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json small_config(const fs::path& out)
{
    auto j = json::parse(R"({
      "growth": {"variant": "logistic-tv", "f0": 0.199, "r0_per_day": 0.027, "r1_per_day2": 0.000639,
                 "alpha": 8.36, "beta_g": 6.83},
      "control": {"d_per_day": 0.0001, "k_per_day": 0.002, "gamma": 2.0, "kappa": 1.0, "eta": 0.6, "psi": 1.5,
                  "u_bar_per_day": 1.0, "h_bar_individuals": 40.0, "x_bar_individuals": 400.0,
                  "t0_day": 150.0, "T_day": 160.0},
      "lattice": {"dt_day": 0.01, "n_w": 16, "stride": 100},
      "output_dir": "",
      "mc": {"x0_individuals": 200.0, "n_paths": 2000, "seed": 99}
    })");
    j["output_dir"] = out.string();
    return j;
}

fs::path write_config(const fs::path& dir, const json& j)
{
    const auto path = dir / "config.json";
    std::ofstream(path) << j.dump(2);
    return path;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(SIZESPEC_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config round trip")
{
    auto j = small_config("runs/x");
    j["sweep"] = {{"eta", {0.3, 0.6}}, {"psi", {-0.75, 4.0}}};
    j["mc"]["dt_sim_day"] = 0.005;
    const auto a = parse_config(j);
    const auto b = parse_config(to_json(a));
    CHECK(a == b);
    CHECK(to_json(b) == to_json(a));
    CHECK(a.cells().size() == 4);

    auto missing = small_config("runs/x");
    missing["control"].erase("kappa");
    CHECK_THROWS_AS(parse_config(missing), InputError);
    auto bad_sweep = small_config("runs/x");
    bad_sweep["sweep"] = {{"eta", json::array()}};
    CHECK_THROWS_AS(parse_config(bad_sweep), InputError);
    auto bad_gamma = small_config("runs/x");
    bad_gamma["control"]["gamma"] = 0.5;
    CHECK_THROWS_AS(parse_config(bad_gamma), InputError);
}

TEST_CASE("benchmark solve records the stability bound")
{
    const auto dir = scratch("benchmark");
    auto j = small_config(dir);
    j["control"]["x_bar_individuals"] = 4000.0;
    j["control"]["t0_day"] = 61.0;
    j["control"]["T_day"] = 181.0;
    j["control"]["psi"] = 0.0;
    j["lattice"]["n_w"] = 64;
    std::ostringstream log, err;
    REQUIRE(cmd_solve({write_config(dir, j)}, log, err) == 0);
    const auto manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest["stability"]["bound_day"].get<double>() == doctest::Approx(0.99790).epsilon(1e-5));
    CHECK(manifest["stability"]["pass"].get<bool>());
    CHECK(manifest["bounds"]["pass"].get<bool>());
    CHECK(manifest["lattice"]["n_t"].get<int>() == 12000);
    CHECK(manifest["input_hash"].get<std::string>().size() == 16);
    for (const char* f : {"phi.csv", "theta.csv", "G.csv", "policy.csv"}) CHECK(fs::exists(dir / f));
    const auto phi = read_matrix_csv(dir / "phi.csv");
    CHECK(phi.t.size() == 121);
    CHECK(phi.x.size() == 101);
}

TEST_CASE("unstable time step is refused with exit code 2")
{
    const auto dir = scratch("unstable");
    auto j = small_config(dir);
    j["lattice"]["dt_day"] = 1.5;
    std::ostringstream log, err;
    CHECK(cmd_solve({write_config(dir, j)}, log, err) == 2);
    CHECK(err.str().find("stability bound") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "manifest.json"));
}

TEST_CASE("eta sweep writes one directory per cell and G rises with eta")
{
    const auto dir = scratch("sweep");
    auto j = small_config(dir);
    j["sweep"] = {{"eta", {0.3, 0.6, 0.9, 1.2}}};
    std::ostringstream log, err;
    REQUIRE(cmd_solve({write_config(dir, j)}, log, err) == 0);
    std::vector<MatrixCsv> big;
    std::vector<fs::path> runs;
    for (const char* cell : {"eta_0.3_psi_1.5", "eta_0.6_psi_1.5", "eta_0.9_psi_1.5", "eta_1.2_psi_1.5"}) {
        REQUIRE(fs::exists(dir / cell / "manifest.json"));
        big.push_back(read_matrix_csv(dir / cell / "G.csv"));
        runs.push_back(dir / cell);
    }
    for (std::size_t c = 1; c < big.size(); ++c)
        for (int jx = 0; jx < big[c].values.cols(); ++jx) CHECK(big[c].values(0, jx) >= big[c - 1].values(0, jx) - 1e-9);

    const auto one = dir / "one.csv";
    REQUIRE(cmd_report({{runs[0]}, one}, log, err) == 0);
    const auto all = dir / "all.csv";
    REQUIRE(cmd_report({runs, all}, log, err) == 0);
    const auto count_rows = [](const fs::path& p) {
        std::ifstream in(p);
        std::string line;
        std::getline(in, line);
        CHECK(line == "eta,psi,t,x,phi,theta,g_big");
        long n = 0;
        while (std::getline(in, line)) ++n;
        return n;
    };
    const long single = count_rows(one);
    CHECK(single == 11 * 11);
    CHECK(count_rows(all) == 4 * single);
}

TEST_CASE("report refuses runs on different lattices")
{
    const auto a = scratch("lat_a"), b = scratch("lat_b");
    std::ostringstream log, err;
    REQUIRE(cmd_solve({write_config(a, small_config(a))}, log, err) == 0);
    auto jb = small_config(b);
    jb["lattice"]["dt_day"] = 0.02;
    REQUIRE(cmd_solve({write_config(b, jb)}, log, err) == 0);
    CHECK(cmd_report({{a, b}, a / "r.csv"}, log, err) == 2);
    CHECK(err.str().find("conflicts") != std::string::npos);
}

TEST_CASE("solve is idempotent and simulate is reproducible")
{
    const auto dir = scratch("sim");
    const auto cfg = write_config(dir, small_config(dir));
    std::ostringstream log, err;
    REQUIRE(cmd_solve({cfg}, log, err) == 0);
    const auto first = slurp(dir / "phi.csv");
    const auto manifest = slurp(dir / "manifest.json");
    REQUIRE(cmd_solve({cfg}, log, err) == 0);
    CHECK(slurp(dir / "phi.csv") == first);
    CHECK(slurp(dir / "manifest.json") == manifest);

    SimulateArgs args{cfg, dir, dir / "a.json"};
    REQUIRE(cmd_simulate(args, log, err) == 0);
    args.out = dir / "b.json";
    args.threads = 2;
    REQUIRE(cmd_simulate(args, log, err) == 0);
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    const auto result = json::parse(slurp(dir / "a.json"));
    CHECK(result.contains("phi_comparison"));
    CHECK(result["j_estimate"]["se"].get<double>() > 0.0);

    args.policy_dir = dir / "nope";
    CHECK(cmd_simulate(args, log, err) == 2);
}

TEST_CASE("fit command")
{
    const auto dir = scratch("fit");
    const auto ds = testing::synthetic_dataset(GrowthCurve::logistic(0.1, 0.03), 9.0, 12.0);
    {
        std::ofstream daily(dir / "daily.csv");
        daily.precision(17);
        daily << "day,mean_weight_g,sample_count\n";
        for (const auto& r : ds.daily) daily << r.day << "," << r.mean_weight << "," << r.count << "\n";
        std::ofstream intensive(dir / "intensive.csv");
        intensive.precision(17);
        intensive << "weight_g\n";
        for (double w : ds.intensive.samples) intensive << w << "\n";
    }
    std::ostringstream log, err;
    FitArgs args{dir / "daily.csv", dir / "intensive.csv", 100.0, "logistic", dir / "model.json"};
    REQUIRE(cmd_fit(args, log, err) == 0);
    const auto model = json::parse(slurp(dir / "model.json"));
    CHECK(model["f0"].get<double>() == doctest::Approx(0.1).epsilon(0.01));
    CHECK(model["r"].get<double>() == doctest::Approx(0.03).epsilon(0.01));
    CHECK(fs::exists(dir / "model.curve.csv"));
    CHECK(slurp(dir / "model.curve.csv").rfind("day,model_mean_g,model_std_g\n", 0) == 0);

    args.variant = "logistic-tv";
    args.out_json = dir / "tv.json";
    REQUIRE(cmd_fit(args, log, err) == 0);
    CHECK(json::parse(slurp(dir / "tv.json"))["r1"].get<double>() <= 1e-5);

    // A config can point at a fitted model instead of explicit parameters.
    auto cfg = small_config(dir / "run");
    cfg["growth"] = {{"model_json", "model.json"}};
    std::ofstream(dir / "from_model.json") << cfg.dump();
    const auto parsed = load_config(dir / "from_model.json");
    CHECK(parsed.growth.variant == GrowthVariant::Logistic);
    CHECK(parsed.growth.r == model["r"].get<double>());

    args.daily_csv = dir / "absent.csv";
    std::ostringstream err2;
    CHECK(cmd_fit(args, log, err2) == 2);
    CHECK(err2.str().find("absent.csv") != std::string::npos);
}

TEST_CASE("executable exit codes")
{
    const auto dir = scratch("exe");
    CHECK(run_cli("") != 0);
    CHECK(run_cli("solve --config " + (dir / "missing.json").string()) == 2);
    const auto cfg = write_config(dir, small_config(dir / "out"));
    CHECK(run_cli("solve --config " + cfg.string() + " --stride 500") == 0);
    CHECK(read_matrix_csv(dir / "out" / "phi.csv").t.size() == 3);
    CHECK(run_cli("simulate --config " + cfg.string() + " --policy " + (dir / "out").string() + " --seed 5") == 0);
    CHECK(run_cli("simulate --config " + cfg.string() + " --policy " + (dir / "none").string()) == 2);
    CHECK(run_cli("report " + (dir / "out").string() + " --out " + (dir / "r.csv").string()) == 0);
}
