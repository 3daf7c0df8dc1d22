#include "sizespec/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "sizespec/errors.hpp"
#include "sizespec/mc.hpp"

namespace sizespec {

namespace fs = std::filesystem;
using nlohmann::json;

SizeSpectrum GrowthSpec::spectrum() const
{
    switch (variant) {
    case GrowthVariant::VonBertalanffy: return {alpha, beta, GrowthCurve::von_bertalanffy(f0, r)};
    case GrowthVariant::Logistic: return {alpha, beta, GrowthCurve::logistic(f0, r)};
    case GrowthVariant::LogisticTimeVarying: return {alpha, beta, GrowthCurve::logistic_time_varying(f0, r0, r1)};
    }
    throw std::logic_error("unreachable growth variant");
}

ControlProblem ExperimentConfig::problem() const { return {growth.spectrum(), control}; }

std::vector<std::pair<double, double>> ExperimentConfig::cells() const
{
    if (!sweep) return {{control.eta, control.psi}};
    const std::vector<double> etas = sweep->eta.empty() ? std::vector<double>{control.eta} : sweep->eta;
    const std::vector<double> psis = sweep->psi.empty() ? std::vector<double>{control.psi} : sweep->psi;
    std::vector<std::pair<double, double>> out;
    for (double e : etas)
        for (double p : psis) out.emplace_back(e, p);
    return out;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const
{
    return growth == o.growth && control == o.control && lattice == o.lattice && sweep == o.sweep &&
           output_dir == o.output_dir && mc == o.mc;
}

namespace {

double number(const json& obj, const char* section, const char* key)
{
    if (!obj.contains(key)) throw InputError(std::string("config: missing ") + section + "." + key);
    const auto& v = obj.at(key);
    if (!v.is_number()) throw InputError(std::string("config: ") + section + "." + key + " must be a number");
    return v.get<double>();
}

const json& section(const json& j, const char* name)
{
    if (!j.contains(name) || !j.at(name).is_object())
        throw InputError(std::string("config: missing object '") + name + "'");
    return j.at(name);
}

std::vector<double> number_list(const json& obj, const char* key)
{
    if (!obj.contains(key)) return {};
    const auto& v = obj.at(key);
    if (!v.is_array() || v.empty()) throw InputError(std::string("config: sweep.") + key + " must be a non-empty list");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) throw InputError(std::string("config: sweep.") + key + " entries must be numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

GrowthSpec growth_from_model(const FittedModel& m)
{
    const auto& c = m.spectrum.curve();
    return {c.variant(), c.f0(), c.r(), c.r0(), c.r1(), m.spectrum.alpha(), m.spectrum.beta()};
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json read_json_file(const fs::path& path)
{
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(path.string() + ": invalid JSON: " + e.what());
    }
}

std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

std::string cell_name(double eta, double psi) { return "eta_" + format_number(eta) + "_psi_" + format_number(psi); }

}  // namespace

ExperimentConfig parse_config(const json& j, const fs::path& base_dir)
{
    if (!j.is_object()) throw InputError("config: top level must be an object");
    ExperimentConfig c;

    const auto& g = section(j, "growth");
    if (g.contains("model_json")) {
        fs::path model_path = g.at("model_json").get<std::string>();
        if (model_path.is_relative()) model_path = base_dir / model_path;
        c.growth = growth_from_model(fitted_model_from_json(read_json_file(model_path)));
    } else {
        if (!g.contains("variant") || !g.at("variant").is_string()) throw InputError("config: missing growth.variant");
        try {
            c.growth.variant = parse_growth_variant(g.at("variant").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw InputError(std::string("config: ") + e.what());
        }
        c.growth.f0 = number(g, "growth", "f0");
        if (c.growth.variant == GrowthVariant::LogisticTimeVarying) {
            c.growth.r0 = number(g, "growth", "r0_per_day");
            c.growth.r1 = number(g, "growth", "r1_per_day2");
        } else {
            c.growth.r = number(g, "growth", "r_per_day");
        }
        c.growth.alpha = number(g, "growth", "alpha");
        c.growth.beta = number(g, "growth", "beta_g");
    }

    const auto& k = section(j, "control");
    c.control = ControlParameters{number(k, "control", "d_per_day"),
                                  number(k, "control", "k_per_day"),
                                  number(k, "control", "gamma"),
                                  number(k, "control", "kappa"),
                                  number(k, "control", "eta"),
                                  number(k, "control", "psi"),
                                  number(k, "control", "u_bar_per_day"),
                                  number(k, "control", "h_bar_individuals"),
                                  number(k, "control", "x_bar_individuals"),
                                  number(k, "control", "t0_day"),
                                  number(k, "control", "T_day")};

    const auto& l = section(j, "lattice");
    c.lattice.dt = number(l, "lattice", "dt_day");
    if (l.contains("n_w")) c.lattice.n_w = static_cast<int>(number(l, "lattice", "n_w"));
    if (l.contains("stride")) c.lattice.stride = static_cast<int>(number(l, "lattice", "stride"));
    if (c.lattice.n_w < 1) throw InputError("config: lattice.n_w must be >= 1");
    if (c.lattice.stride < 1) throw InputError("config: lattice.stride must be >= 1");

    if (j.contains("sweep")) {
        const auto& s = section(j, "sweep");
        SweepSpec sweep{number_list(s, "eta"), number_list(s, "psi")};
        if (sweep.eta.empty() && sweep.psi.empty()) throw InputError("config: sweep needs eta and/or psi lists");
        c.sweep = sweep;
    }

    if (!j.contains("output_dir") || !j.at("output_dir").is_string()) throw InputError("config: missing output_dir");
    c.output_dir = j.at("output_dir").get<std::string>();

    if (j.contains("mc")) {
        const auto& m = section(j, "mc");
        MonteCarloSpec mc;
        mc.x0 = number(m, "mc", "x0_individuals");
        mc.n_paths = static_cast<long>(number(m, "mc", "n_paths"));
        if (!m.contains("seed") || !m.at("seed").is_number_integer()) throw InputError("config: mc.seed must be an integer");
        mc.seed = m.at("seed").get<std::uint64_t>();
        if (m.contains("dt_sim_day")) mc.dt_sim = number(m, "mc", "dt_sim_day");
        c.mc = mc;
    }

    // Delegate the remaining invariants to the module constructors.
    try {
        (void)c.problem();
    } catch (const std::domain_error& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    return c;
}

ExperimentConfig load_config(const fs::path& path)
{
    return parse_config(read_json_file(path), path.parent_path());
}

json to_json(const ExperimentConfig& c)
{
    json growth{{"variant", std::string(to_string(c.growth.variant))},
                {"f0", c.growth.f0},
                {"alpha", c.growth.alpha},
                {"beta_g", c.growth.beta}};
    if (c.growth.variant == GrowthVariant::LogisticTimeVarying) {
        growth["r0_per_day"] = c.growth.r0;
        growth["r1_per_day2"] = c.growth.r1;
    } else {
        growth["r_per_day"] = c.growth.r;
    }
    const auto& k = c.control;
    json j{{"growth", growth},
           {"control",
            {{"d_per_day", k.d},
             {"k_per_day", k.k},
             {"gamma", k.gamma},
             {"kappa", k.kappa},
             {"eta", k.eta},
             {"psi", k.psi},
             {"u_bar_per_day", k.u_bar},
             {"h_bar_individuals", k.h_bar},
             {"x_bar_individuals", k.x_bar},
             {"t0_day", k.t0},
             {"T_day", k.T}}},
           {"lattice", {{"dt_day", c.lattice.dt}, {"n_w", c.lattice.n_w}, {"stride", c.lattice.stride}}},
           {"output_dir", c.output_dir.string()}};
    if (c.sweep) {
        json s = json::object();
        if (!c.sweep->eta.empty()) s["eta"] = c.sweep->eta;
        if (!c.sweep->psi.empty()) s["psi"] = c.sweep->psi;
        j["sweep"] = s;
    }
    if (c.mc) {
        json m{{"x0_individuals", c.mc->x0}, {"n_paths", c.mc->n_paths}, {"seed", c.mc->seed}};
        if (c.mc->dt_sim) m["dt_sim_day"] = *c.mc->dt_sim;
        j["mc"] = m;
    }
    return j;
}

std::string content_hash(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream ss;
    ss << std::hex << std::setw(16) << std::setfill('0') << h;
    return ss.str();
}

void write_matrix_csv(const fs::path& path, const Grid2& grid, const ControlProblem& problem, const Lattice& lattice,
                      int stride)
{
    std::string text = "t_day";
    for (int j = 0; j < grid.cols(); ++j) text += "," + format_number(lattice.x(j));
    text += "\n";
    for (int i = 0; i < grid.rows(); ++i) {
        if (i % stride != 0 && i != grid.rows() - 1) continue;
        text += format_number(lattice.time(problem, i));
        for (int j = 0; j < grid.cols(); ++j) text += "," + format_number(grid(i, j));
        text += "\n";
    }
    write_text(path, text);
}

MatrixCsv read_matrix_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    const auto parse_row = [&](const std::string& line, std::size_t line_no) {
        std::vector<double> values;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            std::string field = line.substr(start, end - start);
            if (!field.empty() && field.back() == '\r') field.pop_back();
            double v = 0.0;
            const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
            if (res.ec != std::errc() || res.ptr != field.data() + field.size())
                throw InputError(path.string() + ":" + std::to_string(line_no) + ": cannot parse '" + field + "'");
            values.push_back(v);
            start = end + 1;
        }
        return values;
    };

    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + ": empty matrix file");
    const auto comma = line.find(',');
    if (line.rfind("t_day", 0) != 0 || comma == std::string::npos)
        throw InputError(path.string() + ":1: expected header starting with t_day");
    MatrixCsv m;
    m.x = parse_row(line.substr(comma + 1), 1);
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto values = parse_row(line, line_no);
        if (values.size() != m.x.size() + 1)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": wrong number of columns");
        m.t.push_back(values.front());
        rows.push_back(std::move(values));
    }
    m.values = Grid2(static_cast<int>(rows.size()), static_cast<int>(m.x.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < m.x.size(); ++j) m.values(static_cast<int>(i), static_cast<int>(j)) = rows[i][j + 1];
    return m;
}

namespace {

template <class Body>
int guarded(std::ostream& err, Body&& body)
{
    try {
        return body();
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

json problem_json(const ControlProblem& problem)
{
    const auto& p = problem.params();
    const auto& s = problem.spectrum();
    return {{"d_per_day", p.d},
            {"k_per_day", p.k},
            {"gamma", p.gamma},
            {"kappa", p.kappa},
            {"eta", p.eta},
            {"psi", p.psi},
            {"u_bar_per_day", p.u_bar},
            {"h_bar_individuals", p.h_bar},
            {"x_bar_individuals", p.x_bar},
            {"t0_day", p.t0},
            {"T_day", p.T},
            {"alpha", s.alpha()},
            {"beta_g", s.beta()},
            {"variant", std::string(to_string(s.curve().variant()))},
            {"f0", s.curve().f0()},
            {"r_per_day", s.curve().r()},
            {"r0_per_day", s.curve().r0()},
            {"r1_per_day2", s.curve().r1()}};
}

json lattice_json(const Lattice& lat, int stride)
{
    return {{"dt_day", lat.dt},
            {"dx_individuals", lat.dx},
            {"n_t", lat.n_t},
            {"n_x", lat.n_x},
            {"n_w", lat.n_w},
            {"stride", stride},
            {"terminal_mean_weight_g", lat.terminal_mean_weight()}};
}

void write_g_field(const fs::path& path, const SolverOutput& out, const ControlProblem& problem, const Lattice& lat)
{
    std::string text = "t_day,x,q,w_g,g\n";
    for (std::size_t s = 0; s < out.g_steps.size(); ++s) {
        const std::string t = format_number(lat.time(problem, out.g_steps[s]));
        for (int j = 0; j <= out.n_x; ++j)
            for (int q = 0; q < out.n_w; ++q)
                text += t + "," + format_number(lat.x(j)) + "," + std::to_string(q) + "," +
                        format_number(lat.w_points[q].weight) + "," + format_number(out.g(s, j, q)) + "\n";
    }
    write_text(path, text);
}

}  // namespace

int cmd_fit(const FitArgs& args, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        const auto variant = parse_growth_variant(args.variant);
        const SurveyDataset ds = load_dataset(args.daily_csv, args.intensive_csv, args.survey_day);
        const FittedModel model = fit_growth(ds, variant);

        json j = to_json(model);
        j["input_hash"] = content_hash(read_file(args.daily_csv) + read_file(args.intensive_csv));
        j["survey_day"] = args.survey_day;
        if (args.out_json.has_parent_path()) fs::create_directories(args.out_json.parent_path());
        write_text(args.out_json, j.dump(2) + "\n");

        double last_day = ds.intensive.day;
        for (const auto& rec : ds.daily) last_day = std::max(last_day, rec.day);
        std::string curve = "day,model_mean_g,model_std_g\n";
        for (int day = 0; day <= static_cast<int>(std::ceil(last_day)); ++day) {
            curve += std::to_string(day) + "," + format_number(mean_weight(model.spectrum, day)) + "," +
                     format_number(std::sqrt(weight_variance(model.spectrum, day))) + "\n";
        }
        fs::path curve_path = args.out_json;
        curve_path.replace_extension(".curve.csv");
        write_text(curve_path, curve);

        log << "fit " << to_string(variant) << ": min_err = " << model.min_err << " g^2, alpha = "
            << model.spectrum.alpha() << ", beta = " << model.spectrum.beta() << "\n";
        return 0;
    });
}

int cmd_solve(const SolveArgs& args, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        ExperimentConfig config = load_config(args.config);
        if (args.out) config.output_dir = *args.out;
        if (args.stride) config.lattice.stride = *args.stride;
        if (config.lattice.stride < 1) throw InputError("stride must be >= 1");

        // Stability is checked for every cell before any work starts.
        const auto cells = config.cells();
        std::vector<ExperimentConfig> cell_configs;
        for (const auto& [eta, psi] : cells) {
            ExperimentConfig cell = config;
            cell.control.eta = eta;
            cell.control.psi = psi;
            cell.sweep.reset();
            if (config.sweep) cell.output_dir = config.output_dir / cell_name(eta, psi);
            const ControlProblem problem = cell.problem();
            if (!check_stability_bound(problem, cell.lattice.dt))
                throw InputError("dt = " + format_number(cell.lattice.dt) +
                                 " violates the stability bound dt < 1/(U + d + k U^gamma) = " +
                                 format_number(stability_bound(problem)));
            cell_configs.push_back(std::move(cell));
        }

        const std::string input_hash = content_hash(to_json(config).dump());
        std::vector<std::string> failures(cell_configs.size());
        const auto run_cell = [&](std::size_t c) {
            const ExperimentConfig& cell = cell_configs[c];
            const ControlProblem problem = cell.problem();
            const Lattice lattice = make_lattice(problem, cell.lattice.dt, cell.lattice.n_w);
            SolverOptions options;
            options.g_stride = cell.lattice.stride;
            const SolverOutput out = solve(problem, lattice, options);

            fs::create_directories(cell.output_dir);
            write_matrix_csv(cell.output_dir / "phi.csv", out.phi, problem, lattice, cell.lattice.stride);
            write_matrix_csv(cell.output_dir / "theta.csv", out.theta_hat, problem, lattice, cell.lattice.stride);
            write_matrix_csv(cell.output_dir / "G.csv", out.g_big, problem, lattice, cell.lattice.stride);
            write_matrix_csv(cell.output_dir / "policy.csv", out.theta_hat, problem, lattice, 1);
            if (args.write_g) write_g_field(cell.output_dir / "g_field.csv", out, problem, lattice);

            json files = {"phi.csv", "theta.csv", "G.csv", "policy.csv"};
            if (args.write_g) files.push_back("g_field.csv");
            const json manifest{
                {"config", to_json(cell)},
                {"input_hash", input_hash},
                {"eta", cell.control.eta},
                {"psi", cell.control.psi},
                {"problem", problem_json(problem)},
                {"lattice", lattice_json(lattice, cell.lattice.stride)},
                {"stability", {{"bound_day", stability_bound(problem)},
                               {"dt_day", lattice.dt},
                               {"pass", check_stability_bound(problem, lattice.dt)}}},
                {"bounds", {{"phi_bar", out.bounds.phi_bar},
                            {"lower_phi_checked", out.bounds.lower_phi_checked},
                            {"violations", out.bounds.violations},
                            {"worst_excess", out.bounds.worst_excess},
                            {"first_violation", out.bounds.first_violation},
                            {"min_phi", out.bounds.min_phi},
                            {"max_phi", out.bounds.max_phi},
                            {"pass", out.bounds.passed()}}},
                {"files", files}};
            write_text(cell.output_dir / "manifest.json", manifest.dump(2) + "\n");
            if (!out.bounds.passed()) failures[c] = "bound check failed: " + out.bounds.first_violation;
        };

        const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(args.threads, cell_configs.size()));
        std::vector<std::string> errors(cell_configs.size());
        const auto guarded_cell = [&](std::size_t c) {
            try {
                run_cell(c);
            } catch (const std::exception& e) {
                errors[c] = e.what();
            }
        };
        if (workers == 1) {
            for (std::size_t c = 0; c < cell_configs.size(); ++c) guarded_cell(c);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    for (std::size_t c = w; c < cell_configs.size(); c += workers) guarded_cell(c);
                });
            for (auto& t : pool) t.join();
        }

        int status = 0;
        for (std::size_t c = 0; c < cell_configs.size(); ++c) {
            const auto& cell = cell_configs[c];
            if (!errors[c].empty()) {
                err << "error: cell eta=" << cell.control.eta << " psi=" << cell.control.psi << ": " << errors[c]
                    << "\n";
                status = 1;
            } else if (!failures[c].empty()) {
                err << "error: cell eta=" << cell.control.eta << " psi=" << cell.control.psi << ": " << failures[c]
                    << "\n";
                status = 1;
            } else {
                log << "solved eta=" << cell.control.eta << " psi=" << cell.control.psi << " -> "
                    << cell.output_dir.string() << "\n";
            }
        }
        return status;
    });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        ExperimentConfig config = load_config(args.config);
        if (!config.mc) throw InputError("config: simulate needs an 'mc' section");
        if (!fs::is_directory(args.policy_dir)) throw InputError("policy directory not found: " + args.policy_dir.string());
        const fs::path manifest_path = args.policy_dir / "manifest.json";
        if (fs::exists(manifest_path)) {
            const json manifest = read_json_file(manifest_path);
            config.control.eta = manifest.at("eta").get<double>();
            config.control.psi = manifest.at("psi").get<double>();
        }
        const ControlProblem problem = config.problem();
        const Lattice lattice = make_lattice(problem, config.lattice.dt, config.lattice.n_w);
        MatrixCsv policy = read_matrix_csv(args.policy_dir / "policy.csv");
        if (policy.values.rows() != lattice.n_t + 1 || policy.values.cols() != lattice.n_x + 1)
            throw InputError("policy.csv does not match the configured lattice");

        SimulationConfig sim{problem,
                             PolicyGrid(problem.params().t0, lattice.dt, lattice.dx, policy.values),
                             std::nullopt,
                             lattice.w_points,
                             config.mc->x0,
                             config.mc->n_paths,
                             args.seed.value_or(config.mc->seed),
                             config.mc->dt_sim.value_or(lattice.dt),
                             args.threads};
        const SimulationResult r = simulate_paths(sim);

        json j{{"j_estimate", {{"value", r.j_estimate.value}, {"se", r.j_estimate.se}}},
               {"harvest_term", {{"value", r.harvest_term.value}, {"se", r.harvest_term.se}}},
               {"terminal_term", {{"value", r.terminal_term.value}, {"se", r.terminal_term.se}}},
               {"extinction_fraction", r.extinction_fraction},
               {"terminal_population",
                {{"mean", r.terminal_population.mean},
                 {"sd", r.terminal_population.sd},
                 {"min", r.terminal_population.min},
                 {"max", r.terminal_population.max}}},
               {"x0_individuals", sim.x0},
               {"n_paths", sim.n_paths},
               {"seed", sim.seed},
               {"dt_sim_day", sim.dt_sim},
               {"eta", problem.params().eta},
               {"psi", problem.params().psi},
               {"input_hash", content_hash(to_json(config).dump() + read_file(args.policy_dir / "policy.csv"))}};

        const fs::path phi_path = args.policy_dir / "phi.csv";
        if (fs::exists(phi_path) && fs::exists(manifest_path)) {
            const MatrixCsv phi = read_matrix_csv(phi_path);
            const double node = sim.x0 / lattice.dx;
            if (std::abs(node - std::round(node)) < 1e-9 && phi.values.rows() > 0) {
                const double phi0 = phi.values(0, static_cast<int>(std::lround(node)));
                const double diff = r.j_estimate.value - phi0;
                j["phi_comparison"] = {{"phi", phi0},
                                       {"difference", diff},
                                       {"three_se", 3.0 * r.j_estimate.se},
                                       {"within_three_se", std::abs(diff) <= 3.0 * r.j_estimate.se}};
            }
        }

        const fs::path out = args.out.value_or(args.policy_dir / "simulation.json");
        if (out.has_parent_path()) fs::create_directories(out.parent_path());
        write_text(out, j.dump(2) + "\n");

        if (args.paths_csv) {
            std::string text = "path,harvest_benefit,terminal_population\n";
            for (std::size_t k = 0; k < r.paths.size(); ++k)
                text += std::to_string(k) + "," + format_number(r.paths[k].harvest_benefit) + "," +
                        format_number(r.paths[k].terminal_population) + "\n";
            write_text(*args.paths_csv, text);
        }
        log << "J = " << r.j_estimate.value << " +/- " << r.j_estimate.se << " (" << sim.n_paths << " paths)\n";
        return 0;
    });
}

int cmd_report(const ReportArgs& args, std::ostream& log, std::ostream& err)
{
    return guarded(err, [&] {
        if (args.run_dirs.empty()) throw InputError("report: no run directories given");
        std::optional<json> reference_lattice;
        std::string text = "eta,psi,t,x,phi,theta,g_big\n";
        std::size_t rows = 0;
        for (const auto& dir : args.run_dirs) {
            const json manifest = read_json_file(dir / "manifest.json");
            json lat = manifest.at("lattice");
            lat["t0_day"] = manifest.at("problem").at("t0_day");
            if (!reference_lattice) {
                reference_lattice = lat;
            } else if (*reference_lattice != lat) {
                throw InputError("report: lattice of " + dir.string() + " conflicts with " +
                                 args.run_dirs.front().string());
            }
            const MatrixCsv phi = read_matrix_csv(dir / "phi.csv");
            const MatrixCsv theta = read_matrix_csv(dir / "theta.csv");
            const MatrixCsv big = read_matrix_csv(dir / "G.csv");
            if (theta.t != phi.t || big.t != phi.t || theta.x != phi.x || big.x != phi.x)
                throw InputError("report: matrices in " + dir.string() + " disagree in shape");
            const std::string eta = format_number(manifest.at("eta").get<double>());
            const std::string psi = format_number(manifest.at("psi").get<double>());
            for (std::size_t i = 0; i < phi.t.size(); ++i)
                for (std::size_t jx = 0; jx < phi.x.size(); ++jx) {
                    const int ii = static_cast<int>(i), jj = static_cast<int>(jx);
                    text += eta + "," + psi + "," + format_number(phi.t[i]) + "," + format_number(phi.x[jx]) + "," +
                            format_number(phi.values(ii, jj)) + "," + format_number(theta.values(ii, jj)) + "," +
                            format_number(big.values(ii, jj)) + "\n";
                    ++rows;
                }
        }
        if (args.out.has_parent_path()) fs::create_directories(args.out.parent_path());
        write_text(args.out, text);
        log << "report: " << rows << " rows from " << args.run_dirs.size() << " run(s) -> " << args.out.string()
            << "\n";
        return 0;
    });
}

}  // namespace sizespec
