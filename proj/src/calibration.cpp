#include "sizespec/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <tuple>

#include "sizespec/errors.hpp"
#include "sizespec/nelder_mead.hpp"

namespace sizespec {

double IntensiveSurvey::mean() const
{
    if (samples.empty()) throw InputError("intensive survey: no samples, variance undefined");
    return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double IntensiveSurvey::variance() const
{
    if (samples.size() < 2) throw InputError("intensive survey: fewer than two samples, variance undefined");
    const double m = mean();
    double ss = 0.0;
    for (double w : samples) ss += (w - m) * (w - m);
    return ss / static_cast<double>(samples.size() - 1);
}

void SurveyDataset::validate() const
{
    if (daily.empty()) throw InputError("dataset: no daily records");
    for (std::size_t i = 0; i < daily.size(); ++i) {
        const auto& rec = daily[i];
        const std::string where = "daily record " + std::to_string(i + 1);
        if (!(rec.day >= 0.0) || !std::isfinite(rec.day)) throw InputError(where + ": day must be >= 0");
        if (!(rec.mean_weight > 0.0) || !std::isfinite(rec.mean_weight))
            throw InputError(where + ": mean weight must be > 0");
        if (rec.count < 1) throw InputError(where + ": sample count must be >= 1");
    }
    if (!(intensive.day >= 0.0)) throw InputError("intensive survey: day must be >= 0");
    if (intensive.samples.size() < 2)
        throw InputError("intensive survey: fewer than two samples, variance undefined");
    for (std::size_t i = 0; i < intensive.samples.size(); ++i)
        if (!(intensive.samples[i] > 0.0) || !std::isfinite(intensive.samples[i]))
            throw InputError("intensive sample " + std::to_string(i + 1) + ": weight must be > 0");
    if (!(intensive.variance() > 0.0)) throw InputError("intensive survey: zero variance");
}

MomentMatch moment_match(double intensive_mean, double intensive_var, double f_at_survey)
{
    if (!(intensive_mean > 0.0) || !(intensive_var > 0.0))
        throw std::domain_error("moment_match: mean and variance must be positive");
    if (!(f_at_survey > 0.0 && f_at_survey <= 1.0))
        throw std::domain_error("moment_match: growth fraction must lie in (0,1]");
    return {intensive_mean * intensive_mean / intensive_var, intensive_var / (intensive_mean * f_at_survey)};
}

double wls_error(const SurveyDataset& dataset, const GrowthCurve& curve)
{
    // The model mean is alpha beta f(t) with alpha beta = mean_I / f(t_I).
    const double mean_i = dataset.intensive.mean();
    const double f_i = curve(dataset.intensive.day);
    const double scale = mean_i / f_i;

    double weighted = 0.0;
    double total = 0.0;
    for (const auto& rec : dataset.daily) {
        const double diff = rec.mean_weight - scale * curve(rec.day);
        weighted += rec.count * diff * diff;
        total += rec.count;
    }
    return weighted / total;
}

namespace {

constexpr double f0_floor = 1e-12;

double logistic_map(double z)
{
    const double f = 1.0 / (1.0 + std::exp(-z));
    return std::clamp(f, f0_floor, 1.0 - f0_floor);
}

double logit(double f) { return std::log(f / (1.0 - f)); }

GrowthCurve curve_from_parameters(GrowthVariant variant, const std::vector<double>& z)
{
    const double f0 = logistic_map(z[0]);
    switch (variant) {
    case GrowthVariant::VonBertalanffy: return GrowthCurve::von_bertalanffy(f0, std::exp(z[1]));
    case GrowthVariant::Logistic: return GrowthCurve::logistic(f0, std::exp(z[1]));
    case GrowthVariant::LogisticTimeVarying:
        return GrowthCurve::logistic_time_varying(f0, std::exp(z[1]), std::exp(z[2]));
    }
    throw std::logic_error("unreachable growth variant");
}

std::vector<std::vector<double>> start_schedule(GrowthVariant variant)
{
    static const double f0_starts[] = {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.7};
    static const double r_starts[] = {1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1, 2e-1};
    static const double r0_starts[] = {1e-3, 1e-2, 3e-2, 1e-1};
    static const double r1_starts[] = {1e-6, 1e-5, 1e-4, 1e-3};

    std::vector<std::vector<double>> starts;
    for (double f0 : f0_starts) {
        if (variant == GrowthVariant::LogisticTimeVarying) {
            for (double r0 : r0_starts)
                for (double r1 : r1_starts) starts.push_back({logit(f0), std::log(r0), std::log(r1)});
        } else {
            for (double r : r_starts) starts.push_back({logit(f0), std::log(r)});
        }
    }
    return starts;
}

}  // namespace

FittedModel fit_growth(const SurveyDataset& dataset, GrowthVariant variant)
{
    dataset.validate();

    // Canonical record order so the floating-point sums do not depend on
    // the input ordering.
    SurveyDataset canonical = dataset;
    std::sort(canonical.daily.begin(), canonical.daily.end(), [](const DailyRecord& a, const DailyRecord& b) {
        return std::tie(a.day, a.mean_weight, a.count) < std::tie(b.day, b.mean_weight, b.count);
    });

    const auto objective = [&](const std::vector<double>& z) {
        try {
            return wls_error(canonical, curve_from_parameters(variant, z));
        } catch (const std::domain_error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const auto starts = start_schedule(variant);
    NelderMeadResult best;
    best.value = std::numeric_limits<double>::infinity();
    bool have_best = false;
    for (const auto& start : starts) {
        NelderMeadResult run = nelder_mead(objective, start);
        if (!std::isfinite(run.value)) continue;
        // Lowest error wins; exact ties go to the lexicographically smaller vector.
        if (!have_best || run.value < best.value || (run.value == best.value && run.x < best.x)) {
            best = std::move(run);
            have_best = true;
        }
    }
    if (!have_best)
        throw NumericalError("fit_growth: all " + std::to_string(starts.size()) +
                             " starts produced non-finite error");

    const GrowthCurve curve = curve_from_parameters(variant, best.x);
    const auto mm = moment_match(canonical.intensive.mean(), canonical.intensive.variance(),
                                 curve(canonical.intensive.day));
    FitDiagnostics diag{best.iterations, static_cast<int>(starts.size()), best.converged};
    return FittedModel{SizeSpectrum(mm.alpha, mm.beta, curve), best.value, diag};
}

AllometryFit fit_allometry(const std::vector<std::pair<double, double>>& length_weight)
{
    const std::size_t n = length_weight.size();
    if (n < 3) throw InputError("fit_allometry: need at least three (length, weight) pairs");
    for (const auto& [l, w] : length_weight)
        if (!(l > 0.0) || !(w > 0.0)) throw InputError("fit_allometry: lengths and weights must be positive");

    // log w = log a + b log l by ordinary least squares.
    double sx = 0.0, sy = 0.0;
    for (const auto& [l, w] : length_weight) {
        sx += std::log(l);
        sy += std::log(w);
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [l, w] : length_weight) {
        const double dx = std::log(l) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(w) - my);
    }
    if (!(sxx > 1e-14 * n)) throw InputError("fit_allometry: all lengths are equal, exponent undetermined");
    const double b0 = sxy / sxx;
    const double a0 = std::exp(my - b0 * mx);
    const Allometry initializer(a0, b0);

    // Levenberg-Marquardt on sum (w - a l^b)^2 in (log a, b).
    const auto sse = [&](double log_a, double b) {
        double s = 0.0;
        for (const auto& [l, w] : length_weight) {
            const double r = w - std::exp(log_a + b * std::log(l));
            s += r * r;
        }
        return s;
    };
    double log_a = std::log(a0), b = b0;
    double current = sse(log_a, b);
    double damping = 1e-3;
    for (int iter = 0; iter < 200; ++iter) {
        double j11 = 0.0, j12 = 0.0, j22 = 0.0, g1 = 0.0, g2 = 0.0;
        for (const auto& [l, w] : length_weight) {
            const double model = std::exp(log_a + b * std::log(l));
            const double r = w - model;
            const double d1 = model;                 // d model / d log a
            const double d2 = model * std::log(l);   // d model / d b
            j11 += d1 * d1;
            j12 += d1 * d2;
            j22 += d2 * d2;
            g1 += d1 * r;
            g2 += d2 * r;
        }
        bool improved = false;
        while (damping < 1e12) {
            const double a11 = j11 * (1.0 + damping), a22 = j22 * (1.0 + damping);
            const double det = a11 * a22 - j12 * j12;
            const double step1 = (a22 * g1 - j12 * g2) / det;
            const double step2 = (a11 * g2 - j12 * g1) / det;
            const double trial = sse(log_a + step1, b + step2);
            if (std::isfinite(trial) && trial <= current) {
                log_a += step1;
                b += step2;
                const double change = current - trial;
                current = trial;
                damping = std::max(damping * 0.1, 1e-12);
                improved = change > 1e-15 * std::max(current, 1e-300);
                break;
            }
            damping *= 10.0;
        }
        if (!improved) break;
    }
    return {Allometry(std::exp(log_a), b), initializer};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    fields.push_back(field);
    for (auto& f : fields) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
    }
    return fields;
}

double parse_number(const std::string& text, const std::filesystem::path& path, std::size_t line)
{
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw InputError(path.string() + ":" + std::to_string(line) + ": cannot parse number '" + text + "'");
    return value;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::vector<std::string>& header)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw InputError(path.string() + ": empty file, missing header");
    if (split_csv_line(line) != header) {
        std::string expected;
        for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
        throw InputError(path.string() + ":1: expected header '" + expected + "'");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
        fields.push_back(std::to_string(line_no));
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

SurveyDataset load_dataset(const std::filesystem::path& daily_csv, const std::filesystem::path& intensive_csv,
                           double intensive_day)
{
    SurveyDataset ds;
    for (const auto& row : read_csv(daily_csv, {"day", "mean_weight_g", "sample_count"})) {
        const auto line = static_cast<std::size_t>(std::stoul(row[3]));
        const double day = parse_number(row[0], daily_csv, line);
        const double mean = parse_number(row[1], daily_csv, line);
        const double count = parse_number(row[2], daily_csv, line);
        const std::string where = daily_csv.string() + ":" + std::to_string(line) + ": ";
        if (!(day >= 0.0)) throw InputError(where + "day must be >= 0");
        if (!(mean > 0.0)) throw InputError(where + "mean weight must be > 0");
        if (!(count >= 1.0) || count != std::floor(count))
            throw InputError(where + "sample count must be a positive integer");
        ds.daily.push_back({day, mean, static_cast<int>(count)});
    }
    ds.intensive.day = intensive_day;
    for (const auto& row : read_csv(intensive_csv, {"weight_g"})) {
        const auto line = static_cast<std::size_t>(std::stoul(row[1]));
        const double w = parse_number(row[0], intensive_csv, line);
        if (!(w > 0.0))
            throw InputError(intensive_csv.string() + ":" + std::to_string(line) + ": weight must be > 0");
        ds.intensive.samples.push_back(w);
    }
    if (ds.intensive.samples.size() < 2)
        throw InputError(intensive_csv.string() + ": fewer than two samples, variance undefined");
    ds.validate();
    return ds;
}

nlohmann::json to_json(const FittedModel& model)
{
    const auto& c = model.spectrum.curve();
    return {
        {"variant", std::string(to_string(c.variant()))},
        {"f0", c.f0()},
        {"r", c.r()},
        {"r0", c.r0()},
        {"r1", c.r1()},
        {"alpha", model.spectrum.alpha()},
        {"beta", model.spectrum.beta()},
        {"min_err", model.min_err},
        {"diagnostics",
         {{"iterations", model.diagnostics.iterations},
          {"restarts", model.diagnostics.restarts},
          {"converged", model.diagnostics.converged}}},
    };
}

FittedModel fitted_model_from_json(const nlohmann::json& j)
{
    const auto variant = parse_growth_variant(j.at("variant").get<std::string>());
    const double f0 = j.at("f0").get<double>();
    GrowthCurve curve = variant == GrowthVariant::LogisticTimeVarying
                            ? GrowthCurve::logistic_time_varying(f0, j.at("r0").get<double>(), j.at("r1").get<double>())
                        : variant == GrowthVariant::Logistic ? GrowthCurve::logistic(f0, j.at("r").get<double>())
                                                             : GrowthCurve::von_bertalanffy(f0, j.at("r").get<double>());
    FittedModel model{SizeSpectrum(j.at("alpha").get<double>(), j.at("beta").get<double>(), curve),
                      j.value("min_err", 0.0), {}};
    if (j.contains("diagnostics")) {
        const auto& d = j["diagnostics"];
        model.diagnostics = {d.value("iterations", 0), d.value("restarts", 0), d.value("converged", false)};
    }
    return model;
}

}  // namespace sizespec
