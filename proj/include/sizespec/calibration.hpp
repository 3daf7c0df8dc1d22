#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "sizespec/growth.hpp"
#include "sizespec/spectrum.hpp"

namespace sizespec {

struct DailyRecord {
    double day;          // days since the season origin
    double mean_weight;  // g
    int count;           // fish in the day's catch
};

struct IntensiveSurvey {
    double day;
    std::vector<double> samples;  // individual weights, g

    double mean() const;
    // Unbiased (n - 1) sample variance.
    double variance() const;
};

/// Daily catch means plus one intensive size survey for a single season.
struct SurveyDataset {
    std::vector<DailyRecord> daily;
    IntensiveSurvey intensive;
    std::string season_origin = "May 1";

    // Throws InputError naming the first violated invariant.
    void validate() const;
};

struct FitDiagnostics {
    int iterations = 0;  // of the winning start
    int restarts = 0;    // number of starts tried
    bool converged = false;
};

struct FittedModel {
    SizeSpectrum spectrum;
    double min_err;  // g^2
    FitDiagnostics diagnostics;
};

struct MomentMatch {
    double alpha;
    double beta;
};

MomentMatch moment_match(double intensive_mean, double intensive_var, double f_at_survey);

// Weighted mean squared error between daily means and the model mean, with
// (alpha, beta) moment matched to the intensive survey for this curve.
double wls_error(const SurveyDataset& dataset, const GrowthCurve& curve);

FittedModel fit_growth(const SurveyDataset& dataset, GrowthVariant variant);

struct AllometryFit {
    Allometry model;        // raw-scale least squares
    Allometry initializer;  // log-log linear regression
};

AllometryFit fit_allometry(const std::vector<std::pair<double, double>>& length_weight);

// Daily CSV: header then `day,mean_weight_g,sample_count`.
// Intensive CSV: header then one `weight_g` per row.
SurveyDataset load_dataset(const std::filesystem::path& daily_csv, const std::filesystem::path& intensive_csv,
                           double intensive_day);

nlohmann::json to_json(const FittedModel& model);
FittedModel fitted_model_from_json(const nlohmann::json& j);

}  // namespace sizespec
