#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "actirehab/features.hpp"
#include "actirehab/model.hpp"

namespace actirehab {

double rmse(std::span<const double> y_true, std::span<const double> y_pred);

struct CvReport {
    Group group = Group::Acute;
    std::string model_name;
    std::vector<std::pair<std::string, double>> per_subject_rmse;  // held-out order
    double mean_rmse = 0.0;  // unweighted mean over subjects
    std::vector<PredictionRow> predictions;
};

// Leave-one-subject-out: each subject's scored visits are predicted by a
// model trained on every other subject of the table. The table should hold
// a single group.
CvReport loso_cv(const FeatureTable& table, const ModelSpec& spec, Group group,
                 std::string model_name);

// Fraction of scored predictions whose [lo95, hi95] contains the truth.
double interval_coverage(const std::vector<PredictionRow>& predictions);

struct CorrelationResult {
    std::vector<std::string> names;
    Eigen::VectorXd r;
    std::vector<bool> constant;  // r reported as 0 for these
};

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* constant = nullptr);

// Pearson r of each column against y (>= 3 rows).
CorrelationResult correlation_table(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    std::vector<std::string> names);

// Ten scale rows by four feature families (SAD^p, SAD^np, PNP1, PNP2), like
// the usual correlation grid. Missing columns print as "-".
std::string format_correlation_grid(const CorrelationResult& corr);

// Pearson matrix over the columns; symmetric with unit diagonal (constant
// columns get 0 off-diagonal).
Eigen::MatrixXd cross_correlation(const Eigen::MatrixXd& x);

// Descending |value|; equal magnitudes keep the order of `names`.
std::vector<std::string> rank_by_magnitude(const std::vector<std::string>& names,
                                           const std::vector<double>& values);

struct FeatureRankings {
    std::vector<std::string> by_lasso;
    std::vector<std::string> by_correlation;
};

// `names` must be listed in feature-table column order; that order breaks ties.
FeatureRankings rank_features(const std::vector<std::string>& names,
                              const std::vector<double>& lasso_coefficients,
                              const std::vector<double>& correlations);

struct SubsetResult {
    std::string label;
    std::vector<std::string> fixed_features;
    std::vector<std::string> random_features;
    CvReport report;
};

// Baseline (all selected features in both parts) plus, for each ranking
// criterion, the top ceil(fraction * m) features in the fixed part with the
// full selection kept as random-effects inputs.
std::vector<SubsetResult> subset_experiment(const FeatureTable& table, Group group,
                                            const std::vector<std::string>& selected,
                                            const FeatureRankings& rankings, double fraction,
                                            const ModelSpec& base);

std::size_t top_count(std::size_t m, double fraction);

nlohmann::json report_to_json(const CvReport& report);
void write_predictions_csv(const std::filesystem::path& path,
                           const std::vector<PredictionRow>& predictions);
void write_correlation_csv(const std::filesystem::path& path, const CorrelationResult& corr);
void write_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const Eigen::MatrixXd& m);

}  // namespace actirehab
