#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actirehab/features.hpp"
#include "actirehab/linear_model.hpp"
#include "actirehab/lmgp.hpp"
#include "actirehab/standardize.hpp"

namespace actirehab {

enum class ModelKind { Linear, Lmgp };
// Monitoring: condition each visit on the subject's earlier scored visits.
// Cold: no conditioning, the random effect stays at its prior.
enum class PredictionMode { Monitoring, Cold };

std::string_view to_string(ModelKind k);
std::string_view to_string(PredictionMode m);
ModelKind parse_model_kind(std::string_view text);
PredictionMode parse_prediction_mode(std::string_view text);

struct ModelSpec {
    ModelKind kind = ModelKind::Lmgp;
    std::vector<std::string> fixed_features;
    std::vector<std::string> random_features;  // LMGP only
    PredictionMode mode = PredictionMode::Monitoring;
    bool interval_add_noise = false;
    LmgpOptions lmgp;
};

struct TrainedModel {
    ModelSpec spec;
    Standardizer standardizer;  // over fixed ∪ random features, training rows only
    LinearModel linear;         // the fixed part (the whole model for Linear)
    std::optional<LmgpModel> lmgp;
};

// Fits on the scored rows of `table`.
TrainedModel train_model(const FeatureTable& table, const ModelSpec& spec);

struct PredictionRow {
    std::string subject_id;
    int week = 0;
    std::optional<double> y_true;
    double y_pred = 0.0;
    double lo95 = 0.0;
    double hi95 = 0.0;
};

// Predicts every row of one subject in week order. In monitoring mode visit j
// conditions on the subject's earlier visits that carry an observed score.
std::vector<PredictionRow> predict_subject(const TrainedModel& model, const FeatureTable& rows);
// predict_subject() applied per subject (first-appearance order).
std::vector<PredictionRow> predict_table(const TrainedModel& model, const FeatureTable& table);

inline constexpr std::string_view kModelFormatVersion = "lmgp-v1";

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& doc);

}  // namespace actirehab
