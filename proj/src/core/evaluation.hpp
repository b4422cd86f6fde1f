#pragma once

#include <string>
#include <vector>

#include "core/model.hpp"
#include "core/training.hpp"

namespace fxcast {

// Metrics are reported in price units after inverse scaling.
struct EvalReport {
  std::string model_label;
  std::string dataset_label;
  std::size_t n = 0;
  double mse = 0.0;
  double rmse = 0.0;
  double r_square = 0.0;
};

double mse(const Vec& pred, const Vec& actual);
double rmse(const Vec& pred, const Vec& actual);

// 1 - SS_res / SS_tot about the mean of `actual`. Throws a
// degenerate-variance error when the actuals are constant (or fewer than 2).
double r_square(const Vec& pred, const Vec& actual);

EvalReport eval_metrics(const Vec& pred, const Vec& actual, std::string model_label,
                        std::string dataset_label);

// Evaluates a trained model on the test partition in price units.
EvalReport evaluate(const ModelParams& params, const SplitDataset& data,
                    const std::string& dataset_label);

// Trains every spec on the shared split (variant i seeded with
// config.seed + i) and evaluates each on the identical test windows.
std::vector<EvalReport> compare(const std::vector<ModelSpec>& specs, const SplitDataset& data,
                                const TrainConfig& config, const std::string& dataset_label);

// Aligned text table in the MSE / RMSE / R-Square column order.
std::string format_comparison_table(const std::vector<EvalReport>& reports);

void export_predictions_csv(const std::vector<PredictionRow>& rows, const std::string& path);
void export_comparison_csv(const std::vector<EvalReport>& reports, const std::string& path);

}  // namespace fxcast
