#include "core/evaluation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/textio.hpp"

namespace fxcast {

namespace {

void check_pair(const Vec& pred, const Vec& actual, const char* op) {
  require(!pred.empty() && pred.size() == actual.size(), ErrorCode::InvalidArgument,
          std::string(op) + ": empty input or length mismatch");
}

}  // namespace

double mse(const Vec& pred, const Vec& actual) {
  check_pair(pred, actual, "mse");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double diff = pred[i] - actual[i];
    sum += diff * diff;
  }
  return sum / static_cast<double>(pred.size());
}

double rmse(const Vec& pred, const Vec& actual) { return std::sqrt(mse(pred, actual)); }

double r_square(const Vec& pred, const Vec& actual) {
  check_pair(pred, actual, "r_square");
  require(pred.size() >= 2, ErrorCode::DegenerateVariance,
          "r_square: need at least 2 points");
  double mean = 0.0;
  for (double y : actual) mean += y;
  mean /= static_cast<double>(actual.size());

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ss_res += (actual[i] - pred[i]) * (actual[i] - pred[i]);
    ss_tot += (actual[i] - mean) * (actual[i] - mean);
  }
  require(ss_tot != 0.0, ErrorCode::DegenerateVariance,
          "r_square: actual values are constant, variance is zero");
  return 1.0 - ss_res / ss_tot;
}

EvalReport eval_metrics(const Vec& pred, const Vec& actual, std::string model_label,
                        std::string dataset_label) {
  EvalReport report;
  report.model_label = std::move(model_label);
  report.dataset_label = std::move(dataset_label);
  report.n = pred.size();
  report.mse = mse(pred, actual);
  report.rmse = std::sqrt(report.mse);
  report.r_square = r_square(pred, actual);
  return report;
}

EvalReport evaluate(const ModelParams& params, const SplitDataset& data,
                    const std::string& dataset_label) {
  require(!data.test.empty(), ErrorCode::InvalidArgument, "evaluate: empty test partition");
  Vec pred;
  Vec actual;
  pred.reserve(data.test.size());
  actual.reserve(data.test.size());
  for (const WindowSample& s : data.test) {
    const double y = model_forward(params, s.inputs).prediction;
    pred.push_back(data.scaler.invert_target(y));
    actual.push_back(data.scaler.invert_target(s.target));
  }
  return eval_metrics(pred, actual, variant_table_label(params.spec.variant), dataset_label);
}

std::vector<EvalReport> compare(const std::vector<ModelSpec>& specs, const SplitDataset& data,
                                const TrainConfig& config, const std::string& dataset_label) {
  require(!specs.empty(), ErrorCode::InvalidArgument, "compare: no model specs given");
  std::vector<EvalReport> reports;
  reports.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    TrainConfig variant_config = config;
    variant_config.seed = config.seed + i;  // independent init per variant
    auto [params, report] = train(specs[i], data, variant_config);
    (void)report;
    reports.push_back(evaluate(params, data, dataset_label));
  }
  return reports;
}

std::string format_comparison_table(const std::vector<EvalReport>& reports) {
  std::size_t label_width = std::string("Model").size();
  for (const EvalReport& r : reports) label_width = std::max(label_width, r.model_label.size());

  auto pad = [](std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };

  std::string out = pad("Model", label_width + 2) + pad("MSE", 14) + pad("RMSE", 14) +
                    pad("R-Square", 14) + "n\n";
  for (const EvalReport& r : reports) {
    out += pad(r.model_label, label_width + 2);
    out += pad(fmt_sig(r.mse, 6), 14);
    out += pad(fmt_sig(r.rmse, 6), 14);
    out += pad(fmt_sig(r.r_square, 6), 14);
    out += std::to_string(r.n);
    out += '\n';
  }
  return out;
}

void export_predictions_csv(const std::vector<PredictionRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << "timestamp,actual,predicted\n";
  for (const PredictionRow& r : rows) {
    out << r.timestamp << ',' << fmt_sig(r.actual, 10) << ',' << fmt_sig(r.predicted, 10)
        << '\n';
  }
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

void export_comparison_csv(const std::vector<EvalReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << "variant,mse,rmse,r_square,n\n";
  for (const EvalReport& r : reports) {
    out << r.model_label << ',' << fmt_sig(r.mse, 10) << ',' << fmt_sig(r.rmse, 10) << ','
        << fmt_sig(r.r_square, 10) << ',' << r.n << '\n';
  }
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace fxcast
