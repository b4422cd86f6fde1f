#include "fxcast.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/dataset.hpp"
#include "core/evaluation.hpp"
#include "core/model.hpp"
#include "core/textio.hpp"
#include "core/training.hpp"

using namespace fxcast;

struct fxc_series {
  PriceSeries series;
};

// A trained model plus everything required to reproduce its predictions.
struct fxc_model {
  ModelParams params;
  IndicatorConfig indicators;
  Scaler scaler;
  std::uint64_t seed = 0;
  std::size_t epochs_trained = 0;
};

struct fxc_train_report {
  TrainReport report;
};

struct fxc_table {
  std::vector<EvalReport> reports;
};

namespace {

thread_local std::string g_last_error = "no error";

fxc_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return FXC_ERR_INVALID_ARGUMENT;
    case ErrorCode::InsufficientData: return FXC_ERR_INSUFFICIENT_DATA;
    case ErrorCode::Shape: return FXC_ERR_SHAPE;
    case ErrorCode::Format: return FXC_ERR_FORMAT;
    case ErrorCode::Ordering: return FXC_ERR_ORDERING;
    case ErrorCode::Parse: return FXC_ERR_PARSE;
    case ErrorCode::Validation: return FXC_ERR_VALIDATION;
    case ErrorCode::InvalidState: return FXC_ERR_INVALID_STATE;
    case ErrorCode::Divergence: return FXC_ERR_DIVERGENCE;
    case ErrorCode::DegenerateVariance: return FXC_ERR_DEGENERATE;
    case ErrorCode::Numeric: return FXC_ERR_NUMERIC;
    case ErrorCode::Io: return FXC_ERR_IO;
  }
  return FXC_ERR_INTERNAL;
}

template <typename Fn>
fxc_status guarded(Fn&& fn) {
  try {
    fn();
    return FXC_OK;
  } catch (const FxError& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FXC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FXC_ERR_INTERNAL;
  }
}

fxc_status fail_arg(const char* msg) {
  g_last_error = msg;
  return FXC_ERR_INVALID_ARGUMENT;
}

IndicatorConfig to_indicator_config(const fxc_indicator_config& c) {
  IndicatorConfig out;
  out.sma_n = c.sma_n;
  out.rsi_n = c.rsi_n;
  out.bb_n = c.bb_n;
  out.bb_k = c.bb_k;
  out.validate();
  return out;
}

ModelSpec to_model_spec(const fxc_model_config& c, std::size_t input_size) {
  require(c.hidden_size >= 1 && c.num_filters >= 1 && c.kernel_size >= 1 && c.lookback >= 2,
          ErrorCode::InvalidArgument, "model config fields must be positive (lookback >= 2)");
  ModelSpec spec;
  switch (c.variant) {
    case FXC_VARIANT_HYBRID: spec.variant = Variant::Hybrid; break;
    case FXC_VARIANT_LSTM_ONLY: spec.variant = Variant::LstmOnly; break;
    case FXC_VARIANT_CNN_ONLY: spec.variant = Variant::CnnOnly; break;
    default: raise(ErrorCode::InvalidArgument, "unknown variant enum value");
  }
  spec.input_size = input_size;
  spec.hidden_size = static_cast<std::size_t>(c.hidden_size);
  spec.num_filters = static_cast<std::size_t>(c.num_filters);
  spec.kernel_size = static_cast<std::size_t>(c.kernel_size);
  spec.lookback = static_cast<std::size_t>(c.lookback);
  spec.validate();
  return spec;
}

TrainConfig to_train_config(const fxc_train_config& c) {
  require(c.epochs >= 1 && c.batch_size >= 1, ErrorCode::InvalidArgument,
          "train config: epochs and batch_size must be >= 1");
  require(c.patience >= 0 && c.threads >= 0, ErrorCode::InvalidArgument,
          "train config: patience and threads must be >= 0");
  TrainConfig out;
  out.learning_rate = c.learning_rate;
  out.beta1 = c.beta1;
  out.beta2 = c.beta2;
  out.epsilon = c.epsilon;
  out.epochs = static_cast<std::size_t>(c.epochs);
  out.batch_size = static_cast<std::size_t>(c.batch_size);
  out.seed = c.seed;
  out.patience = static_cast<std::size_t>(c.patience);
  out.validation_fraction = c.validation_fraction;
  out.threads = static_cast<std::size_t>(c.threads);
  out.validate();
  return out;
}

SplitDataset build_split(const PriceSeries& series, const fxc_run_config& config,
                         std::size_t lookback) {
  const FeatureMatrix features =
      build_feature_matrix(series, to_indicator_config(config.indicators));
  auto windows = make_windows(features, lookback);
  return chronological_split(std::move(windows), config.train_fraction);
}

}  // namespace

extern "C" {

const char* fxc_last_error(void) { return g_last_error.c_str(); }

void fxc_indicator_config_default(fxc_indicator_config* out) {
  if (!out) return;
  *out = {20, 14, 20, 2.0};
}

void fxc_model_config_default(fxc_model_config* out) {
  if (!out) return;
  *out = {FXC_VARIANT_HYBRID, 64, 32, 3, 60};
}

void fxc_train_config_default(fxc_train_config* out) {
  if (!out) return;
  *out = {1e-3, 0.9, 0.999, 1e-8, 100, 64, 42u, 10, 0.1, 0};
}

void fxc_run_config_default(fxc_run_config* out) {
  if (!out) return;
  fxc_indicator_config_default(&out->indicators);
  fxc_model_config_default(&out->model);
  fxc_train_config_default(&out->train);
  out->train_fraction = 0.8;
}

fxc_status fxc_series_synth(const char* kind, int64_t bars, uint64_t seed, double noise,
                            fxc_series** out) {
  if (!kind || !out) return fail_arg("fxc_series_synth: NULL argument");
  *out = nullptr;
  return guarded([&] {
    require(bars >= 0, ErrorCode::InvalidArgument, "gen_synthetic: bars must be >= 10");
    auto handle = std::make_unique<fxc_series>();
    handle->series =
        gen_synthetic(synth_kind_from_string(kind), static_cast<std::size_t>(bars), seed, noise);
    *out = handle.release();
  });
}

fxc_status fxc_series_load_csv(const char* path, fxc_series** out) {
  if (!path || !out) return fail_arg("fxc_series_load_csv: NULL argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<fxc_series>();
    handle->series = load_ohlc_csv(path);
    *out = handle.release();
  });
}

fxc_status fxc_series_save_csv(const fxc_series* series, const char* path) {
  if (!series || !path) return fail_arg("fxc_series_save_csv: NULL argument");
  return guarded([&] { save_ohlc_csv(series->series, path); });
}

int64_t fxc_series_size(const fxc_series* series) {
  return series ? static_cast<int64_t>(series->series.candles.size()) : 0;
}

void fxc_series_free(fxc_series* series) { delete series; }

fxc_status fxc_features_to_csv(const fxc_series* series, const fxc_indicator_config* config,
                               const char* path) {
  if (!series || !config || !path) return fail_arg("fxc_features_to_csv: NULL argument");
  return guarded([&] {
    const FeatureMatrix features =
        build_feature_matrix(series->series, to_indicator_config(*config));
    save_features_csv(features, path);
  });
}

fxc_status fxc_train(const fxc_series* series, const fxc_run_config* config,
                     fxc_model** out_model, fxc_train_report** out_report) {
  if (!series || !config) return fail_arg("fxc_train: NULL argument");
  if (out_model) *out_model = nullptr;
  if (out_report) *out_report = nullptr;
  return guarded([&] {
    const TrainConfig train_config = to_train_config(config->train);
    const ModelSpec spec = to_model_spec(config->model, kFeatureCount);
    SplitDataset data = build_split(series->series, *config, spec.lookback);
    auto [params, report] = train(spec, data, train_config);

    if (out_model) {
      auto model = std::make_unique<fxc_model>();
      model->params = std::move(params);
      model->indicators = to_indicator_config(config->indicators);
      model->scaler = data.scaler;
      model->seed = train_config.seed;
      model->epochs_trained = report.epochs_run;
      *out_model = model.release();
    }
    if (out_report) {
      auto rep = std::make_unique<fxc_train_report>();
      rep->report = std::move(report);
      *out_report = rep.release();
    }
  });
}

int fxc_report_epochs(const fxc_train_report* report) {
  return report ? static_cast<int>(report->report.epochs_run) : 0;
}

int fxc_report_stopped_early(const fxc_train_report* report) {
  return report && report->report.stopped_early ? 1 : 0;
}

int fxc_report_has_validation(const fxc_train_report* report) {
  return report && !report->report.val_loss.empty() ? 1 : 0;
}

double fxc_report_train_loss(const fxc_train_report* report, int epoch) {
  if (!report || epoch < 0 ||
      static_cast<std::size_t>(epoch) >= report->report.train_loss.size()) {
    return std::nan("");
  }
  return report->report.train_loss[static_cast<std::size_t>(epoch)];
}

double fxc_report_val_loss(const fxc_train_report* report, int epoch) {
  if (!report || epoch < 0 ||
      static_cast<std::size_t>(epoch) >= report->report.val_loss.size()) {
    return std::nan("");
  }
  return report->report.val_loss[static_cast<std::size_t>(epoch)];
}

fxc_status fxc_report_save_csv(const fxc_train_report* report, const char* path) {
  if (!report || !path) return fail_arg("fxc_report_save_csv: NULL argument");
  return guarded([&] {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::Io, std::string("cannot open '") + path + "' for writing");
    out << "epoch,train_loss,val_loss\n";
    const TrainReport& r = report->report;
    for (std::size_t i = 0; i < r.train_loss.size(); ++i) {
      out << (i + 1) << ',' << fmt_sig(r.train_loss[i], 10) << ',';
      if (i < r.val_loss.size()) out << fmt_sig(r.val_loss[i], 10);
      out << '\n';
    }
    if (!out) raise(ErrorCode::Io, std::string("write failed for '") + path + "'");
  });
}

void fxc_report_free(fxc_train_report* report) { delete report; }

fxc_status fxc_model_save(const fxc_model* model, const char* path) {
  if (!model || !path) return fail_arg("fxc_model_save: NULL argument");
  return guarded([&] {
    Checkpoint ckpt;
    ckpt.params = model->params;
    ckpt.indicators = model->indicators;
    ckpt.scaler = model->scaler;
    ckpt.seed = model->seed;
    ckpt.epochs_trained = model->epochs_trained;
    save_checkpoint(ckpt, path);
  });
}

fxc_status fxc_model_load(const char* path, fxc_model** out) {
  if (!path || !out) return fail_arg("fxc_model_load: NULL argument");
  *out = nullptr;
  return guarded([&] {
    Checkpoint ckpt = load_checkpoint(path);
    auto model = std::make_unique<fxc_model>();
    model->params = std::move(ckpt.params);
    model->indicators = ckpt.indicators;
    model->scaler = std::move(ckpt.scaler);
    model->seed = ckpt.seed;
    model->epochs_trained = ckpt.epochs_trained;
    *out = model.release();
  });
}

const char* fxc_model_variant(const fxc_model* model) {
  return model ? variant_name(model->params.spec.variant) : "";
}

fxc_status fxc_model_predict_csv(const fxc_model* model, const fxc_series* series,
                                 const char* out_path) {
  if (!model || !series || !out_path) return fail_arg("fxc_model_predict_csv: NULL argument");
  return guarded([&] {
    const FeatureMatrix features = build_feature_matrix(series->series, model->indicators);
    const auto rows = predict_series(model->params, features, model->scaler);
    export_predictions_csv(rows, out_path);
  });
}

fxc_status fxc_model_evaluate(const fxc_model* model, const fxc_series* series,
                              fxc_eval_metrics* out) {
  if (!model || !series || !out) return fail_arg("fxc_model_evaluate: NULL argument");
  return guarded([&] {
    const FeatureMatrix features = build_feature_matrix(series->series, model->indicators);
    const auto rows = predict_series(model->params, features, model->scaler);
    Vec pred, actual;
    pred.reserve(rows.size());
    actual.reserve(rows.size());
    for (const PredictionRow& r : rows) {
      pred.push_back(r.predicted);
      actual.push_back(r.actual);
    }
    const EvalReport report =
        eval_metrics(pred, actual, variant_table_label(model->params.spec.variant), "");
    out->n = static_cast<int64_t>(report.n);
    out->mse = report.mse;
    out->rmse = report.rmse;
    out->r_square = report.r_square;
  });
}

void fxc_model_free(fxc_model* model) { delete model; }

fxc_status fxc_compare(const fxc_series* series, const fxc_run_config* config,
                       const fxc_variant* variants, size_t n_variants, fxc_table** out) {
  if (!series || !config || !variants || !out) return fail_arg("fxc_compare: NULL argument");
  *out = nullptr;
  return guarded([&] {
    require(n_variants >= 1, ErrorCode::InvalidArgument, "compare: no variants given");
    const TrainConfig train_config = to_train_config(config->train);
    std::vector<ModelSpec> specs;
    specs.reserve(n_variants);
    for (std::size_t i = 0; i < n_variants; ++i) {
      fxc_model_config mc = config->model;
      mc.variant = variants[i];
      specs.push_back(to_model_spec(mc, kFeatureCount));
    }
    SplitDataset data = build_split(series->series, *config, specs.front().lookback);
    auto table = std::make_unique<fxc_table>();
    table->reports = compare(specs, data, train_config, "");
    *out = table.release();
  });
}

size_t fxc_table_rows(const fxc_table* table) { return table ? table->reports.size() : 0; }

const char* fxc_table_label(const fxc_table* table, size_t row) {
  if (!table || row >= table->reports.size()) return "";
  return table->reports[row].model_label.c_str();
}

fxc_status fxc_table_metrics(const fxc_table* table, size_t row, fxc_eval_metrics* out) {
  if (!table || !out) return fail_arg("fxc_table_metrics: NULL argument");
  if (row >= table->reports.size()) return fail_arg("fxc_table_metrics: row out of range");
  const EvalReport& r = table->reports[row];
  out->n = static_cast<int64_t>(r.n);
  out->mse = r.mse;
  out->rmse = r.rmse;
  out->r_square = r.r_square;
  return FXC_OK;
}

fxc_status fxc_table_format(const fxc_table* table, char** out) {
  if (!table || !out) return fail_arg("fxc_table_format: NULL argument");
  *out = nullptr;
  return guarded([&] {
    const std::string text = format_comparison_table(table->reports);
    char* buf = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buf) throw std::bad_alloc();
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out = buf;
  });
}

fxc_status fxc_table_save_csv(const fxc_table* table, const char* path) {
  if (!table || !path) return fail_arg("fxc_table_save_csv: NULL argument");
  return guarded([&] { export_comparison_csv(table->reports, path); });
}

void fxc_table_free(fxc_table* table) { delete table; }

void fxc_string_free(char* s) { std::free(s); }

}  // extern "C"
