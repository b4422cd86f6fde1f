// Command-line frontend for the fxcast engine. Talks to the engine purely
// through the C API in fxcast.h.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fxcast.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int exit_code_for(fxc_status status) {
  return status == FXC_ERR_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

int fail(fxc_status status) {
  std::fprintf(stderr, "error: %s\n", fxc_last_error());
  if (status == FXC_ERR_INVALID_ARGUMENT) {
    std::fprintf(stderr, "run 'fxcast <subcommand> --help' for usage\n");
  }
  return exit_code_for(status);
}

struct SeriesHandle {
  fxc_series* ptr = nullptr;
  ~SeriesHandle() { fxc_series_free(ptr); }
};

struct ModelHandle {
  fxc_model* ptr = nullptr;
  ~ModelHandle() { fxc_model_free(ptr); }
};

struct ReportHandle {
  fxc_train_report* ptr = nullptr;
  ~ReportHandle() { fxc_report_free(ptr); }
};

struct TableHandle {
  fxc_table* ptr = nullptr;
  ~TableHandle() { fxc_table_free(ptr); }
};

// Shared option state for subcommands that run the full pipeline.
struct PipelineOptions {
  fxc_run_config config{};
  std::string variant = "hybrid";

  void add_indicator_flags(CLI::App* cmd) {
    cmd->add_option("--sma-n", config.indicators.sma_n, "SMA window length (bars)");
    cmd->add_option("--rsi-n", config.indicators.rsi_n, "RSI window length (bars)");
    cmd->add_option("--bb-n", config.indicators.bb_n, "Bollinger window length (bars)");
    cmd->add_option("--bb-k", config.indicators.bb_k, "Bollinger band multiplier");
  }

  void add_model_flags(CLI::App* cmd) {
    cmd->add_option("--hidden-size", config.model.hidden_size, "LSTM hidden units");
    cmd->add_option("--filters", config.model.num_filters, "Conv1D filters");
    cmd->add_option("--kernel-size", config.model.kernel_size, "Conv1D kernel size");
    cmd->add_option("--lookback", config.model.lookback, "Input window length (bars)");
  }

  void add_train_flags(CLI::App* cmd) {
    cmd->add_option("--lr", config.train.learning_rate, "Adam learning rate");
    cmd->add_option("--beta1", config.train.beta1, "Adam first-moment decay");
    cmd->add_option("--beta2", config.train.beta2, "Adam second-moment decay");
    cmd->add_option("--epsilon", config.train.epsilon, "Adam epsilon");
    cmd->add_option("--epochs", config.train.epochs, "Training epochs");
    cmd->add_option("--batch-size", config.train.batch_size, "Mini-batch size");
    cmd->add_option("--seed", config.train.seed, "Master seed for all randomness");
    cmd->add_option("--patience", config.train.patience,
                    "Early-stop epochs without improvement (0 disables)");
    cmd->add_option("--val-fraction", config.train.validation_fraction,
                    "Validation share of the training partition");
    cmd->add_option("--train-fraction", config.train_fraction,
                    "Chronological train share of all windows");
    cmd->add_option("--threads", config.train.threads,
                    "Worker threads for batch gradients (0 = auto)");
  }
};

bool parse_variant(const std::string& name, fxc_variant& out) {
  if (name == "hybrid") {
    out = FXC_VARIANT_HYBRID;
  } else if (name == "lstm_only") {
    out = FXC_VARIANT_LSTM_ONLY;
  } else if (name == "cnn_only") {
    out = FXC_VARIANT_CNN_ONLY;
  } else {
    return false;
  }
  return true;
}

// Flat JSON config: keys match long flag names; command-line flags override.
// Returns tokens to inject ahead of the user's flags, or nullopt on error.
std::optional<std::vector<std::string>> config_tokens(const std::string& path,
                                                      const CLI::App* cmd) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open config '%s'\n", path.c_str());
    return std::nullopt;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: config '%s' is not valid JSON: %s\n", path.c_str(), e.what());
    return std::nullopt;
  }
  if (!j.is_object()) {
    std::fprintf(stderr, "error: config '%s' must be a flat JSON object\n", path.c_str());
    return std::nullopt;
  }
  std::vector<std::string> tokens;
  for (const auto& [key, value] : j.items()) {
    const std::string flag = "--" + key;
    if (!cmd->get_option_no_throw(flag)) {
      std::fprintf(stderr, "error: config key '%s' is not a flag of '%s'\n", key.c_str(),
                   cmd->get_name().c_str());
      return std::nullopt;
    }
    tokens.push_back(flag);
    tokens.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  return tokens;
}

int run_synth(const std::string& kind, std::int64_t bars, std::uint64_t seed, double noise,
              const std::string& out_path) {
  SeriesHandle series;
  if (auto st = fxc_series_synth(kind.c_str(), bars, seed, noise, &series.ptr); st != FXC_OK) {
    return fail(st);
  }
  if (auto st = fxc_series_save_csv(series.ptr, out_path.c_str()); st != FXC_OK) {
    return fail(st);
  }
  std::printf("wrote %lld bars to %s\n", static_cast<long long>(fxc_series_size(series.ptr)),
              out_path.c_str());
  return kExitOk;
}

int run_featurize(const std::string& input, const std::string& out_path,
                  const fxc_indicator_config& config) {
  SeriesHandle series;
  if (auto st = fxc_series_load_csv(input.c_str(), &series.ptr); st != FXC_OK) return fail(st);
  if (auto st = fxc_features_to_csv(series.ptr, &config, out_path.c_str()); st != FXC_OK) {
    return fail(st);
  }
  std::printf("wrote features to %s\n", out_path.c_str());
  return kExitOk;
}

int run_train(const std::string& input, const std::string& checkpoint,
              const std::string& loss_out, const PipelineOptions& opts) {
  fxc_run_config config = opts.config;
  if (!parse_variant(opts.variant, config.model.variant)) {
    std::fprintf(stderr, "error: unknown variant '%s'\n", opts.variant.c_str());
    return kExitUsage;
  }

  SeriesHandle series;
  if (auto st = fxc_series_load_csv(input.c_str(), &series.ptr); st != FXC_OK) return fail(st);

  ModelHandle model;
  ReportHandle report;
  if (auto st = fxc_train(series.ptr, &config, &model.ptr, &report.ptr); st != FXC_OK) {
    return fail(st);
  }

  const int epochs = fxc_report_epochs(report.ptr);
  std::printf("epochs run: %d%s\n", epochs,
              fxc_report_stopped_early(report.ptr) ? " (stopped early)" : "");
  std::printf("final train loss (scaled): %.10g\n",
              fxc_report_train_loss(report.ptr, epochs - 1));
  if (fxc_report_has_validation(report.ptr)) {
    std::printf("final val loss (scaled): %.10g\n", fxc_report_val_loss(report.ptr, epochs - 1));
  }

  if (auto st = fxc_model_save(model.ptr, checkpoint.c_str()); st != FXC_OK) return fail(st);
  std::printf("checkpoint written to %s\n", checkpoint.c_str());
  if (!loss_out.empty()) {
    if (auto st = fxc_report_save_csv(report.ptr, loss_out.c_str()); st != FXC_OK) {
      return fail(st);
    }
    std::printf("loss history written to %s\n", loss_out.c_str());
  }
  return kExitOk;
}

int run_predict(const std::string& checkpoint, const std::string& input,
                const std::string& out_path) {
  ModelHandle model;
  if (auto st = fxc_model_load(checkpoint.c_str(), &model.ptr); st != FXC_OK) return fail(st);
  SeriesHandle series;
  if (auto st = fxc_series_load_csv(input.c_str(), &series.ptr); st != FXC_OK) return fail(st);
  if (auto st = fxc_model_predict_csv(model.ptr, series.ptr, out_path.c_str());
      st != FXC_OK) {
    return fail(st);
  }
  std::printf("wrote predictions to %s\n", out_path.c_str());
  return kExitOk;
}

int run_evaluate(const std::string& checkpoint, const std::string& input) {
  ModelHandle model;
  if (auto st = fxc_model_load(checkpoint.c_str(), &model.ptr); st != FXC_OK) return fail(st);
  SeriesHandle series;
  if (auto st = fxc_series_load_csv(input.c_str(), &series.ptr); st != FXC_OK) return fail(st);

  fxc_eval_metrics metrics{};
  if (auto st = fxc_model_evaluate(model.ptr, series.ptr, &metrics); st != FXC_OK) {
    return fail(st);
  }
  std::printf("Model: %s\n", fxc_model_variant(model.ptr));
  std::printf("Dataset: %s\n", input.c_str());
  std::printf("n: %lld\n", static_cast<long long>(metrics.n));
  std::printf("MSE: %.6g\n", metrics.mse);
  std::printf("RMSE: %.6g\n", metrics.rmse);
  std::printf("R-Square: %.6g\n", metrics.r_square);
  return kExitOk;
}

int run_compare(const std::string& input, const std::string& variants_csv,
                const std::string& out_path, const PipelineOptions& opts) {
  std::vector<fxc_variant> variants;
  std::size_t start = 0;
  while (start <= variants_csv.size()) {
    const std::size_t comma = variants_csv.find(',', start);
    const std::string name = variants_csv.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    fxc_variant v;
    if (!parse_variant(name, v)) {
      std::fprintf(stderr, "error: unknown variant '%s'\n", name.c_str());
      return kExitUsage;
    }
    variants.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }

  SeriesHandle series;
  if (auto st = fxc_series_load_csv(input.c_str(), &series.ptr); st != FXC_OK) return fail(st);

  TableHandle table;
  if (auto st = fxc_compare(series.ptr, &opts.config, variants.data(), variants.size(),
                            &table.ptr);
      st != FXC_OK) {
    return fail(st);
  }

  char* text = nullptr;
  if (auto st = fxc_table_format(table.ptr, &text); st != FXC_OK) return fail(st);
  std::fputs(text, stdout);
  fxc_string_free(text);

  if (!out_path.empty()) {
    if (auto st = fxc_table_save_csv(table.ptr, out_path.c_str()); st != FXC_OK) {
      return fail(st);
    }
    std::printf("wrote comparison to %s\n", out_path.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fxcast - technical-indicator forecasting with a hybrid "
               "LSTM/Conv1D attention model"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  fxc_run_config defaults{};
  fxc_run_config_default(&defaults);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic OHLCV CSV");
  std::string synth_kind = "sine";
  std::int64_t synth_bars = 500;
  std::uint64_t synth_seed = 42;
  double synth_noise = 0.0;
  std::string synth_out;
  synth->add_option("--kind", synth_kind, "sine or random_walk");
  synth->add_option("--bars", synth_bars, "Number of hourly bars (>= 10)");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--noise", synth_noise, "Noise amplitude in [0, 0.5]");
  synth->add_option("--out", synth_out, "Output CSV path")->required();

  // featurize
  auto* featurize = app.add_subcommand("featurize", "Export the indicator feature matrix");
  std::string feat_input, feat_out;
  PipelineOptions feat_opts;
  feat_opts.config = defaults;
  featurize->add_option("--input", feat_input, "OHLCV CSV input")->required();
  featurize->add_option("--out", feat_out, "Output CSV path")->required();
  feat_opts.add_indicator_flags(featurize);

  // train
  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  std::string train_input, train_checkpoint, train_loss_out, train_config_path;
  PipelineOptions train_opts;
  train_opts.config = defaults;
  train->add_option("--input", train_input, "OHLCV CSV input")->required();
  train->add_option("--checkpoint", train_checkpoint, "Checkpoint JSON output")->required();
  train->add_option("--loss-out", train_loss_out, "Per-epoch loss CSV output");
  train->add_option("--variant", train_opts.variant, "hybrid, lstm_only or cnn_only");
  train_opts.add_indicator_flags(train);
  train_opts.add_model_flags(train);
  train_opts.add_train_flags(train);
  train->add_option("--config", train_config_path, "Flat JSON config; flags override");

  // predict
  auto* predict = app.add_subcommand("predict", "Write predicted-vs-actual CSV");
  std::string pred_checkpoint, pred_input, pred_out;
  predict->add_option("--checkpoint", pred_checkpoint, "Checkpoint JSON")->required();
  predict->add_option("--input", pred_input, "OHLCV CSV input")->required();
  predict->add_option("--out", pred_out, "Output CSV path")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Print MSE/RMSE/R-Square for a checkpoint");
  std::string eval_checkpoint, eval_input;
  evaluate->add_option("--checkpoint", eval_checkpoint, "Checkpoint JSON")->required();
  evaluate->add_option("--input", eval_input, "OHLCV CSV input")->required();

  // compare
  auto* compare = app.add_subcommand("compare", "Train and compare model variants");
  std::string cmp_input, cmp_out, cmp_config_path;
  std::string cmp_variants = "cnn_only,lstm_only,hybrid";
  PipelineOptions cmp_opts;
  cmp_opts.config = defaults;
  compare->add_option("--input", cmp_input, "OHLCV CSV input")->required();
  compare->add_option("--variants", cmp_variants, "Comma-separated variant list");
  compare->add_option("--out", cmp_out, "Comparison CSV output");
  cmp_opts.add_indicator_flags(compare);
  cmp_opts.add_model_flags(compare);
  cmp_opts.add_train_flags(compare);
  compare->add_option("--config", cmp_config_path, "Flat JSON config; flags override");

  // Inject config-file values (if any) ahead of the user's flags so that
  // explicit flags take precedence via TakeLast.
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  if (!args.empty()) {
    CLI::App* sub = nullptr;
    for (auto* s : app.get_subcommands({})) {
      if (s->get_name() == args.front()) sub = s;
    }
    std::string config_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) {
        config_path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        config_path = args[i].substr(9);
      }
    }
    if (sub && !config_path.empty()) {
      auto tokens = config_tokens(config_path, sub);
      if (!tokens) return kExitUsage;
      args.insert(args.begin() + 1, tokens->begin(), tokens->end());
    }
  }

  try {
    std::vector<const char*> cargs;
    cargs.push_back("fxcast");
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (synth->parsed()) {
    return run_synth(synth_kind, synth_bars, synth_seed, synth_noise, synth_out);
  }
  if (featurize->parsed()) {
    return run_featurize(feat_input, feat_out, feat_opts.config.indicators);
  }
  if (train->parsed()) {
    return run_train(train_input, train_checkpoint, train_loss_out, train_opts);
  }
  if (predict->parsed()) return run_predict(pred_checkpoint, pred_input, pred_out);
  if (evaluate->parsed()) return run_evaluate(eval_checkpoint, eval_input);
  if (compare->parsed()) return run_compare(cmp_input, cmp_variants, cmp_out, cmp_opts);
  return kExitUsage;
}
