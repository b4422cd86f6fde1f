/*
 * fxcast - next-bar close forecasting from technical indicators with a
 * parallel LSTM / causal-Conv1D trunk fused by softmax attention.
 *
 * C interface to the engine. Every entry point returns an fxc_status; on
 * failure fxc_last_error() describes what went wrong (thread-local). Opaque
 * handles own their resources and are released with the matching _free call.
 */
#ifndef FXCAST_H
#define FXCAST_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FXCAST_BUILD)
#    define FXCAST_API __declspec(dllexport)
#  else
#    define FXCAST_API __declspec(dllimport)
#  endif
#else
#  define FXCAST_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fxc_status {
  FXC_OK = 0,
  FXC_ERR_INVALID_ARGUMENT = 1,
  FXC_ERR_INSUFFICIENT_DATA = 2,
  FXC_ERR_SHAPE = 3,
  FXC_ERR_FORMAT = 4,
  FXC_ERR_ORDERING = 5,
  FXC_ERR_PARSE = 6,
  FXC_ERR_VALIDATION = 7,
  FXC_ERR_INVALID_STATE = 8,
  FXC_ERR_DIVERGENCE = 9,
  FXC_ERR_DEGENERATE = 10,
  FXC_ERR_NUMERIC = 11,
  FXC_ERR_IO = 12,
  FXC_ERR_INTERNAL = 13
} fxc_status;

typedef enum fxc_variant {
  FXC_VARIANT_HYBRID = 0,
  FXC_VARIANT_LSTM_ONLY = 1,
  FXC_VARIANT_CNN_ONLY = 2
} fxc_variant;

typedef struct fxc_indicator_config {
  int sma_n;    /* SMA window, bars */
  int rsi_n;    /* RSI window, bars */
  int bb_n;     /* Bollinger window, bars */
  double bb_k;  /* Bollinger band multiplier */
} fxc_indicator_config;

typedef struct fxc_model_config {
  fxc_variant variant;
  int hidden_size;  /* LSTM units H */
  int num_filters;  /* Conv1D filters F */
  int kernel_size;  /* Conv1D kernel K */
  int lookback;     /* window length L, bars */
} fxc_model_config;

typedef struct fxc_train_config {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  int epochs;
  int batch_size;
  uint64_t seed;
  int patience;               /* early-stop epochs without improvement; 0 disables */
  double validation_fraction; /* chronologically last slice of train, [0, 1) */
  int threads;                /* 0 = hardware concurrency */
} fxc_train_config;

typedef struct fxc_run_config {
  fxc_indicator_config indicators;
  fxc_model_config model;
  fxc_train_config train;
  double train_fraction; /* chronological train share, (0, 1) */
} fxc_run_config;

typedef struct fxc_eval_metrics {
  int64_t n;
  double mse;      /* price^2 units */
  double rmse;     /* price units */
  double r_square;
} fxc_eval_metrics;

typedef struct fxc_series fxc_series;
typedef struct fxc_model fxc_model;
typedef struct fxc_train_report fxc_train_report;
typedef struct fxc_table fxc_table;

/* Message for the most recent failure on this thread; never NULL. */
FXCAST_API const char* fxc_last_error(void);

FXCAST_API void fxc_indicator_config_default(fxc_indicator_config* out);
FXCAST_API void fxc_model_config_default(fxc_model_config* out);
FXCAST_API void fxc_train_config_default(fxc_train_config* out);
FXCAST_API void fxc_run_config_default(fxc_run_config* out);

/* --- price series ------------------------------------------------------- */

/* kind is "sine" or "random_walk"; bars >= 10, noise in [0, 0.5]. */
FXCAST_API fxc_status fxc_series_synth(const char* kind, int64_t bars, uint64_t seed,
                                       double noise, fxc_series** out);
FXCAST_API fxc_status fxc_series_load_csv(const char* path, fxc_series** out);
FXCAST_API fxc_status fxc_series_save_csv(const fxc_series* series, const char* path);
FXCAST_API int64_t fxc_series_size(const fxc_series* series);
FXCAST_API void fxc_series_free(fxc_series* series);

/* Indicator feature matrix exported as CSV (debug aid). */
FXCAST_API fxc_status fxc_features_to_csv(const fxc_series* series,
                                          const fxc_indicator_config* config,
                                          const char* path);

/* --- training ------------------------------------------------------------ */

/* Featurizes, windows, splits chronologically, fits the scaler on the train
 * partition only, and trains. Both outputs are optional (pass NULL to skip). */
FXCAST_API fxc_status fxc_train(const fxc_series* series, const fxc_run_config* config,
                                fxc_model** out_model, fxc_train_report** out_report);

FXCAST_API int fxc_report_epochs(const fxc_train_report* report);
FXCAST_API int fxc_report_stopped_early(const fxc_train_report* report);
FXCAST_API int fxc_report_has_validation(const fxc_train_report* report);
/* epoch is 0-based; returns NaN when out of range or validation is off. */
FXCAST_API double fxc_report_train_loss(const fxc_train_report* report, int epoch);
FXCAST_API double fxc_report_val_loss(const fxc_train_report* report, int epoch);
/* CSV with header epoch,train_loss,val_loss (val_loss empty when disabled). */
FXCAST_API fxc_status fxc_report_save_csv(const fxc_train_report* report, const char* path);
FXCAST_API void fxc_report_free(fxc_train_report* report);

/* --- trained models ------------------------------------------------------ */

FXCAST_API fxc_status fxc_model_save(const fxc_model* model, const char* path);
FXCAST_API fxc_status fxc_model_load(const char* path, fxc_model** out);
FXCAST_API const char* fxc_model_variant(const fxc_model* model);

/* Predicted-vs-actual CSV (timestamp,actual,predicted) over every full
 * lookback window of the series, in price units. */
FXCAST_API fxc_status fxc_model_predict_csv(const fxc_model* model, const fxc_series* series,
                                            const char* out_path);

/* Price-unit metrics over the same windows fxc_model_predict_csv covers. */
FXCAST_API fxc_status fxc_model_evaluate(const fxc_model* model, const fxc_series* series,
                                         fxc_eval_metrics* out);
FXCAST_API void fxc_model_free(fxc_model* model);

/* --- model comparison ----------------------------------------------------- */

/* Trains one model per variant on a shared split (variant i is seeded with
 * config->train.seed + i) and evaluates all of them on identical test
 * windows. */
FXCAST_API fxc_status fxc_compare(const fxc_series* series, const fxc_run_config* config,
                                  const fxc_variant* variants, size_t n_variants,
                                  fxc_table** out);
FXCAST_API size_t fxc_table_rows(const fxc_table* table);
FXCAST_API const char* fxc_table_label(const fxc_table* table, size_t row);
FXCAST_API fxc_status fxc_table_metrics(const fxc_table* table, size_t row,
                                        fxc_eval_metrics* out);
/* Aligned text table (MSE, RMSE, R-Square columns); free with fxc_string_free. */
FXCAST_API fxc_status fxc_table_format(const fxc_table* table, char** out);
FXCAST_API fxc_status fxc_table_save_csv(const fxc_table* table, const char* path);
FXCAST_API void fxc_table_free(fxc_table* table);

FXCAST_API void fxc_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FXCAST_H */
