// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits non-zero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "core/attention.hpp"
#include "core/checkpoint.hpp"
#include "core/conv1d.hpp"
#include "core/dataset.hpp"
#include "core/dense.hpp"
#include "core/evaluation.hpp"
#include "core/gradcheck.hpp"
#include "core/indicators.hpp"
#include "core/lstm.hpp"
#include "core/model.hpp"
#include "core/rng.hpp"
#include "core/training.hpp"
#include "oracles.hpp"

using namespace fxcast;

namespace {

struct Harness {
  int failures = 0;
  double total_seconds = 0.0;

  void criterion(int id, const std::string& name,
                 const std::function<std::string()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool passed = false;
    try {
      detail = body();
      passed = detail.empty();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    total_seconds += secs;
    std::printf("[%s] %2d. %s (%.1f s)%s%s\n", passed ? "PASS" : "FAIL", id, name.c_str(),
                secs, detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!passed) ++failures;
  }
};

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---- criterion 1: gradient correctness ------------------------------------

double lstm_max_fd_error(SplitMix64& rng) {
  const std::size_t h = 1 + rng.bounded(4);
  const std::size_t d = 1 + rng.bounded(4);
  const std::size_t t_len = 2 + rng.bounded(7);
  auto params = lstm_zeros(h, d);
  for (auto* w : {&params.w_f, &params.w_i, &params.w_c, &params.w_o}) {
    for (double& x : w->data) x = rng.uniform(-0.8, 0.8);
  }
  for (auto* b : {&params.b_f, &params.b_i, &params.b_c, &params.b_o}) {
    for (double& x : *b) x = rng.uniform(-0.5, 0.5);
  }
  Mat inputs = oracle::random_mat(rng, t_len, d);
  const Mat upstream = oracle::random_mat(rng, t_len, h);
  const auto back = lstm_backward(params, lstm_forward(params, inputs).cache, upstream);

  oracle::FlatGrads flat;
  flat.add_span(params.w_f.data, back.grads.w_f.data);
  flat.add_span(params.w_i.data, back.grads.w_i.data);
  flat.add_span(params.w_c.data, back.grads.w_c.data);
  flat.add_span(params.w_o.data, back.grads.w_o.data);
  flat.add_span(params.b_f, back.grads.b_f);
  flat.add_span(params.b_i, back.grads.b_i);
  flat.add_span(params.b_c, back.grads.b_c);
  flat.add_span(params.b_o, back.grads.b_o);
  flat.add_span(inputs.data, back.input_grads.data);
  auto loss = [&] {
    const auto res = lstm_forward(params, inputs);
    double s = 0.0;
    for (std::size_t k = 0; k < res.hidden.data.size(); ++k) {
      s += upstream.data[k] * res.hidden.data[k];
    }
    return s;
  };
  return finite_difference_check(loss, flat.coords, flat.analytic, 1e-5);
}

double conv_max_fd_error(SplitMix64& rng) {
  const std::size_t f_cnt = 1 + rng.bounded(3);
  const std::size_t d = 1 + rng.bounded(4);
  const std::size_t k_len = 1 + rng.bounded(3);
  const std::size_t t_len = 1 + rng.bounded(8);
  auto params = conv1d_zeros(f_cnt, d, k_len);
  for (double& x : params.w.data) x = rng.uniform(-1.0, 1.0);
  for (double& x : params.b) x = rng.uniform(-0.5, 0.5);
  Mat inputs = oracle::random_mat(rng, t_len, d);
  const Mat upstream = oracle::random_mat(rng, t_len, f_cnt);
  const auto back = conv1d_backward(params, conv1d_forward(params, inputs).cache, upstream);

  oracle::FlatGrads flat;
  flat.add_span(params.w.data, back.grads.w.data);
  flat.add_span(params.b, back.grads.b);
  flat.add_span(inputs.data, back.input_grads.data);
  auto loss = [&] {
    const auto res = conv1d_forward(params, inputs);
    double s = 0.0;
    for (std::size_t k = 0; k < res.outputs.data.size(); ++k) {
      s += upstream.data[k] * res.outputs.data[k];
    }
    return s;
  };
  return finite_difference_check(loss, flat.coords, flat.analytic, 1e-5);
}

double attention_max_fd_error(SplitMix64& rng) {
  const std::size_t t_len = 1 + rng.bounded(8);
  const std::size_t m = 1 + rng.bounded(7);
  AttentionParams params;
  params.w = oracle::random_vec(rng, m);
  params.b = rng.uniform(-0.5, 0.5);
  Mat z = oracle::random_mat(rng, t_len, m, -0.5, 0.5);
  // The b_a gradient is identically zero (softmax shift invariance), so that
  // coordinate's finite difference measures pure fp noise ~ ulp(|L|)/2eps
  // against the harness' 1e-8 absolute guard. |L| <= 0.04 keeps it bounded
  // while leaving every well-conditioned coordinate's relative error intact.
  const Vec upstream = oracle::random_vec(rng, m, -0.01, 0.01);
  const auto back = attention_backward(params, attention_forward(params, z).cache, upstream);

  oracle::FlatGrads flat;
  flat.add_span(params.w, back.grads.w);
  flat.add(&params.b, back.grads.b);
  flat.add_span(z.data, back.z_grads.data);
  auto loss = [&] {
    const auto res = attention_forward(params, z);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += upstream[j] * res.context[j];
    return s;
  };
  return finite_difference_check(loss, flat.coords, flat.analytic, 1e-5);
}

double dense_max_fd_error(SplitMix64& rng) {
  const std::size_t m = 1 + rng.bounded(7);
  DenseParams params;
  params.w = oracle::random_vec(rng, m);
  params.b = rng.uniform(-0.5, 0.5);
  Vec context = oracle::random_vec(rng, m);
  const double upstream = rng.uniform(-2.0, 2.0);
  const auto back = dense_backward(params, context, upstream);

  oracle::FlatGrads flat;
  flat.add_span(params.w, back.grads.w);
  flat.add(&params.b, back.grads.b);
  flat.add_span(context, back.context_grad);
  auto loss = [&] { return upstream * dense_forward(params, context); };
  return finite_difference_check(loss, flat.coords, flat.analytic, 1e-5);
}

double model_max_fd_error(SplitMix64& rng, Variant variant) {
  ModelSpec spec;
  spec.variant = variant;
  spec.input_size = 1 + rng.bounded(4);
  spec.hidden_size = 1 + rng.bounded(4);
  spec.num_filters = 1 + rng.bounded(3);
  spec.lookback = 2 + rng.bounded(7);
  spec.kernel_size = 1 + rng.bounded(std::min<std::uint64_t>(3, spec.lookback));
  ModelParams params = init_params(spec, rng.next_u64());
  const Mat window = oracle::random_mat(rng, spec.lookback, spec.input_size, -0.5, 0.5);

  // Loss = 0.01 * prediction. The scale keeps finite-difference noise on the
  // identically-zero b_a gradient under the harness' absolute guard without
  // affecting the relative error of any well-conditioned coordinate.
  const double upstream = 0.01;
  const auto fwd = model_forward(params, window);
  const auto grads = model_backward(params, fwd.trace, upstream);

  oracle::FlatGrads flat;
  const auto pv = param_views(params);
  const auto gv = grad_views(grads);
  for (std::size_t k = 0; k < pv.size(); ++k) {
    for (std::size_t i = 0; i < pv[k].size(); ++i) flat.add(&pv[k][i], gv[k][i]);
  }
  auto loss = [&] { return upstream * model_forward(params, window).prediction; };
  return finite_difference_check(loss, flat.coords, flat.analytic, 1e-5);
}

std::string check_gradients() {
  SplitMix64 rng(0xACCE97);
  double worst = 0.0;
  std::string worst_name;
  auto track = [&](const char* name, double err) {
    if (err > worst) {
      worst = err;
      worst_name = name;
    }
  };
  for (int rep = 0; rep < 20; ++rep) {
    track("lstm", lstm_max_fd_error(rng));
    track("conv1d", conv_max_fd_error(rng));
    track("attention", attention_max_fd_error(rng));
    track("dense", dense_max_fd_error(rng));
    track("hybrid", model_max_fd_error(rng, Variant::Hybrid));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max relative error %.3g (%s)", worst, worst_name.c_str());
  if (worst >= 1e-4) return std::string("FAILED: ") + buf;
  std::printf("       %s\n", buf);
  return "";
}

// ---- criterion 2/3: indicators ---------------------------------------------

std::string check_indicator_oracle() {
  SplitMix64 rng(0x1D1CA7);
  double worst = 0.0;
  for (int series_idx = 0; series_idx < 1000; ++series_idx) {
    const std::size_t len = 50 + rng.bounded(451);
    Vec prices(len);
    double level = 1.0;
    for (double& p : prices) {
      level *= 1.0 + 0.01 * rng.uniform(-1.0, 1.0);
      p = level;
    }
    const int n = 1 + static_cast<int>(rng.bounded(30));
    const double k = rng.uniform(0.0, 3.0);

    const auto sma_got = sma(prices, n);
    const auto sma_want = oracle::sma(prices, n);
    const auto bands_got = bollinger(prices, n, k);
    const auto bands_want = oracle::bollinger(prices, n, k);
    const auto rsi_got = rsi(prices, n);
    const auto rsi_want = oracle::rsi(prices, n);
    for (std::size_t t = 0; t < len; ++t) {
      if (sma_got[t]) worst = std::max(worst, std::abs(*sma_got[t] - *sma_want[t]));
      if (bands_got.upper[t]) {
        worst = std::max(worst, std::abs(*bands_got.upper[t] - *bands_want.upper[t]));
        worst = std::max(worst, std::abs(*bands_got.middle[t] - *bands_want.middle[t]));
        worst = std::max(worst, std::abs(*bands_got.lower[t] - *bands_want.lower[t]));
      }
      if (rsi_got[t]) worst = std::max(worst, std::abs(*rsi_got[t] - *rsi_want[t]));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max absolute deviation %.3g over 1000 series", worst);
  if (worst >= 1e-9) return std::string("FAILED: ") + buf;
  std::printf("       %s\n", buf);
  return "";
}

std::string check_indicator_limits() {
  std::string errors;
  Vec up(30), down(30), alternating(30), flat(30, 2.5);
  for (std::size_t i = 0; i < 30; ++i) {
    up[i] = 1.0 + 0.1 * static_cast<double>(i);
    down[i] = 4.0 - 0.1 * static_cast<double>(i);
    alternating[i] = (i % 2 == 0) ? 10.0 : 11.0;
  }
  const auto rsi_up = rsi(up, 14);
  const auto rsi_down = rsi(down, 14);
  const auto rsi_alt = rsi(alternating, 14);
  for (std::size_t t = 14; t < 30; ++t) {
    if (std::abs(*rsi_up[t] - 100.0) > 1e-9) errors += "monotone-up rsi != 100; ";
    if (std::abs(*rsi_down[t]) > 1e-9) errors += "monotone-down rsi != 0; ";
    if (std::abs(*rsi_alt[t] - 50.0) > 1e-9) errors += "alternating rsi != 50; ";
  }
  const auto bands = bollinger(flat, 14, 2.0);
  for (std::size_t t = 13; t < 30; ++t) {
    if (std::abs(*bands.upper[t] - *bands.lower[t]) > 1e-9 ||
        std::abs(*bands.middle[t] - 2.5) > 1e-9) {
      errors += "constant-series bands do not coincide; ";
    }
  }
  return errors;
}

// ---- criterion 4: attention contract ---------------------------------------

std::string check_attention_contract() {
  SplitMix64 rng(0xA77E);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t t_len = 1 + rng.bounded(12);
    const std::size_t m = 1 + rng.bounded(10);
    AttentionParams params;
    params.w = oracle::random_vec(rng, m, -8.0, 8.0);  // saturating scores too
    params.b = rng.uniform(-4.0, 4.0);
    const Mat z = oracle::random_mat(rng, t_len, m, -5.0, 5.0);
    const auto res = attention_forward(params, z);

    double sum = 0.0;
    for (double a : res.cache.alpha) {
      if (a < 0.0) return "negative attention weight";
      sum += a;
    }
    if (std::abs(sum - 1.0) >= 1e-9) return "attention weights do not sum to 1";
    for (std::size_t j = 0; j < m; ++j) {
      double lo = z(0, j), hi = z(0, j);
      for (std::size_t t = 1; t < t_len; ++t) {
        lo = std::min(lo, z(t, j));
        hi = std::max(hi, z(t, j));
      }
      const double slack = 1e-9 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
      if (res.context[j] < lo - slack || res.context[j] > hi + slack) {
        return "context left the per-channel envelope";
      }
    }
  }
  return "";
}

// ---- criterion 5: metric identities ----------------------------------------

std::string check_metric_identities() {
  std::string errors;
  SplitMix64 rng(0x3E7A1C);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.bounded(50);
    Vec pred(n), actual(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.uniform(-3.0, 3.0);
      actual[i] = rng.uniform(-3.0, 3.0);
    }
    const double m = mse(pred, actual);
    const double r = rmse(pred, actual);
    if (std::abs(r * r - m) > 1e-12 * std::max(1.0, m)) {
      errors += "rmse^2 != mse; ";
      break;
    }
  }
  const Vec a = {0.25, 1.5, 2.75, 4.0};
  if (r_square(a, a) != 1.0) errors += "r_square(a,a) != 1; ";
  const Vec mean_pred(3, 1.0);
  if (std::abs(r_square(mean_pred, {0.0, 1.0, 2.0})) > 1e-12) {
    errors += "mean predictor r_square != 0; ";
  }
  if (r_square({0.0, 0.0, 0.0}, {0.0, 1.0, 2.0}) != -1.5) {
    errors += "worked example r_square != -1.5; ";
  }
  return errors;
}

// ---- criterion 6: overfit capacity -----------------------------------------

std::string check_overfit() {
  // 108 bars feed exactly 65 windows at L=24 with the default indicator
  // warm-up; a 0.985 split keeps 64 of them for training.
  const auto series = gen_synthetic(SynthKind::Sine, 108, 1, 0.0);
  const auto features = build_feature_matrix(series, IndicatorConfig{});
  auto data = chronological_split(make_windows(features, 24), 0.985);
  if (data.train.size() != 64) return "expected 64 training samples";

  ModelSpec spec;
  spec.variant = Variant::Hybrid;
  spec.hidden_size = 16;
  spec.num_filters = 8;
  spec.kernel_size = 3;
  spec.lookback = 24;
  TrainConfig config;
  config.learning_rate = 1e-3;
  config.epochs = 2000;
  config.batch_size = 8;
  config.validation_fraction = 0.0;
  config.patience = 0;
  config.seed = 6;

  const auto [params, report] = train(spec, data, config);
  (void)params;
  double best = 1e300;
  std::size_t best_epoch = 0;
  for (std::size_t i = 0; i < report.train_loss.size(); ++i) {
    if (report.train_loss[i] < best) {
      best = report.train_loss[i];
      best_epoch = i + 1;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "best scaled train MSE %.3g at epoch %zu", best, best_epoch);
  if (best >= 1e-5) return std::string("FAILED: ") + buf;
  std::printf("       %s\n", buf);
  return "";
}

// ---- criterion 7: generalization smoke test --------------------------------

std::string check_generalization() {
  const auto series = gen_synthetic(SynthKind::Sine, 2000, 20240811, 0.002);
  const auto features = build_feature_matrix(series, IndicatorConfig{});
  ModelSpec base;  // defaults: H=64, F=32, K=3, L=60
  auto data = chronological_split(make_windows(features, base.lookback), 0.8);

  std::vector<ModelSpec> specs;
  for (Variant v : {Variant::CnnOnly, Variant::LstmOnly, Variant::Hybrid}) {
    ModelSpec spec = base;
    spec.variant = v;
    specs.push_back(spec);
  }
  const TrainConfig config;  // defaults: epochs=100, batch=64, lr=1e-3
  const auto table = compare(specs, data, config, "synthetic sine");

  const std::string text = format_comparison_table(table);
  std::printf("%s", text.c_str());
  if (text.find("MSE") == std::string::npos || text.find("RMSE") == std::string::npos ||
      text.find("R-Square") == std::string::npos) {
    return "table is missing the MSE/RMSE/R-Square columns";
  }
  std::string errors;
  for (const EvalReport& row : table) {
    if (row.r_square < 0.95) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%s test R^2 %.4f < 0.95; ", row.model_label.c_str(),
                    row.r_square);
      errors += buf;
    }
  }
  return errors;
}

// ---- criterion 8: determinism ----------------------------------------------

std::string format_losses(const TrainReport& report) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < report.train_loss.size(); ++i) {
    ss << i + 1 << ',' << report.train_loss[i];
    if (i < report.val_loss.size()) ss << ',' << report.val_loss[i];
    ss << '\n';
  }
  return ss.str();
}

std::string check_determinism() {
  const auto series = gen_synthetic(SynthKind::Sine, 300, 8, 0.01);
  const auto features = build_feature_matrix(series, IndicatorConfig{});
  const auto data = chronological_split(make_windows(features, 16), 0.8);

  ModelSpec spec;
  spec.variant = Variant::Hybrid;
  spec.hidden_size = 8;
  spec.num_filters = 4;
  spec.kernel_size = 3;
  spec.lookback = 16;
  TrainConfig config;
  config.epochs = 5;
  config.batch_size = 32;
  config.seed = 99;
  config.validation_fraction = 0.1;
  config.patience = 2;

  const auto run1 = train(spec, data, config);
  const auto run2 = train(spec, data, config);

  Checkpoint c1, c2;
  c1.params = run1.first;
  c2.params = run2.first;
  c1.scaler = c2.scaler = data.scaler;
  c1.seed = c2.seed = config.seed;
  c1.epochs_trained = run1.second.epochs_run;
  c2.epochs_trained = run2.second.epochs_run;
  const std::string p1 = temp_path("fx_acc_ckpt1.json");
  const std::string p2 = temp_path("fx_acc_ckpt2.json");
  save_checkpoint(c1, p1);
  save_checkpoint(c2, p2);
  if (slurp(p1) != slurp(p2)) return "checkpoint bytes differ between runs";
  if (format_losses(run1.second) != format_losses(run2.second)) {
    return "loss histories differ between runs";
  }
  return "";
}

// ---- criterion 9: leakage freedom ------------------------------------------

std::string check_leakage() {
  const auto series = gen_synthetic(SynthKind::RandomWalk, 400, 17, 0.01);
  const auto features = build_feature_matrix(series, IndicatorConfig{});
  const auto base = make_windows(features, 20);
  const std::size_t n_train =
      static_cast<std::size_t>(std::floor(0.8 * static_cast<double>(base.size())));

  const auto reference = chronological_split(base, 0.8);
  SplitMix64 rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    auto mutated = base;
    const std::size_t victim = n_train + rng.bounded(base.size() - n_train);
    const std::size_t coord = rng.bounded(mutated[victim].inputs.data.size());
    mutated[victim].inputs.data[coord] += rng.uniform(0.5, 100.0);
    mutated[victim].target -= rng.uniform(0.5, 100.0);
    const auto split = chronological_split(mutated, 0.8);
    if (std::memcmp(split.scaler.mins.data(), reference.scaler.mins.data(),
                    split.scaler.mins.size() * sizeof(double)) != 0 ||
        std::memcmp(split.scaler.maxs.data(), reference.scaler.maxs.data(),
                    split.scaler.maxs.size() * sizeof(double)) != 0) {
      return "scaler changed after mutating a test-partition value";
    }
  }
  return "";
}

// ---- criterion 10: checkpoint round trip -----------------------------------

std::string check_checkpoint_roundtrip() {
  const auto series = gen_synthetic(SynthKind::Sine, 200, 2, 0.002);
  const auto features = build_feature_matrix(series, IndicatorConfig{});
  const auto data = chronological_split(make_windows(features, 12), 0.8);

  ModelSpec spec;
  spec.variant = Variant::Hybrid;
  spec.hidden_size = 6;
  spec.num_filters = 4;
  spec.kernel_size = 3;
  spec.lookback = 12;
  Checkpoint ckpt;
  ckpt.params = init_params(spec, 31);
  ckpt.scaler = data.scaler;
  ckpt.seed = 31;

  const std::string path = temp_path("fx_acc_roundtrip.json");
  save_checkpoint(ckpt, path);
  const Checkpoint loaded = load_checkpoint(path);

  SplitMix64 rng(77);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const Mat window = oracle::random_mat(rng, spec.lookback, spec.input_size);
    const double a = model_forward(ckpt.params, window).prediction;
    const double b = model_forward(loaded.params, window).prediction;
    worst = std::max(worst, std::abs(a - b));
  }
  if (worst > 1e-9) return "round-trip prediction drift exceeds 1e-9";

  std::string text = slurp(path);
  const std::string needle = "\"format_version\": 1";
  text.replace(text.find(needle), needle.size(), "\"format_version\": 2");
  const std::string doctored = temp_path("fx_acc_doctored.json");
  std::ofstream(doctored) << text;
  try {
    load_checkpoint(doctored);
    return "unknown format_version was accepted";
  } catch (const FxError& e) {
    if (e.code() != ErrorCode::Format) return "wrong error for unknown format_version";
  }
  return "";
}

}  // namespace

int main() {
  Harness harness;
  std::printf("fxcast acceptance suite\n\n");

  harness.criterion(1, "gradient correctness vs central finite differences",
                    check_gradients);
  harness.criterion(2, "indicator equivalence with the naive oracle", check_indicator_oracle);
  harness.criterion(3, "indicator limit cases", check_indicator_limits);
  harness.criterion(4, "attention weight and convex-hull contract",
                    check_attention_contract);
  harness.criterion(5, "metric identities", check_metric_identities);
  harness.criterion(6, "overfit capacity on a noiseless sine", check_overfit);
  harness.criterion(7, "generalization smoke test across all variants",
                    check_generalization);
  harness.criterion(8, "bitwise training determinism", check_determinism);
  harness.criterion(9, "scaler leakage freedom", check_leakage);
  harness.criterion(10, "checkpoint round trip and version gate",
                    check_checkpoint_roundtrip);

  std::printf("\n%d/10 criteria passed (%.1f s total)\n", 10 - harness.failures,
              harness.total_seconds);
  return harness.failures == 0 ? 0 : 1;
}
