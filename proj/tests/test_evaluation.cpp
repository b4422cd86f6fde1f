#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/dataset.hpp"
#include "core/evaluation.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

using namespace fxcast;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

SplitDataset sine_dataset(std::size_t bars, std::size_t lookback, double noise) {
  const auto series = gen_synthetic(SynthKind::Sine, bars, 29, noise);
  IndicatorConfig cfg;
  return chronological_split(make_windows(build_feature_matrix(series, cfg), lookback), 0.8);
}

}  // namespace

TEST_CASE("mse and rmse worked examples") {
  CHECK(mse({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(mse({2}, {0}) == doctest::Approx(4.0));
  CHECK(rmse({2}, {0}) == doctest::Approx(2.0));
  CHECK(mse({1, 2, 3}, {1, 1, 1}) == doctest::Approx(5.0 / 3.0).epsilon(1e-15));
  CHECK(rmse({1, 2, 3}, {1, 1, 1}) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK_THROWS_AS(mse({}, {}), FxError);
  CHECK_THROWS_AS(mse({1}, {1, 2}), FxError);
}

TEST_CASE("r_square worked examples and degenerate input") {
  CHECK(r_square({1, 2, 3}, {1, 2, 3}) == 1.0);  // numerator identically zero
  CHECK(std::abs(r_square({1, 1, 1}, {0, 1, 2})) < 1e-12);  // mean predictor
  CHECK(r_square({0, 0, 0}, {0, 1, 2}) == doctest::Approx(-1.5).epsilon(1e-15));

  CHECK_THROWS_AS(r_square({1, 2, 3}, {5, 5, 5}), FxError);
  CHECK_THROWS_AS(r_square({1}, {5}), FxError);
  try {
    r_square({1, 2}, {5, 5});
  } catch (const FxError& e) {
    CHECK(e.code() == ErrorCode::DegenerateVariance);
  }

  // memorizing a single test point: mse is fine, r_square is degenerate
  CHECK(mse({1.25}, {1.25}) == 0.0);
  CHECK_THROWS_AS(r_square({1.25}, {1.25}), FxError);
}

TEST_CASE("metric identities on random data") {
  SplitMix64 rng(47);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 2 + rng.bounded(40);
    Vec pred(n), actual(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.uniform(-2.0, 2.0);
      actual[i] = rng.uniform(-2.0, 2.0);
    }
    const double m = mse(pred, actual);
    const double r = rmse(pred, actual);
    CHECK(std::abs(r * r - m) <= 1e-12 * std::max(1.0, m));
    CHECK(mse(actual, pred) == m);  // mse is symmetric

    // permuting (pred, actual) pairs together leaves the metrics unchanged
    Vec pred_rev(pred.rbegin(), pred.rend());
    Vec actual_rev(actual.rbegin(), actual.rend());
    CHECK(mse(pred_rev, actual_rev) == doctest::Approx(m).epsilon(1e-12));
  }

  // r_square is not symmetric in its arguments
  const Vec a = {0.0, 1.0, 2.0, 5.0};
  const Vec b = {0.5, 0.5, 2.5, 4.0};
  CHECK(r_square(b, a) != r_square(a, b));
}

TEST_CASE("scaled-space and price-space mse differ by the squared target range") {
  Scaler scaler;
  scaler.mins = {0.0, 1.2};
  scaler.maxs = {1.0, 1.7};  // target channel spans 0.5
  scaler.fitted = true;

  SplitMix64 rng(3);
  const std::size_t n = 32;
  Vec pred_s(n), act_s(n), pred_p(n), act_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    pred_s[i] = rng.uniform(0.0, 1.0);
    act_s[i] = rng.uniform(0.0, 1.0);
    pred_p[i] = scaler.invert_target(pred_s[i]);
    act_p[i] = scaler.invert_target(act_s[i]);
  }
  const double range = 0.5;
  CHECK(mse(pred_p, act_p) ==
        doctest::Approx(mse(pred_s, act_s) * range * range).epsilon(1e-9));
}

TEST_CASE("evaluate reports price-unit metrics over the test partition") {
  const auto data = sine_dataset(160, 12, 0.01);
  ModelSpec spec;
  spec.variant = Variant::CnnOnly;
  spec.num_filters = 4;
  spec.kernel_size = 2;
  spec.lookback = 12;
  TrainConfig config;
  config.epochs = 30;
  config.batch_size = 16;
  config.validation_fraction = 0.0;
  config.patience = 0;
  config.seed = 70;

  const auto [params, report] = train(spec, data, config);
  (void)report;
  const auto eval = evaluate(params, data, "sine");
  CHECK(eval.n == data.test.size());
  CHECK(eval.model_label == "CNN1D");
  CHECK(eval.dataset_label == "sine");
  CHECK(eval.mse >= 0.0);
  CHECK(std::abs(eval.rmse * eval.rmse - eval.mse) <= 1e-12 * std::max(1.0, eval.mse));
  CHECK(eval.r_square <= 1.0);
}

TEST_CASE("compare with one spec equals evaluate after train") {
  const auto data = sine_dataset(160, 12, 0.01);
  ModelSpec spec;
  spec.variant = Variant::CnnOnly;
  spec.num_filters = 4;
  spec.kernel_size = 2;
  spec.lookback = 12;
  TrainConfig config;
  config.epochs = 10;
  config.batch_size = 16;
  config.validation_fraction = 0.0;
  config.patience = 0;
  config.seed = 41;

  const auto table = compare({spec}, data, config, "sine");
  REQUIRE(table.size() == 1);

  const auto [params, report] = train(spec, data, config);  // seed + 0
  (void)report;
  const auto direct = evaluate(params, data, "sine");
  CHECK(table[0].mse == direct.mse);
  CHECK(table[0].rmse == direct.rmse);
  CHECK(table[0].r_square == direct.r_square);
  CHECK(table[0].n == direct.n);
}

TEST_CASE("compare emits one row per variant over identical test windows") {
  const auto data = sine_dataset(140, 10, 0.01);
  std::vector<ModelSpec> specs;
  for (Variant v : {Variant::CnnOnly, Variant::LstmOnly, Variant::Hybrid}) {
    ModelSpec spec;
    spec.variant = v;
    spec.hidden_size = 4;
    spec.num_filters = 3;
    spec.kernel_size = 2;
    spec.lookback = 10;
    specs.push_back(spec);
  }
  TrainConfig config;
  config.epochs = 5;
  config.batch_size = 16;
  config.validation_fraction = 0.0;
  config.patience = 0;

  const auto table = compare(specs, data, config, "sine");
  REQUIRE(table.size() == 3);
  CHECK(table[0].model_label == "CNN1D");
  CHECK(table[1].model_label == "LSTM");
  CHECK(table[2].model_label == "CNN1D-LSTM-Attention");
  CHECK(table[0].n == table[1].n);
  CHECK(table[1].n == table[2].n);

  const std::string text = format_comparison_table(table);
  CHECK(text.find("MSE") != std::string::npos);
  CHECK(text.find("RMSE") != std::string::npos);
  CHECK(text.find("R-Square") != std::string::npos);
  CHECK(text.find("CNN1D-LSTM-Attention") != std::string::npos);
  // MSE column precedes RMSE which precedes R-Square
  CHECK(text.find("MSE") < text.find("RMSE"));
  CHECK(text.find("RMSE") < text.find("R-Square"));
}

TEST_CASE("prediction csv export") {
  const std::string path = temp_path("fx_pred.csv");
  export_predictions_csv({}, path);
  {
    std::ifstream in(path);
    std::string line;
    CHECK(std::getline(in, line));
    CHECK(line == "timestamp,actual,predicted");
    CHECK(!std::getline(in, line));  // header-only
  }

  std::vector<PredictionRow> rows;
  SplitMix64 rng(8);
  for (int i = 0; i < 10; ++i) {
    PredictionRow r;
    r.timestamp = 1000 + i;
    r.actual = rng.uniform(0.9, 1.1);
    r.predicted = rng.uniform(0.9, 1.1);
    rows.push_back(r);
  }
  export_predictions_csv(rows, path);
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  std::getline(in, line);
  ++lines;
  std::size_t idx = 0;
  while (std::getline(in, line)) {
    ++lines;
    const auto fields = split_csv_line(line);
    REQUIRE(fields.size() == 3);
    CHECK(parse_int64(fields[0], "ts") == rows[idx].timestamp);
    CHECK(std::abs(parse_double(fields[1], "actual") - rows[idx].actual) < 1e-9);
    CHECK(std::abs(parse_double(fields[2], "predicted") - rows[idx].predicted) < 1e-9);
    ++idx;
  }
  CHECK(lines == 11);
}
