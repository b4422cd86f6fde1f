#include <doctest.h>

#include <cmath>

#include "core/indicators.hpp"
#include "core/rng.hpp"
#include "oracles.hpp"

using namespace fxcast;

namespace {

PriceSeries series_from_closes(const Vec& closes) {
  PriceSeries s;
  for (std::size_t i = 0; i < closes.size(); ++i) {
    Candle c;
    c.timestamp = 1577836800 + 3600 * static_cast<std::int64_t>(i);
    c.open = c.high = c.low = c.close = closes[i];
    c.volume = 1.0;
    s.candles.push_back(c);
  }
  return s;
}

}  // namespace

TEST_CASE("sma matches the worked examples") {
  const auto constant = sma({5, 5, 5, 5}, 3);
  CHECK(!constant[0].has_value());
  CHECK(!constant[1].has_value());
  CHECK(*constant[2] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(*constant[3] == doctest::Approx(5.0).epsilon(1e-12));

  const auto identity = sma({1, 2, 3, 4}, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(*identity[i] == doctest::Approx(i + 1.0));

  const auto pairs = sma({1, 2, 3, 4}, 2);
  CHECK(!pairs[0].has_value());
  CHECK(*pairs[1] == doctest::Approx(1.5));
  CHECK(*pairs[2] == doctest::Approx(2.5));
  CHECK(*pairs[3] == doctest::Approx(3.5));
}

TEST_CASE("sma rejects bad arguments") {
  CHECK_THROWS_AS(sma({1, 2}, 0), FxError);
  CHECK_THROWS_AS(sma({}, 3), FxError);
  try {
    sma({1, 2}, 0);
  } catch (const FxError& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("rsi limit cases") {
  const auto up = rsi({1, 2, 3, 4, 5}, 3);
  for (std::size_t t = 3; t < 5; ++t) CHECK(*up[t] == doctest::Approx(100.0).epsilon(1e-12));

  const auto down = rsi({5, 4, 3, 2, 1}, 3);
  for (std::size_t t = 3; t < 5; ++t) CHECK(std::abs(*down[t]) < 1e-12);

  const auto alternating = rsi({10, 11, 10, 11, 10}, 4);
  CHECK(*alternating[4] == doctest::Approx(50.0).epsilon(1e-12));

  const auto flat = rsi({7, 7, 7, 7}, 2);
  CHECK(*flat[2] == doctest::Approx(50.0));  // flat window convention

  CHECK(!up[2].has_value());  // first n entries undefined
}

TEST_CASE("rsi rejects too-short input") {
  CHECK_THROWS_AS(rsi({1, 2, 3}, 3), FxError);
}

TEST_CASE("bollinger worked examples") {
  const auto constant = bollinger({3, 3, 3, 3}, 2, 2.0);
  for (std::size_t t = 1; t < 4; ++t) {
    CHECK(*constant.upper[t] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(*constant.middle[t] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(*constant.lower[t] == doctest::Approx(3.0).epsilon(1e-12));
  }

  const Vec prices = {1.0, 4.0, 2.0, 8.0, 5.0};
  const auto collapsed = bollinger(prices, 3, 0.0);
  const auto mean = sma(prices, 3);
  for (std::size_t t = 2; t < prices.size(); ++t) {
    CHECK(*collapsed.upper[t] == *mean[t]);
    CHECK(*collapsed.lower[t] == *mean[t]);
  }

  const auto two = bollinger({1, 3}, 2, 1.0);
  CHECK(*two.middle[1] == doctest::Approx(2.0));
  CHECK(*two.upper[1] == doctest::Approx(3.0));
  CHECK(*two.lower[1] == doctest::Approx(1.0));
}

TEST_CASE("indicators match the naive from-scratch oracle") {
  SplitMix64 rng(20240501);
  for (int series_idx = 0; series_idx < 200; ++series_idx) {
    const std::size_t len = 30 + rng.bounded(120);
    Vec prices(len);
    double level = 1.0;
    for (double& p : prices) {
      level *= 1.0 + 0.01 * rng.uniform(-1.0, 1.0);
      p = level;
    }
    const int n = 1 + static_cast<int>(rng.bounded(20));
    const double k = rng.uniform(0.0, 3.0);

    const auto sma_got = sma(prices, n);
    const auto sma_want = oracle::sma(prices, n);
    const auto bands_got = bollinger(prices, n, k);
    const auto bands_want = oracle::bollinger(prices, n, k);
    for (std::size_t t = 0; t < len; ++t) {
      REQUIRE(sma_got[t].has_value() == sma_want[t].has_value());
      if (sma_got[t]) CHECK(*sma_got[t] == doctest::Approx(*sma_want[t]).epsilon(1e-9));
      REQUIRE(bands_got.upper[t].has_value() == bands_want.upper[t].has_value());
      if (bands_got.upper[t]) {
        CHECK(std::abs(*bands_got.upper[t] - *bands_want.upper[t]) < 1e-9);
        CHECK(std::abs(*bands_got.middle[t] - *bands_want.middle[t]) < 1e-9);
        CHECK(std::abs(*bands_got.lower[t] - *bands_want.lower[t]) < 1e-9);
        CHECK(*bands_got.lower[t] <= *bands_got.middle[t] + 1e-12);
        CHECK(*bands_got.middle[t] <= *bands_got.upper[t] + 1e-12);
      }
    }
    if (len >= static_cast<std::size_t>(n) + 1) {
      const auto rsi_got = rsi(prices, n);
      const auto rsi_want = oracle::rsi(prices, n);
      for (std::size_t t = 0; t < len; ++t) {
        REQUIRE(rsi_got[t].has_value() == rsi_want[t].has_value());
        if (rsi_got[t]) {
          CHECK(std::abs(*rsi_got[t] - *rsi_want[t]) < 1e-9);
          CHECK(*rsi_got[t] >= 0.0);
          CHECK(*rsi_got[t] <= 100.0);
        }
      }
    }
  }
}

TEST_CASE("shifting prices by a constant shifts sma and bands, leaves rsi unchanged") {
  // Dyadic prices and a power-of-two shift keep every addition exact, so the
  // rsi comparison can be bitwise.
  SplitMix64 rng(77);
  Vec prices(80);
  for (double& p : prices) p = static_cast<double>(512 + rng.bounded(1536)) / 1024.0;
  Vec shifted(prices.size());
  const double c = 4.0;
  for (std::size_t i = 0; i < prices.size(); ++i) shifted[i] = prices[i] + c;

  const int n = 14;
  const auto sma_a = sma(prices, n);
  const auto sma_b = sma(shifted, n);
  const auto bands_a = bollinger(prices, n, 2.0);
  const auto bands_b = bollinger(shifted, n, 2.0);
  const auto rsi_a = rsi(prices, n);
  const auto rsi_b = rsi(shifted, n);
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (sma_a[t]) CHECK(std::abs(*sma_b[t] - (*sma_a[t] + c)) < 1e-9);
    if (bands_a.upper[t]) {
      CHECK(std::abs(*bands_b.upper[t] - (*bands_a.upper[t] + c)) < 1e-9);
      CHECK(std::abs(*bands_b.lower[t] - (*bands_a.lower[t] + c)) < 1e-9);
    }
    if (rsi_a[t]) CHECK(*rsi_b[t] == *rsi_a[t]);
  }
}

TEST_CASE("build_feature_matrix row count and contents") {
  IndicatorConfig cfg;
  cfg.sma_n = cfg.rsi_n = cfg.bb_n = 14;
  cfg.bb_k = 2.0;

  SplitMix64 rng(5);
  const std::size_t len = 40;
  Vec closes(len);
  double level = 1.0;
  for (double& p : closes) {
    level *= 1.0 + 0.005 * rng.uniform(-1.0, 1.0);
    p = level;
  }
  const auto fm = build_feature_matrix(series_from_closes(closes), cfg);
  CHECK(fm.rows.rows == len - 15);  // 14 warm-up bars plus one target
  CHECK(fm.rows.cols == kFeatureCount);
  CHECK(fm.targets.size() == fm.rows.rows);
  CHECK(fm.timestamps.size() == fm.rows.rows);
  CHECK(fm.feature_names ==
        std::vector<std::string>{"close", "sma", "rsi", "bb_upper", "bb_middle", "bb_lower"});
  for (double x : fm.rows.data) CHECK(std::isfinite(x));

  // targets are the next bar's close; timestamps are the input bar's
  CHECK(fm.rows(0, 0) == closes[14]);
  CHECK(fm.targets[0] == closes[15]);
  CHECK(fm.timestamps[0] == 1577836800 + 3600 * 14);
  CHECK(fm.target_timestamps[0] == 1577836800 + 3600 * 15);
}

TEST_CASE("build_feature_matrix on a constant series") {
  IndicatorConfig cfg;  // defaults: 20 / 14 / 20 / 2.0
  Vec closes(60, 1.25);
  const auto fm = build_feature_matrix(series_from_closes(closes), cfg);
  REQUIRE(fm.rows.rows > 0);
  for (std::size_t r = 0; r < fm.rows.rows; ++r) {
    CHECK(fm.rows(r, 0) == doctest::Approx(1.25));
    CHECK(fm.rows(r, 1) == doctest::Approx(1.25));
    CHECK(fm.rows(r, 2) == doctest::Approx(50.0));
    CHECK(fm.rows(r, 3) == doctest::Approx(1.25));
    CHECK(fm.rows(r, 4) == doctest::Approx(1.25));
    CHECK(fm.rows(r, 5) == doctest::Approx(1.25));
  }
}

TEST_CASE("build_feature_matrix reports the required minimum length") {
  IndicatorConfig cfg;
  cfg.sma_n = cfg.rsi_n = cfg.bb_n = 14;
  Vec closes(10, 1.0);
  try {
    build_feature_matrix(series_from_closes(closes), cfg);
    FAIL("expected insufficient-data error");
  } catch (const FxError& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
    CHECK(std::string(e.what()).find(std::to_string(min_series_length(cfg))) !=
          std::string::npos);
  }
}
