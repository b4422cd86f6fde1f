#include "core/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fxcast {

void PriceSeries::validate(std::size_t row_offset) const {
  require(!candles.empty(), ErrorCode::InsufficientData, "price series is empty");
  for (std::size_t i = 0; i < candles.size(); ++i) {
    const Candle& c = candles[i];
    const std::string row = "row " + std::to_string(i + 1 + row_offset);
    const bool finite = std::isfinite(c.open) && std::isfinite(c.high) &&
                        std::isfinite(c.low) && std::isfinite(c.close) &&
                        std::isfinite(c.volume);
    require(finite, ErrorCode::Validation, row + ": non-finite field");
    require(c.open > 0.0 && c.high > 0.0 && c.low > 0.0 && c.close > 0.0,
            ErrorCode::Validation, row + ": price fields must be strictly positive");
    require(c.volume >= 0.0, ErrorCode::Validation, row + ": negative volume");
    require(c.low <= std::min(c.open, c.close), ErrorCode::Validation,
            row + ": low exceeds min(open, close)");
    require(c.high >= std::max(c.open, c.close), ErrorCode::Validation,
            row + ": high below max(open, close)");
    if (i > 0) {
      require(candles[i - 1].timestamp < c.timestamp, ErrorCode::Ordering,
              row + ": timestamps not strictly increasing");
    }
  }
}

Vec PriceSeries::closes() const {
  Vec out;
  out.reserve(candles.size());
  for (const Candle& c : candles) out.push_back(c.close);
  return out;
}

void IndicatorConfig::validate() const {
  require(sma_n >= 1, ErrorCode::InvalidArgument, "sma_n must be >= 1");
  require(rsi_n >= 1, ErrorCode::InvalidArgument, "rsi_n must be >= 1");
  require(bb_n >= 1, ErrorCode::InvalidArgument, "bb_n must be >= 1");
  require(bb_k >= 0.0, ErrorCode::InvalidArgument, "bb_k must be >= 0");
}

std::vector<std::optional<double>> sma(const Vec& prices, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "sma: window length must be >= 1");
  require(!prices.empty(), ErrorCode::InvalidArgument, "sma: empty input");

  std::vector<std::optional<double>> out(prices.size());
  const auto m = static_cast<std::size_t>(n);
  double sum = 0.0;
  for (std::size_t t = 0; t < prices.size(); ++t) {
    sum += prices[t];
    if (t >= m) sum -= prices[t - m];
    if (t + 1 >= m) out[t] = sum / static_cast<double>(n);
  }
  return out;
}

std::vector<std::optional<double>> rsi(const Vec& prices, int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "rsi: window length must be >= 1");
  const auto m = static_cast<std::size_t>(n);
  require(prices.size() >= m + 1, ErrorCode::InvalidArgument,
          "rsi: need at least n+1 prices");

  std::vector<std::optional<double>> out(prices.size());
  double gain_sum = 0.0;
  double loss_sum = 0.0;
  for (std::size_t t = 1; t < prices.size(); ++t) {
    const double delta = prices[t] - prices[t - 1];
    gain_sum += std::max(delta, 0.0);
    loss_sum += std::max(-delta, 0.0);
    if (t > m) {
      const double old_delta = prices[t - m] - prices[t - m - 1];
      gain_sum -= std::max(old_delta, 0.0);
      loss_sum -= std::max(-old_delta, 0.0);
    }
    if (t >= m) {
      const double avg_gain = gain_sum / static_cast<double>(n);
      const double avg_loss = loss_sum / static_cast<double>(n);
      if (avg_loss == 0.0 && avg_gain == 0.0) {
        out[t] = 50.0;  // flat window
      } else if (avg_loss == 0.0) {
        out[t] = 100.0;  // RS -> infinity limit
      } else {
        const double rs = avg_gain / avg_loss;
        out[t] = 100.0 - 100.0 / (1.0 + rs);
      }
    }
  }
  return out;
}

BollingerBands bollinger(const Vec& prices, int n, double k) {
  require(n >= 1, ErrorCode::InvalidArgument, "bollinger: window length must be >= 1");
  require(k >= 0.0, ErrorCode::InvalidArgument, "bollinger: band multiplier must be >= 0");
  require(!prices.empty(), ErrorCode::InvalidArgument, "bollinger: empty input");

  BollingerBands bands;
  bands.middle = sma(prices, n);
  bands.upper.resize(prices.size());
  bands.lower.resize(prices.size());

  // Centered sum of squares per window: the uncentered rolling form loses
  // ~1 ulp of x^2, and sqrt turns that into ~1e-8 of spurious deviation on
  // near-constant windows.
  const auto m = static_cast<std::size_t>(n);
  for (std::size_t t = 0; t < prices.size(); ++t) {
    if (t + 1 < m) continue;
    const double mean = *bands.middle[t];
    double sq = 0.0;
    for (std::size_t i = t + 1 - m; i <= t; ++i) {
      sq += (prices[i] - mean) * (prices[i] - mean);
    }
    const double band = k * std::sqrt(sq / static_cast<double>(n));
    bands.upper[t] = mean + band;
    bands.lower[t] = mean - band;
  }
  return bands;
}

std::size_t min_series_length(const IndicatorConfig& config) {
  const std::size_t longest = std::max({static_cast<std::size_t>(config.sma_n),
                                        static_cast<std::size_t>(config.rsi_n) + 1,
                                        static_cast<std::size_t>(config.bb_n)});
  return longest + 2;
}

FeatureMatrix build_feature_matrix(const PriceSeries& series, const IndicatorConfig& config) {
  config.validate();
  series.validate();

  const std::size_t needed = min_series_length(config);
  if (series.candles.size() < needed) {
    raise(ErrorCode::InsufficientData,
          "series length " + std::to_string(series.candles.size()) +
              " below required minimum " + std::to_string(needed));
  }

  const Vec closes = series.closes();
  const auto sma_vals = sma(closes, config.sma_n);
  const auto rsi_vals = rsi(closes, config.rsi_n);
  const auto bands = bollinger(closes, config.bb_n, config.bb_k);

  // First bar where every indicator is defined; last usable bar must still
  // have a next-bar close to serve as target.
  const std::size_t first =
      std::max({static_cast<std::size_t>(config.sma_n - 1),
                static_cast<std::size_t>(config.rsi_n),
                static_cast<std::size_t>(config.bb_n - 1)});
  const std::size_t last = series.candles.size() - 2;
  const std::size_t count = last - first + 1;

  FeatureMatrix fm;
  fm.feature_names = {"close", "sma", "rsi", "bb_upper", "bb_middle", "bb_lower"};
  fm.rows = Mat(count, kFeatureCount);
  fm.timestamps.reserve(count);
  fm.target_timestamps.reserve(count);
  fm.targets.reserve(count);

  for (std::size_t r = first; r <= last; ++r) {
    const std::size_t i = r - first;
    fm.rows(i, 0) = closes[r];
    fm.rows(i, 1) = *sma_vals[r];
    fm.rows(i, 2) = *rsi_vals[r];
    fm.rows(i, 3) = *bands.upper[r];
    fm.rows(i, 4) = *bands.middle[r];
    fm.rows(i, 5) = *bands.lower[r];
    fm.timestamps.push_back(series.candles[r].timestamp);
    fm.target_timestamps.push_back(series.candles[r + 1].timestamp);
    fm.targets.push_back(closes[r + 1]);
  }

  for (double x : fm.rows.data) {
    require(std::isfinite(x), ErrorCode::Numeric, "feature matrix contains non-finite entry");
  }
  return fm;
}

}  // namespace fxcast
