#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace fxcast {

struct Candle {
  std::int64_t timestamp = 0;  // epoch seconds, UTC
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;
};

struct PriceSeries {
  std::vector<Candle> candles;

  // Throws if a candle violates the OHLC invariants or timestamps are not
  // strictly increasing. `row_offset` shifts reported row numbers so callers
  // parsing files can report file line numbers.
  void validate(std::size_t row_offset = 0) const;

  Vec closes() const;
};

struct IndicatorConfig {
  int sma_n = 20;
  int rsi_n = 14;
  int bb_n = 20;
  double bb_k = 2.0;

  void validate() const;
};

// Per-bar feature vectors aligned with next-bar close targets. Rows where any
// indicator is still warming up, or whose target bar does not exist, are
// dropped rather than imputed.
struct FeatureMatrix {
  std::vector<std::int64_t> timestamps;         // input bar of each row
  std::vector<std::int64_t> target_timestamps;  // bar the target close belongs to
  Mat rows;                                     // T x d
  std::vector<std::string> feature_names;       // d labels
  Vec targets;                                  // next-bar close, length T
};

inline constexpr std::size_t kFeatureCount = 6;

// Simple moving average; entries before index n-1 are unset.
std::vector<std::optional<double>> sma(const Vec& prices, int n);

// Relative strength index over simple means of the last n gains/losses.
// avg_loss == 0 with gains present gives 100; an all-flat window gives 50.
// Entries before index n are unset.
std::vector<std::optional<double>> rsi(const Vec& prices, int n);

struct BollingerBands {
  std::vector<std::optional<double>> upper;
  std::vector<std::optional<double>> middle;
  std::vector<std::optional<double>> lower;
};

// Middle band is the n-bar SMA; outer bands are middle +/- k population
// standard deviations over the same window.
BollingerBands bollinger(const Vec& prices, int n, double k);

// Feature order: [close, sma, rsi, bb_upper, bb_middle, bb_lower].
FeatureMatrix build_feature_matrix(const PriceSeries& series, const IndicatorConfig& config);

// Minimum series length accepted by build_feature_matrix.
std::size_t min_series_length(const IndicatorConfig& config);

}  // namespace fxcast
