#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/indicators.hpp"
#include "core/tensor.hpp"

namespace fxcast {

// Per-channel min-max scaling over d feature channels plus the target
// channel (index d). Fitted on training rows only.
struct Scaler {
  Vec mins;  // length d + 1
  Vec maxs;  // length d + 1
  bool fitted = false;

  std::size_t feature_channels() const { return mins.empty() ? 0 : mins.size() - 1; }

  double apply_one(double x, std::size_t channel) const;
  double invert_one(double y, std::size_t channel) const;

  // Scales the d feature channels of a T x d matrix in place.
  void apply_features(Mat& rows) const;

  double apply_target(double x) const { return apply_one(x, feature_channels()); }
  double invert_target(double y) const { return invert_one(y, feature_channels()); }

  // Identity scaler: min 0, max 1 on every channel.
  static Scaler identity(std::size_t feature_count);
};

Scaler fit_scaler(const Mat& rows, const Vec& targets);

struct WindowSample {
  Mat inputs;                 // L x d
  double target = 0.0;        // next-bar close
  std::int64_t timestamp = 0; // bar the target belongs to
};

struct SplitDataset {
  std::vector<WindowSample> train;
  std::vector<WindowSample> test;
  Scaler scaler;
  std::size_t lookback = 0;
  std::size_t input_size = 0;
  double train_fraction = 0.0;
};

// Sliding lookback windows over consecutive feature rows; produces
// T - L + 1 unscaled samples. Scaling happens after the split.
std::vector<WindowSample> make_windows(const FeatureMatrix& features, std::size_t lookback);

// First floor(train_fraction * N) samples become the training partition.
// The scaler is fitted on training inputs/targets only, then applied to both
// partitions. Pass fit = false to keep raw values (identity scaler).
SplitDataset chronological_split(std::vector<WindowSample> samples, double train_fraction,
                                 bool fit = true);

enum class SynthKind { Sine, RandomWalk };

SynthKind synth_kind_from_string(const std::string& name);

// Deterministic synthetic OHLCV series (hourly bars starting 2020-01-01 UTC).
// sine: close = 1 + 0.05 sin(2 pi t / 48) + noise * u_t;
// random_walk: close_t = close_{t-1} * (1 + noise * u_t), close_0 = 1.
// u draws come from a single splitmix64 stream seeded with `seed`, consumed
// in the order (close, high, low) per bar.
PriceSeries gen_synthetic(SynthKind kind, std::size_t bars, std::uint64_t seed, double noise);

PriceSeries load_ohlc_csv(const std::string& path);
void save_ohlc_csv(const PriceSeries& series, const std::string& path);

// Debug export of a feature matrix: timestamp, the six features, target.
void save_features_csv(const FeatureMatrix& features, const std::string& path);

}  // namespace fxcast
