#include "core/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "core/rng.hpp"
#include "core/textio.hpp"

namespace fxcast {

namespace {

constexpr std::int64_t kSynthEpochStart = 1577836800;  // 2020-01-01T00:00:00Z
constexpr std::int64_t kSynthBarSeconds = 3600;
const std::string kOhlcHeader = "timestamp,open,high,low,close,volume";

void check_fitted(const Scaler& s) {
  if (!s.fitted) raise(ErrorCode::InvalidState, "scaler used before fitting");
}

}  // namespace

double Scaler::apply_one(double x, std::size_t channel) const {
  check_fitted(*this);
  const double lo = mins[channel];
  const double hi = maxs[channel];
  if (hi == lo) return 0.5;  // degenerate channel
  return (x - lo) / (hi - lo);
}

double Scaler::invert_one(double y, std::size_t channel) const {
  check_fitted(*this);
  const double lo = mins[channel];
  const double hi = maxs[channel];
  if (hi == lo) return lo;
  return y * (hi - lo) + lo;
}

void Scaler::apply_features(Mat& rows) const {
  check_fitted(*this);
  require(rows.cols == feature_channels(), ErrorCode::Shape,
          "scaler: row width does not match fitted channels");
  for (std::size_t r = 0; r < rows.rows; ++r) {
    double* row = rows.row_ptr(r);
    for (std::size_t c = 0; c < rows.cols; ++c) row[c] = apply_one(row[c], c);
  }
}

Scaler Scaler::identity(std::size_t feature_count) {
  Scaler s;
  s.mins.assign(feature_count + 1, 0.0);
  s.maxs.assign(feature_count + 1, 1.0);
  s.fitted = true;
  return s;
}

Scaler fit_scaler(const Mat& rows, const Vec& targets) {
  require(rows.rows >= 1 && rows.rows == targets.size(), ErrorCode::InvalidArgument,
          "fit_scaler: empty input or row/target count mismatch");
  Scaler s;
  s.mins.assign(rows.cols + 1, std::numeric_limits<double>::infinity());
  s.maxs.assign(rows.cols + 1, -std::numeric_limits<double>::infinity());
  for (std::size_t r = 0; r < rows.rows; ++r) {
    for (std::size_t c = 0; c < rows.cols; ++c) {
      s.mins[c] = std::min(s.mins[c], rows(r, c));
      s.maxs[c] = std::max(s.maxs[c], rows(r, c));
    }
    s.mins[rows.cols] = std::min(s.mins[rows.cols], targets[r]);
    s.maxs[rows.cols] = std::max(s.maxs[rows.cols], targets[r]);
  }
  s.fitted = true;
  return s;
}

std::vector<WindowSample> make_windows(const FeatureMatrix& features, std::size_t lookback) {
  require(lookback >= 1, ErrorCode::InvalidArgument, "make_windows: lookback must be >= 1");
  const std::size_t t_rows = features.rows.rows;
  if (t_rows < lookback) {
    raise(ErrorCode::InsufficientData,
          "make_windows: " + std::to_string(t_rows) + " feature rows, need at least " +
              std::to_string(lookback));
  }
  const std::size_t d = features.rows.cols;
  std::vector<WindowSample> samples;
  samples.reserve(t_rows - lookback + 1);
  for (std::size_t j = 0; j + lookback <= t_rows; ++j) {
    WindowSample s;
    s.inputs = Mat(lookback, d);
    for (std::size_t r = 0; r < lookback; ++r) {
      const double* src = features.rows.row_ptr(j + r);
      double* dst = s.inputs.row_ptr(r);
      for (std::size_t c = 0; c < d; ++c) dst[c] = src[c];
    }
    s.target = features.targets[j + lookback - 1];
    s.timestamp = features.target_timestamps[j + lookback - 1];
    samples.push_back(std::move(s));
  }
  return samples;
}

SplitDataset chronological_split(std::vector<WindowSample> samples, double train_fraction,
                                 bool fit) {
  require(samples.size() >= 2, ErrorCode::InvalidArgument,
          "chronological_split: need at least 2 samples");
  require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::InvalidArgument,
          "chronological_split: train fraction must lie in (0, 1)");
  const auto n_train =
      static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(samples.size())));
  if (n_train == 0 || n_train == samples.size()) {
    raise(ErrorCode::InvalidArgument,
          "chronological_split: fraction " + fmt_sig(train_fraction, 6) +
              " leaves an empty partition");
  }

  SplitDataset ds;
  ds.lookback = samples.front().inputs.rows;
  ds.input_size = samples.front().inputs.cols;
  ds.train_fraction = train_fraction;

  if (fit) {
    // Min/max over training inputs and targets only; the test partition must
    // never influence the scaler.
    const std::size_t d = ds.input_size;
    ds.scaler.mins.assign(d + 1, std::numeric_limits<double>::infinity());
    ds.scaler.maxs.assign(d + 1, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n_train; ++i) {
      const Mat& in = samples[i].inputs;
      for (std::size_t r = 0; r < in.rows; ++r) {
        const double* row = in.row_ptr(r);
        for (std::size_t c = 0; c < d; ++c) {
          ds.scaler.mins[c] = std::min(ds.scaler.mins[c], row[c]);
          ds.scaler.maxs[c] = std::max(ds.scaler.maxs[c], row[c]);
        }
      }
      ds.scaler.mins[d] = std::min(ds.scaler.mins[d], samples[i].target);
      ds.scaler.maxs[d] = std::max(ds.scaler.maxs[d], samples[i].target);
    }
    ds.scaler.fitted = true;
  } else {
    ds.scaler = Scaler::identity(ds.input_size);
  }

  for (std::size_t i = 0; i < samples.size(); ++i) {
    WindowSample& s = samples[i];
    ds.scaler.apply_features(s.inputs);
    s.target = ds.scaler.apply_target(s.target);
    (i < n_train ? ds.train : ds.test).push_back(std::move(s));
  }
  return ds;
}

SynthKind synth_kind_from_string(const std::string& name) {
  if (name == "sine") return SynthKind::Sine;
  if (name == "random_walk") return SynthKind::RandomWalk;
  raise(ErrorCode::InvalidArgument,
        "unknown synthetic kind '" + name + "' (expected sine or random_walk)");
}

PriceSeries gen_synthetic(SynthKind kind, std::size_t bars, std::uint64_t seed, double noise) {
  require(bars >= 10, ErrorCode::InvalidArgument, "gen_synthetic: bars must be >= 10");
  require(noise >= 0.0 && noise <= 0.5, ErrorCode::InvalidArgument,
          "gen_synthetic: noise must lie in [0, 0.5]");

  SplitMix64 rng(seed);
  PriceSeries series;
  series.candles.reserve(bars);
  double prev_close = 1.0;

  for (std::size_t t = 0; t < bars; ++t) {
    double close = 0.0;
    if (kind == SynthKind::Sine) {
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / 48.0;
      close = 1.0 + 0.05 * std::sin(phase) + noise * rng.uniform(-1.0, 1.0);
    } else {
      close = t == 0 ? 1.0 : prev_close * (1.0 + noise * rng.uniform(-1.0, 1.0));
    }

    Candle c;
    c.timestamp = kSynthEpochStart + kSynthBarSeconds * static_cast<std::int64_t>(t);
    c.open = t == 0 ? close : prev_close;
    c.close = close;
    const double wick_high = std::abs(0.5 * noise * close * rng.uniform(-1.0, 1.0));
    const double wick_low = std::abs(0.5 * noise * close * rng.uniform(-1.0, 1.0));
    c.high = std::max(c.open, c.close) + wick_high;
    c.low = std::min(c.open, c.close) - wick_low;
    c.volume = 1.0;
    series.candles.push_back(c);
    prev_close = close;
  }
  series.validate();
  return series;
}

PriceSeries load_ohlc_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::Io, "cannot open '" + path + "' for reading");

  std::string line;
  if (!std::getline(in, line)) raise(ErrorCode::Format, path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kOhlcHeader) {
    raise(ErrorCode::Format, path + ": missing or malformed header (expected '" +
                                 kOhlcHeader + "')");
  }

  static const char* kColumns[6] = {"timestamp", "open", "high", "low", "close", "volume"};
  PriceSeries series;
  std::size_t file_line = 1;
  while (std::getline(in, line)) {
    ++file_line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string row = "row " + std::to_string(file_line);
    require(fields.size() == 6, ErrorCode::Format,
            path + ": " + row + ": expected 6 fields, got " + std::to_string(fields.size()));
    Candle c;
    c.timestamp = parse_int64(fields[0], row + ", column " + kColumns[0]);
    c.open = parse_double(fields[1], row + ", column " + kColumns[1]);
    c.high = parse_double(fields[2], row + ", column " + kColumns[2]);
    c.low = parse_double(fields[3], row + ", column " + kColumns[3]);
    c.close = parse_double(fields[4], row + ", column " + kColumns[4]);
    c.volume = parse_double(fields[5], row + ", column " + kColumns[5]);
    series.candles.push_back(c);
  }
  require(!series.candles.empty(), ErrorCode::Format, path + ": no data rows");
  series.validate(/*row_offset=*/1);  // header occupies line 1
  return series;
}

void save_ohlc_csv(const PriceSeries& series, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << kOhlcHeader << '\n';
  for (const Candle& c : series.candles) {
    out << c.timestamp << ',' << fmt_sig(c.open, 10) << ',' << fmt_sig(c.high, 10) << ','
        << fmt_sig(c.low, 10) << ',' << fmt_sig(c.close, 10) << ',' << fmt_sig(c.volume, 10)
        << '\n';
  }
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

void save_features_csv(const FeatureMatrix& features, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << "timestamp";
  for (const std::string& name : features.feature_names) out << ',' << name;
  out << ",target\n";
  for (std::size_t r = 0; r < features.rows.rows; ++r) {
    out << features.timestamps[r];
    for (std::size_t c = 0; c < features.rows.cols; ++c) {
      out << ',' << fmt_sig(features.rows(r, c), 10);
    }
    out << ',' << fmt_sig(features.targets[r], 10) << '\n';
  }
  if (!out) raise(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace fxcast
