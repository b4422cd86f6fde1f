#include "core/model.hpp"

#include <cmath>
#include <string>

#include "core/rng.hpp"

namespace fxcast {

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Hybrid: return "hybrid";
    case Variant::LstmOnly: return "lstm_only";
    case Variant::CnnOnly: return "cnn_only";
  }
  return "?";
}

const char* variant_table_label(Variant v) {
  switch (v) {
    case Variant::Hybrid: return "CNN1D-LSTM-Attention";
    case Variant::LstmOnly: return "LSTM";
    case Variant::CnnOnly: return "CNN1D";
  }
  return "?";
}

Variant variant_from_string(const std::string& name) {
  if (name == "hybrid") return Variant::Hybrid;
  if (name == "lstm_only") return Variant::LstmOnly;
  if (name == "cnn_only") return Variant::CnnOnly;
  raise(ErrorCode::InvalidArgument,
        "unknown variant '" + name + "' (expected hybrid, lstm_only or cnn_only)");
}

void ModelSpec::validate() const {
  require(input_size >= 1, ErrorCode::InvalidArgument, "model spec: input_size must be >= 1");
  require(hidden_size >= 1, ErrorCode::InvalidArgument, "model spec: hidden_size must be >= 1");
  require(num_filters >= 1, ErrorCode::InvalidArgument, "model spec: num_filters must be >= 1");
  require(lookback >= 2, ErrorCode::InvalidArgument, "model spec: lookback must be >= 2");
  require(kernel_size >= 1 && kernel_size <= lookback, ErrorCode::InvalidArgument,
          "model spec: kernel_size must lie in [1, lookback]");
}

std::size_t ModelSpec::fused_width() const {
  switch (variant) {
    case Variant::Hybrid: return hidden_size + num_filters;
    case Variant::LstmOnly: return hidden_size;
    case Variant::CnnOnly: return num_filters;
  }
  return 0;
}

namespace {

bool uses_lstm(Variant v) { return v != Variant::CnnOnly; }
bool uses_conv(Variant v) { return v != Variant::LstmOnly; }

void fill_glorot(SplitMix64& rng, std::vector<double>& data, std::size_t fan_in,
                 std::size_t fan_out) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& x : data) x = rng.uniform(-r, r);
}

}  // namespace

ModelGrads grads_zeros(const ModelSpec& spec) {
  ModelGrads g;
  if (uses_lstm(spec.variant)) g.lstm = lstm_zeros(spec.hidden_size, spec.input_size);
  if (uses_conv(spec.variant)) {
    g.conv = conv1d_zeros(spec.num_filters, spec.input_size, spec.kernel_size);
  }
  g.attention.w.assign(spec.fused_width(), 0.0);
  g.attention.b = 0.0;
  g.dense.w.assign(spec.fused_width(), 0.0);
  g.dense.b = 0.0;
  return g;
}

ModelParams init_params(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  SplitMix64 rng(seed);

  ModelParams p;
  p.spec = spec;
  if (uses_lstm(spec.variant)) {
    LstmParams lstm = lstm_zeros(spec.hidden_size, spec.input_size);
    const std::size_t fan_in = spec.hidden_size + spec.input_size;
    fill_glorot(rng, lstm.w_f.data, fan_in, spec.hidden_size);
    fill_glorot(rng, lstm.w_i.data, fan_in, spec.hidden_size);
    fill_glorot(rng, lstm.w_c.data, fan_in, spec.hidden_size);
    fill_glorot(rng, lstm.w_o.data, fan_in, spec.hidden_size);
    p.lstm = std::move(lstm);
  }
  if (uses_conv(spec.variant)) {
    Conv1dParams conv = conv1d_zeros(spec.num_filters, spec.input_size, spec.kernel_size);
    fill_glorot(rng, conv.w.data, spec.input_size * spec.kernel_size,
                spec.num_filters * spec.kernel_size);
    p.conv = std::move(conv);
  }
  const std::size_t m = spec.fused_width();
  p.attention.w.assign(m, 0.0);
  fill_glorot(rng, p.attention.w, m, 1);
  p.attention.b = 0.0;
  p.dense.w.assign(m, 0.0);
  fill_glorot(rng, p.dense.w, m, 1);
  p.dense.b = 0.0;
  return p;
}

ModelForwardResult model_forward(const ModelParams& params, const Mat& window) {
  const ModelSpec& spec = params.spec;
  spec.validate();
  require(window.rows == spec.lookback && window.cols == spec.input_size, ErrorCode::Shape,
          "model: window shape " + std::to_string(window.rows) + "x" +
              std::to_string(window.cols) + " does not match spec " +
              std::to_string(spec.lookback) + "x" + std::to_string(spec.input_size));

  ModelForwardResult res;
  Mat z;
  switch (spec.variant) {
    case Variant::Hybrid: {
      auto lstm = lstm_forward(*params.lstm, window);
      auto conv = conv1d_forward(*params.conv, window);
      z = concat_channels(lstm.hidden, conv.outputs);
      res.trace.lstm = std::move(lstm.cache);
      res.trace.conv = std::move(conv.cache);
      break;
    }
    case Variant::LstmOnly: {
      auto lstm = lstm_forward(*params.lstm, window);
      z = std::move(lstm.hidden);
      res.trace.lstm = std::move(lstm.cache);
      break;
    }
    case Variant::CnnOnly: {
      auto conv = conv1d_forward(*params.conv, window);
      z = std::move(conv.outputs);
      res.trace.conv = std::move(conv.cache);
      break;
    }
  }

  auto attn = attention_forward(params.attention, z);
  res.trace.attention = std::move(attn.cache);
  res.trace.context = attn.context;
  res.prediction = dense_forward(params.dense, attn.context);
  res.trace.prediction = res.prediction;
  require(std::isfinite(res.prediction), ErrorCode::Numeric, "model: non-finite prediction");
  return res;
}

ModelGrads model_backward(const ModelParams& params, const ForwardTrace& trace,
                          double d_loss_d_pred) {
  const ModelSpec& spec = params.spec;
  const bool lstm_ok = uses_lstm(spec.variant) == trace.lstm.has_value();
  const bool conv_ok = uses_conv(spec.variant) == trace.conv.has_value();
  require(lstm_ok && conv_ok, ErrorCode::InvalidState,
          "model: trace does not match variant " + std::string(variant_name(spec.variant)));

  ModelGrads grads;
  auto dense = dense_backward(params.dense, trace.context, d_loss_d_pred);
  grads.dense = std::move(dense.grads);

  auto attn = attention_backward(params.attention, trace.attention, dense.context_grad);
  grads.attention = std::move(attn.grads);

  switch (spec.variant) {
    case Variant::Hybrid: {
      Mat lstm_upstream, conv_upstream;
      split_channels(attn.z_grads, spec.hidden_size, lstm_upstream, conv_upstream);
      grads.lstm = lstm_backward(*params.lstm, *trace.lstm, lstm_upstream).grads;
      grads.conv = conv1d_backward(*params.conv, *trace.conv, conv_upstream).grads;
      break;
    }
    case Variant::LstmOnly:
      grads.lstm = lstm_backward(*params.lstm, *trace.lstm, attn.z_grads).grads;
      break;
    case Variant::CnnOnly:
      grads.conv = conv1d_backward(*params.conv, *trace.conv, attn.z_grads).grads;
      break;
  }
  return grads;
}

std::vector<PredictionRow> predict_series(const ModelParams& params,
                                          const FeatureMatrix& features, const Scaler& scaler) {
  const std::size_t lookback = params.spec.lookback;
  const std::size_t t_rows = features.rows.rows;
  if (t_rows < lookback) {
    raise(ErrorCode::InsufficientData,
          "predict: " + std::to_string(t_rows) + " feature rows, need at least " +
              std::to_string(lookback));
  }
  require(features.rows.cols == params.spec.input_size, ErrorCode::Shape,
          "predict: feature width " + std::to_string(features.rows.cols) +
              " does not match model input size " + std::to_string(params.spec.input_size));

  std::vector<PredictionRow> rows;
  rows.reserve(t_rows - lookback + 1);
  Mat window(lookback, features.rows.cols);
  for (std::size_t j = 0; j + lookback <= t_rows; ++j) {
    for (std::size_t r = 0; r < lookback; ++r) {
      const double* src = features.rows.row_ptr(j + r);
      double* dst = window.row_ptr(r);
      for (std::size_t c = 0; c < window.cols; ++c) dst[c] = scaler.apply_one(src[c], c);
    }
    const double pred_scaled = model_forward(params, window).prediction;
    PredictionRow row;
    row.timestamp = features.target_timestamps[j + lookback - 1];
    row.predicted = scaler.invert_target(pred_scaled);
    row.actual = features.targets[j + lookback - 1];
    rows.push_back(row);
  }
  return rows;
}

namespace {

template <typename Model, typename Span>
std::vector<Span> collect_views(Model& p) {
  std::vector<Span> views;
  if (p.lstm) {
    auto& l = *p.lstm;
    for (auto* m : {&l.w_f, &l.w_i, &l.w_c, &l.w_o}) views.emplace_back(m->data);
    for (auto* b : {&l.b_f, &l.b_i, &l.b_c, &l.b_o}) views.emplace_back(*b);
  }
  if (p.conv) {
    views.emplace_back(p.conv->w.data);
    views.emplace_back(p.conv->b);
  }
  views.emplace_back(p.attention.w);
  views.emplace_back(&p.attention.b, 1);
  views.emplace_back(p.dense.w);
  views.emplace_back(&p.dense.b, 1);
  return views;
}

}  // namespace

std::vector<std::span<double>> param_views(ModelParams& p) {
  return collect_views<ModelParams, std::span<double>>(p);
}
std::vector<std::span<const double>> param_views(const ModelParams& p) {
  return collect_views<const ModelParams, std::span<const double>>(p);
}
std::vector<std::span<double>> grad_views(ModelGrads& g) {
  return collect_views<ModelGrads, std::span<double>>(g);
}
std::vector<std::span<const double>> grad_views(const ModelGrads& g) {
  return collect_views<const ModelGrads, std::span<const double>>(g);
}

}  // namespace fxcast
