#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/attention.hpp"
#include "core/conv1d.hpp"
#include "core/dataset.hpp"
#include "core/dense.hpp"
#include "core/lstm.hpp"

namespace fxcast {

enum class Variant { Hybrid, LstmOnly, CnnOnly };

const char* variant_name(Variant v);             // "hybrid", "lstm_only", "cnn_only"
const char* variant_table_label(Variant v);      // labels used in comparison tables
Variant variant_from_string(const std::string& name);

struct ModelSpec {
  Variant variant = Variant::Hybrid;
  std::size_t input_size = kFeatureCount;
  std::size_t hidden_size = 64;
  std::size_t num_filters = 32;
  std::size_t kernel_size = 3;
  std::size_t lookback = 60;

  void validate() const;

  // Width of the sequence the attention head consumes.
  std::size_t fused_width() const;
};

struct ModelParams {
  ModelSpec spec;
  std::optional<LstmParams> lstm;   // absent for cnn_only
  std::optional<Conv1dParams> conv; // absent for lstm_only
  AttentionParams attention;
  DenseParams dense;
};

struct ModelGrads {
  std::optional<LstmGrads> lstm;
  std::optional<Conv1dGrads> conv;
  AttentionGrads attention;
  DenseGrads dense;
};

ModelGrads grads_zeros(const ModelSpec& spec);

struct ForwardTrace {
  std::optional<LstmCache> lstm;
  std::optional<Conv1dCache> conv;
  AttentionCache attention;
  Vec context;
  double prediction = 0.0;
};

// Glorot-uniform weights, zero biases. Identical (spec, seed) pairs yield
// bitwise-identical parameters: a single splitmix64 stream fills the tensors
// in declaration order (lstm w_f, w_i, w_c, w_o; conv w; attention w;
// dense w), each row-major.
ModelParams init_params(const ModelSpec& spec, std::uint64_t seed);

struct ModelForwardResult {
  double prediction = 0.0;
  ForwardTrace trace;
};

ModelForwardResult model_forward(const ModelParams& params, const Mat& window);

ModelGrads model_backward(const ModelParams& params, const ForwardTrace& trace,
                          double d_loss_d_pred);

struct PredictionRow {
  std::int64_t timestamp = 0;
  double predicted = 0.0;
  double actual = 0.0;
};

// Runs the model over every full lookback window of an unscaled feature
// matrix, scaling inputs with the training-time scaler and inverse-scaling
// predictions back to price units.
std::vector<PredictionRow> predict_series(const ModelParams& params,
                                          const FeatureMatrix& features, const Scaler& scaler);

// Mutable views over every parameter tensor in the fixed traversal order
// shared by the optimizer and serialization. Scalars appear as 1-element
// spans.
std::vector<std::span<double>> param_views(ModelParams& p);
std::vector<std::span<const double>> param_views(const ModelParams& p);
std::vector<std::span<double>> grad_views(ModelGrads& g);
std::vector<std::span<const double>> grad_views(const ModelGrads& g);

}  // namespace fxcast
