#pragma once

#include <cstddef>

#include "core/tensor.hpp"

namespace fxcast {

// Row-wise concatenation [h_t || y_t], LSTM channels first.
Mat concat_channels(const Mat& h_seq, const Mat& y_seq);

// Splits an upstream gradient over the concatenation back into its operands.
void split_channels(const Mat& z_grads, std::size_t left_cols, Mat& left, Mat& right);

// Scores each time step with a single learned scalar, softmaxes across time,
// and returns the weighted sum of rows.
struct AttentionParams {
  Vec w;          // length M
  double b = 0.0;
};

using AttentionGrads = AttentionParams;

struct AttentionCache {
  Mat z;      // T x M
  Vec alpha;  // length T, sums to 1
};

struct AttentionForwardResult {
  Vec context;  // length M
  AttentionCache cache;
};

AttentionForwardResult attention_forward(const AttentionParams& params, const Mat& z);

struct AttentionBackwardResult {
  AttentionGrads grads;
  Mat z_grads;  // T x M
};

// Gradients of <upstream, context>, including the softmax Jacobian.
AttentionBackwardResult attention_backward(const AttentionParams& params,
                                           const AttentionCache& cache, const Vec& upstream);

}  // namespace fxcast
