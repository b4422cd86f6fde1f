#pragma once

#include <cstddef>

#include "core/tensor.hpp"

namespace fxcast {

// Causal 1D convolution. Tap K-1 multiplies the newest sample of the trailing
// window; the input is treated as left-padded with K-1 zero rows so the output
// length equals the input length. No activation is applied.
struct Conv1dParams {
  Tensor3 w;  // F x d x K
  Vec b;      // F
  std::size_t num_filters = 0;
  std::size_t input_channels = 0;
  std::size_t kernel_size = 0;
};

Conv1dParams conv1d_zeros(std::size_t num_filters, std::size_t input_channels,
                          std::size_t kernel_size);

using Conv1dGrads = Conv1dParams;

struct Conv1dCache {
  Mat inputs;  // T x d; padding rows are implicit
};

struct Conv1dForwardResult {
  Mat outputs;  // T x F
  Conv1dCache cache;
};

Conv1dForwardResult conv1d_forward(const Conv1dParams& params, const Mat& inputs);

struct Conv1dBackwardResult {
  Conv1dGrads grads;
  Mat input_grads;  // T x d; contributions to padding rows are discarded
};

Conv1dBackwardResult conv1d_backward(const Conv1dParams& params, const Conv1dCache& cache,
                                     const Mat& upstream);

}  // namespace fxcast
