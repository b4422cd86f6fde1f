#pragma once

#include <cstddef>
#include <utility>

#include "core/tensor.hpp"

namespace fxcast {

// Gate weights act on the concatenation [h_{t-1}, x_t], hidden block first.
struct LstmParams {
  Mat w_f, w_i, w_c, w_o;  // H x (H + d)
  Vec b_f, b_i, b_c, b_o;  // H
  std::size_t hidden_size = 0;
  std::size_t input_size = 0;
};

LstmParams lstm_zeros(std::size_t hidden_size, std::size_t input_size);

// Gradients mirror the parameter shapes exactly.
using LstmGrads = LstmParams;

// Every forward intermediate needed by backpropagation through time.
struct LstmCache {
  Mat inputs;             // T x d
  Mat f, i, o, c_tilde;   // T x H, post-activation gates
  Mat c, h;               // T x H, cell and hidden states
  Mat tanh_c;             // T x H
  Vec c0, h0;             // initial state
};

struct LstmForwardResult {
  Mat hidden;  // T x H
  LstmCache cache;
};

LstmForwardResult lstm_forward(const LstmParams& params, const Mat& inputs,
                               const Vec& c0, const Vec& h0);

// Zero initial state.
LstmForwardResult lstm_forward(const LstmParams& params, const Mat& inputs);

struct LstmBackwardResult {
  LstmGrads grads;
  Mat input_grads;  // T x d
};

// Gradients of sum_t <upstream_t, h_t>; accumulation runs t = T..1.
LstmBackwardResult lstm_backward(const LstmParams& params, const LstmCache& cache,
                                 const Mat& upstream);

}  // namespace fxcast
