#pragma once

#include "core/tensor.hpp"

namespace fxcast {

// Linear regression head: y = w . c + b.
struct DenseParams {
  Vec w;          // length M
  double b = 0.0;
};

using DenseGrads = DenseParams;

double dense_forward(const DenseParams& params, const Vec& context);

struct DenseBackwardResult {
  DenseGrads grads;
  Vec context_grad;
};

DenseBackwardResult dense_backward(const DenseParams& params, const Vec& context,
                                   double upstream);

}  // namespace fxcast
