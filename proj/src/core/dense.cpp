#include "core/dense.hpp"

#include <string>

namespace fxcast {

double dense_forward(const DenseParams& params, const Vec& context) {
  require(params.w.size() == context.size(), ErrorCode::Shape,
          "dense: context length " + std::to_string(context.size()) + " != weight length " +
              std::to_string(params.w.size()));
  double y = params.b;
  for (std::size_t j = 0; j < context.size(); ++j) y += params.w[j] * context[j];
  return y;
}

DenseBackwardResult dense_backward(const DenseParams& params, const Vec& context,
                                   double upstream) {
  require(params.w.size() == context.size(), ErrorCode::Shape,
          "dense: context length mismatch in backward");
  DenseBackwardResult res;
  res.grads.w.resize(context.size());
  res.context_grad.resize(context.size());
  for (std::size_t j = 0; j < context.size(); ++j) {
    res.grads.w[j] = upstream * context[j];
    res.context_grad[j] = upstream * params.w[j];
  }
  res.grads.b = upstream;
  return res;
}

}  // namespace fxcast
