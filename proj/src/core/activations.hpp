#pragma once

#include "core/tensor.hpp"

namespace fxcast {

// Branch-stable logistic sigmoid; saturates instead of overflowing.
double sigmoid_scalar(double x);

Vec sigmoid(const Vec& v);
Vec tanh_vec(const Vec& v);

// Max-subtracted softmax over the whole vector. Throws InvalidArgument on
// empty input.
Vec softmax(const Vec& v);

}  // namespace fxcast
