#include "core/conv1d.hpp"

#include <string>

namespace fxcast {

namespace {

void check_params(const Conv1dParams& p) {
  require(p.kernel_size >= 1, ErrorCode::InvalidArgument, "conv1d: kernel size must be >= 1");
  require(p.w.n0 == p.num_filters && p.w.n1 == p.input_channels && p.w.n2 == p.kernel_size,
          ErrorCode::Shape, "conv1d: weight tensor shape mismatch");
  require(p.b.size() == p.num_filters, ErrorCode::Shape, "conv1d: bias length mismatch");
}

}  // namespace

Conv1dParams conv1d_zeros(std::size_t num_filters, std::size_t input_channels,
                          std::size_t kernel_size) {
  Conv1dParams p;
  p.num_filters = num_filters;
  p.input_channels = input_channels;
  p.kernel_size = kernel_size;
  p.w = Tensor3(num_filters, input_channels, kernel_size);
  p.b.assign(num_filters, 0.0);
  return p;
}

Conv1dForwardResult conv1d_forward(const Conv1dParams& params, const Mat& inputs) {
  check_params(params);
  require(inputs.rows >= 1, ErrorCode::Shape, "conv1d: empty input sequence");
  require(inputs.cols == params.input_channels, ErrorCode::Shape,
          "conv1d: input width " + std::to_string(inputs.cols) + " != input_channels " +
              std::to_string(params.input_channels));

  const std::size_t t_len = inputs.rows;
  const std::size_t d = params.input_channels;
  const std::size_t k_len = params.kernel_size;

  Conv1dForwardResult res;
  res.outputs = Mat(t_len, params.num_filters);
  res.cache.inputs = inputs;

  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t f = 0; f < params.num_filters; ++f) {
      double s = params.b[f];
      for (std::size_t k = 0; k < k_len; ++k) {
        // tap k reads the input row at offset t - (K-1) + k; negative rows
        // are the zero padding
        const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(t + k) -
                                   static_cast<std::ptrdiff_t>(k_len - 1);
        if (row < 0) continue;
        const double* x = inputs.row_ptr(static_cast<std::size_t>(row));
        for (std::size_t c = 0; c < d; ++c) s += x[c] * params.w(f, c, k);
      }
      res.outputs(t, f) = s;
    }
  }
  return res;
}

Conv1dBackwardResult conv1d_backward(const Conv1dParams& params, const Conv1dCache& cache,
                                     const Mat& upstream) {
  check_params(params);
  const std::size_t t_len = cache.inputs.rows;
  const std::size_t d = params.input_channels;
  const std::size_t k_len = params.kernel_size;
  require(cache.inputs.cols == d, ErrorCode::Shape, "conv1d: cache does not match params");
  require(upstream.rows == t_len && upstream.cols == params.num_filters, ErrorCode::Shape,
          "conv1d: upstream gradient shape mismatch");

  Conv1dBackwardResult res;
  res.grads = conv1d_zeros(params.num_filters, d, k_len);
  res.input_grads = Mat(t_len, d);

  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t f = 0; f < params.num_filters; ++f) {
      const double up = upstream(t, f);
      if (up == 0.0) continue;
      res.grads.b[f] += up;
      for (std::size_t k = 0; k < k_len; ++k) {
        const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(t + k) -
                                   static_cast<std::ptrdiff_t>(k_len - 1);
        if (row < 0) continue;
        const double* x = cache.inputs.row_ptr(static_cast<std::size_t>(row));
        double* dx = res.input_grads.row_ptr(static_cast<std::size_t>(row));
        for (std::size_t c = 0; c < d; ++c) {
          res.grads.w(f, c, k) += up * x[c];
          dx[c] += up * params.w(f, c, k);
        }
      }
    }
  }
  return res;
}

}  // namespace fxcast
