#include "core/attention.hpp"

#include <cmath>
#include <string>

#include "core/activations.hpp"

namespace fxcast {

Mat concat_channels(const Mat& h_seq, const Mat& y_seq) {
  require(h_seq.rows == y_seq.rows, ErrorCode::Shape,
          "concat: sequence lengths differ (" + std::to_string(h_seq.rows) + " vs " +
              std::to_string(y_seq.rows) + ")");
  Mat z(h_seq.rows, h_seq.cols + y_seq.cols);
  for (std::size_t t = 0; t < z.rows; ++t) {
    double* zr = z.row_ptr(t);
    const double* hr = h_seq.row_ptr(t);
    const double* yr = y_seq.row_ptr(t);
    for (std::size_t j = 0; j < h_seq.cols; ++j) zr[j] = hr[j];
    for (std::size_t j = 0; j < y_seq.cols; ++j) zr[h_seq.cols + j] = yr[j];
  }
  return z;
}

void split_channels(const Mat& z_grads, std::size_t left_cols, Mat& left, Mat& right) {
  require(left_cols <= z_grads.cols, ErrorCode::Shape, "split: left width exceeds total");
  left = Mat(z_grads.rows, left_cols);
  right = Mat(z_grads.rows, z_grads.cols - left_cols);
  for (std::size_t t = 0; t < z_grads.rows; ++t) {
    const double* zr = z_grads.row_ptr(t);
    for (std::size_t j = 0; j < left.cols; ++j) left(t, j) = zr[j];
    for (std::size_t j = 0; j < right.cols; ++j) right(t, j) = zr[left_cols + j];
  }
}

AttentionForwardResult attention_forward(const AttentionParams& params, const Mat& z) {
  require(z.rows >= 1, ErrorCode::Shape, "attention: empty sequence");
  require(z.cols == params.w.size(), ErrorCode::Shape,
          "attention: feature width " + std::to_string(z.cols) + " != weight length " +
              std::to_string(params.w.size()));

  const std::size_t t_len = z.rows;
  const std::size_t m = z.cols;

  Vec scores(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    const double* zr = z.row_ptr(t);
    double s = params.b;
    for (std::size_t j = 0; j < m; ++j) s += params.w[j] * zr[j];
    require(std::isfinite(s), ErrorCode::Numeric, "attention: non-finite score");
    scores[t] = s;
  }

  AttentionForwardResult res;
  res.cache.z = z;
  res.cache.alpha = softmax(scores);
  res.context.assign(m, 0.0);
  double alpha_sum = 0.0;
  for (std::size_t t = 0; t < t_len; ++t) {
    const double a = res.cache.alpha[t];
    require(a >= 0.0, ErrorCode::Numeric, "attention: negative weight");
    alpha_sum += a;
    const double* zr = z.row_ptr(t);
    for (std::size_t j = 0; j < m; ++j) res.context[j] += a * zr[j];
  }
  require(std::abs(alpha_sum - 1.0) < 1e-9, ErrorCode::Numeric,
          "attention: weights do not sum to 1");

  // Convex-combination contract: the context stays inside the per-channel
  // envelope of the rows.
  for (std::size_t j = 0; j < m; ++j) {
    double lo = z(0, j), hi = z(0, j);
    for (std::size_t t = 1; t < t_len; ++t) {
      lo = std::min(lo, z(t, j));
      hi = std::max(hi, z(t, j));
    }
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    require(res.context[j] >= lo - slack && res.context[j] <= hi + slack,
            ErrorCode::Numeric, "attention: context left the convex hull");
  }
  return res;
}

AttentionBackwardResult attention_backward(const AttentionParams& params,
                                           const AttentionCache& cache, const Vec& upstream) {
  const std::size_t t_len = cache.z.rows;
  const std::size_t m = cache.z.cols;
  require(params.w.size() == m, ErrorCode::Shape, "attention: cache does not match params");
  require(cache.alpha.size() == t_len, ErrorCode::Shape, "attention: malformed cache");
  require(upstream.size() == m, ErrorCode::Shape, "attention: upstream length mismatch");

  AttentionBackwardResult res;
  res.grads.w.assign(m, 0.0);
  res.grads.b = 0.0;
  res.z_grads = Mat(t_len, m);

  // d<upstream, c>/d alpha_t, then through the softmax Jacobian.
  Vec dalpha(t_len);
  double dot = 0.0;
  for (std::size_t t = 0; t < t_len; ++t) {
    const double* zr = cache.z.row_ptr(t);
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += upstream[j] * zr[j];
    dalpha[t] = s;
    dot += cache.alpha[t] * s;
  }

  for (std::size_t t = 0; t < t_len; ++t) {
    const double a = cache.alpha[t];
    const double dscore = a * (dalpha[t] - dot);
    const double* zr = cache.z.row_ptr(t);
    double* gz = res.z_grads.row_ptr(t);
    res.grads.b += dscore;
    for (std::size_t j = 0; j < m; ++j) {
      res.grads.w[j] += dscore * zr[j];
      gz[j] = a * upstream[j] + dscore * params.w[j];
    }
  }
  return res;
}

}  // namespace fxcast
