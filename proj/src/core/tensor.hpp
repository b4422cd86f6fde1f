#pragma once

#include <cstddef>
#include <vector>

#include "core/errors.hpp"

namespace fxcast {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row_ptr(std::size_t r) { return data.data() + r * cols; }
  const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

// Rank-3 tensor, filters x channels x taps, innermost index contiguous.
struct Tensor3 {
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(std::size_t a, std::size_t b, std::size_t c)
      : n0(a), n1(b), n2(c), data(a * b * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data[(i * n1 + j) * n2 + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data[(i * n1 + j) * n2 + k];
  }
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) raise(code, msg);
}

}  // namespace fxcast
