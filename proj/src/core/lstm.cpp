#include "core/lstm.hpp"

#include <cmath>
#include <string>

#include "core/activations.hpp"

namespace fxcast {

namespace {

void check_params(const LstmParams& p) {
  const std::size_t h = p.hidden_size;
  const std::size_t width = h + p.input_size;
  auto check = [&](const Mat& w, const Vec& b, const char* name) {
    require(w.rows == h && w.cols == width, ErrorCode::Shape,
            std::string("lstm: ") + name + " weight shape mismatch");
    require(b.size() == h, ErrorCode::Shape,
            std::string("lstm: ") + name + " bias length mismatch");
  };
  check(p.w_f, p.b_f, "forget");
  check(p.w_i, p.b_i, "input");
  check(p.w_c, p.b_c, "candidate");
  check(p.w_o, p.b_o, "output");
}

// out[r] = b[r] + W.row(r) . z
void affine(const Mat& w, const Vec& b, const Vec& z, Vec& out) {
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* wr = w.row_ptr(r);
    double s = b[r];
    for (std::size_t j = 0; j < w.cols; ++j) s += wr[j] * z[j];
    out[r] = s;
  }
}

}  // namespace

LstmParams lstm_zeros(std::size_t hidden_size, std::size_t input_size) {
  LstmParams p;
  p.hidden_size = hidden_size;
  p.input_size = input_size;
  const std::size_t width = hidden_size + input_size;
  p.w_f = Mat(hidden_size, width);
  p.w_i = Mat(hidden_size, width);
  p.w_c = Mat(hidden_size, width);
  p.w_o = Mat(hidden_size, width);
  p.b_f.assign(hidden_size, 0.0);
  p.b_i.assign(hidden_size, 0.0);
  p.b_c.assign(hidden_size, 0.0);
  p.b_o.assign(hidden_size, 0.0);
  return p;
}

LstmForwardResult lstm_forward(const LstmParams& params, const Mat& inputs,
                               const Vec& c0, const Vec& h0) {
  check_params(params);
  const std::size_t h = params.hidden_size;
  const std::size_t d = params.input_size;
  const std::size_t t_len = inputs.rows;
  require(inputs.cols == d, ErrorCode::Shape,
          "lstm: input width " + std::to_string(inputs.cols) +
              " != input_size " + std::to_string(d));
  require(c0.size() == h, ErrorCode::Shape, "lstm: initial cell state length mismatch");
  require(h0.size() == h, ErrorCode::Shape, "lstm: initial hidden state length mismatch");

  LstmForwardResult res;
  res.hidden = Mat(t_len, h);
  LstmCache& cache = res.cache;
  cache.inputs = inputs;
  cache.f = Mat(t_len, h);
  cache.i = Mat(t_len, h);
  cache.o = Mat(t_len, h);
  cache.c_tilde = Mat(t_len, h);
  cache.c = Mat(t_len, h);
  cache.h = Mat(t_len, h);
  cache.tanh_c = Mat(t_len, h);
  cache.c0 = c0;
  cache.h0 = h0;

  Vec z(h + d);
  Vec pre(h);
  Vec c_prev = c0;
  Vec h_prev = h0;

  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t j = 0; j < h; ++j) z[j] = h_prev[j];
    const double* x = inputs.row_ptr(t);
    for (std::size_t j = 0; j < d; ++j) z[h + j] = x[j];

    affine(params.w_f, params.b_f, z, pre);
    for (std::size_t j = 0; j < h; ++j) cache.f(t, j) = sigmoid_scalar(pre[j]);
    affine(params.w_i, params.b_i, z, pre);
    for (std::size_t j = 0; j < h; ++j) cache.i(t, j) = sigmoid_scalar(pre[j]);
    affine(params.w_c, params.b_c, z, pre);
    for (std::size_t j = 0; j < h; ++j) cache.c_tilde(t, j) = std::tanh(pre[j]);
    affine(params.w_o, params.b_o, z, pre);
    for (std::size_t j = 0; j < h; ++j) cache.o(t, j) = sigmoid_scalar(pre[j]);

    for (std::size_t j = 0; j < h; ++j) {
      const double c_t = cache.f(t, j) * c_prev[j] + cache.i(t, j) * cache.c_tilde(t, j);
      const double tc = std::tanh(c_t);
      cache.c(t, j) = c_t;
      cache.tanh_c(t, j) = tc;
      const double h_t = cache.o(t, j) * tc;
      cache.h(t, j) = h_t;
      res.hidden(t, j) = h_t;
    }
    c_prev.assign(cache.c.row_ptr(t), cache.c.row_ptr(t) + h);
    h_prev.assign(cache.h.row_ptr(t), cache.h.row_ptr(t) + h);
  }
  return res;
}

LstmForwardResult lstm_forward(const LstmParams& params, const Mat& inputs) {
  return lstm_forward(params, inputs, Vec(params.hidden_size, 0.0),
                      Vec(params.hidden_size, 0.0));
}

LstmBackwardResult lstm_backward(const LstmParams& params, const LstmCache& cache,
                                 const Mat& upstream) {
  check_params(params);
  const std::size_t h = params.hidden_size;
  const std::size_t d = params.input_size;
  const std::size_t t_len = cache.h.rows;
  require(cache.inputs.cols == d && cache.h.cols == h, ErrorCode::Shape,
          "lstm: cache does not match params");
  require(upstream.rows == t_len && upstream.cols == h, ErrorCode::Shape,
          "lstm: upstream gradient shape mismatch");

  LstmBackwardResult res;
  res.grads = lstm_zeros(h, d);
  res.input_grads = Mat(t_len, d);

  Vec dh_next(h, 0.0);
  Vec dc_next(h, 0.0);
  Vec z(h + d);
  Vec da_f(h), da_i(h), da_c(h), da_o(h);
  Vec dz(h + d);

  for (std::size_t ti = t_len; ti-- > 0;) {
    const double* h_prev = ti == 0 ? cache.h0.data() : cache.h.row_ptr(ti - 1);
    const double* c_prev = ti == 0 ? cache.c0.data() : cache.c.row_ptr(ti - 1);
    for (std::size_t j = 0; j < h; ++j) z[j] = h_prev[j];
    const double* x = cache.inputs.row_ptr(ti);
    for (std::size_t j = 0; j < d; ++j) z[h + j] = x[j];

    for (std::size_t j = 0; j < h; ++j) {
      const double f = cache.f(ti, j);
      const double i = cache.i(ti, j);
      const double o = cache.o(ti, j);
      const double g = cache.c_tilde(ti, j);
      const double tc = cache.tanh_c(ti, j);

      const double dh = upstream(ti, j) + dh_next[j];
      const double dc = dc_next[j] + dh * o * (1.0 - tc * tc);

      da_o[j] = dh * tc * o * (1.0 - o);
      da_f[j] = dc * c_prev[j] * f * (1.0 - f);
      da_i[j] = dc * g * i * (1.0 - i);
      da_c[j] = dc * i * (1.0 - g * g);
      dc_next[j] = dc * f;
    }

    std::fill(dz.begin(), dz.end(), 0.0);
    auto accumulate = [&](const Mat& w, Mat& dw, Vec& db, const Vec& da) {
      for (std::size_t r = 0; r < h; ++r) {
        const double a = da[r];
        db[r] += a;
        double* dwr = dw.row_ptr(r);
        const double* wr = w.row_ptr(r);
        for (std::size_t j = 0; j < h + d; ++j) {
          dwr[j] += a * z[j];
          dz[j] += a * wr[j];
        }
      }
    };
    accumulate(params.w_f, res.grads.w_f, res.grads.b_f, da_f);
    accumulate(params.w_i, res.grads.w_i, res.grads.b_i, da_i);
    accumulate(params.w_c, res.grads.w_c, res.grads.b_c, da_c);
    accumulate(params.w_o, res.grads.w_o, res.grads.b_o, da_o);

    for (std::size_t j = 0; j < h; ++j) dh_next[j] = dz[j];
    for (std::size_t j = 0; j < d; ++j) res.input_grads(ti, j) = dz[h + j];
  }
  return res;
}

}  // namespace fxcast
