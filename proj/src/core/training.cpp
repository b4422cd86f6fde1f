#include "core/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>
#include <thread>

#include "core/rng.hpp"

namespace fxcast {

void TrainConfig::validate() const {
  require(learning_rate > 0.0, ErrorCode::InvalidArgument, "train: learning_rate must be > 0");
  require(beta1 > 0.0 && beta1 < 1.0, ErrorCode::InvalidArgument,
          "train: beta1 must lie in (0, 1)");
  require(beta2 > 0.0 && beta2 < 1.0, ErrorCode::InvalidArgument,
          "train: beta2 must lie in (0, 1)");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "train: epsilon must be > 0");
  require(epochs >= 1, ErrorCode::InvalidArgument, "train: epochs must be >= 1");
  require(batch_size >= 1, ErrorCode::InvalidArgument, "train: batch_size must be >= 1");
  require(validation_fraction >= 0.0 && validation_fraction < 1.0, ErrorCode::InvalidArgument,
          "train: validation_fraction must lie in [0, 1)");
}

AdamState adam_init(const ModelSpec& spec) {
  AdamState state;
  state.m = grads_zeros(spec);
  state.v = grads_zeros(spec);
  state.step = 0;
  return state;
}

void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state,
               const TrainConfig& config) {
  auto p_views = param_views(params);
  auto g_views = grad_views(grads);
  auto m_views = grad_views(state.m);
  auto v_views = grad_views(state.v);
  require(p_views.size() == g_views.size() && p_views.size() == m_views.size(),
          ErrorCode::Shape, "adam: gradient/state structure does not match params");

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);

  for (std::size_t k = 0; k < p_views.size(); ++k) {
    auto p = p_views[k];
    auto g = g_views[k];
    auto m = m_views[k];
    auto v = v_views[k];
    require(p.size() == g.size() && p.size() == m.size() && p.size() == v.size(),
            ErrorCode::Shape, "adam: tensor size mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

std::pair<double, Vec> mse_loss(const Vec& predictions, const Vec& targets) {
  require(!predictions.empty() && predictions.size() == targets.size(),
          ErrorCode::InvalidArgument, "mse_loss: empty input or length mismatch");
  const double n = static_cast<double>(predictions.size());
  double loss = 0.0;
  Vec grads(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double diff = predictions[i] - targets[i];
    loss += diff * diff;
    grads[i] = 2.0 * diff / n;
  }
  return {loss / n, std::move(grads)};
}

namespace {

void accumulate(ModelGrads& acc, const ModelGrads& g) {
  auto a = grad_views(acc);
  auto b = grad_views(g);
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k].size(); ++i) a[k][i] += b[k][i];
  }
}

void scale(ModelGrads& g, double s) {
  for (auto view : grad_views(g)) {
    for (double& x : view) x *= s;
  }
}

double validation_mse(const ModelParams& params, const std::vector<WindowSample>& samples) {
  double sum = 0.0;
  for (const WindowSample& s : samples) {
    const double diff = model_forward(params, s.inputs).prediction - s.target;
    sum += diff * diff;
  }
  return sum / static_cast<double>(samples.size());
}

// Per-sample losses and gradients for one mini-batch. Samples are distributed
// over worker threads but land in per-sample slots, so the serial reduction
// below is independent of the thread count. Exceptions land in per-sample
// slots too; the first one (by sample index) is rethrown on the caller's
// thread.
void batch_gradients(const ModelParams& params, const std::vector<WindowSample>& samples,
                     const std::vector<std::size_t>& indices, std::size_t begin,
                     std::size_t end, std::size_t threads, std::vector<double>& losses,
                     std::vector<ModelGrads>& slots) {
  const std::size_t count = end - begin;
  std::vector<std::exception_ptr> errors(count);
  auto worker = [&](std::size_t first, std::size_t last) {
    for (std::size_t i = first; i < last; ++i) {
      try {
        const WindowSample& s = samples[indices[begin + i]];
        auto fwd = model_forward(params, s.inputs);
        const double diff = fwd.prediction - s.target;
        losses[i] = diff * diff;
        slots[i] = model_backward(params, fwd.trace, 2.0 * diff);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (threads <= 1 || count < 2) {
    worker(0, count);
  } else {
    const std::size_t n_workers = std::min(threads, count);
    const std::size_t chunk = (count + n_workers - 1) / n_workers;
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      const std::size_t first = w * chunk;
      const std::size_t last = std::min(count, first + chunk);
      if (first >= last) break;
      pool.emplace_back(worker, first, last);
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
}

}  // namespace

std::pair<ModelParams, TrainReport> train(const ModelSpec& spec, const SplitDataset& data,
                                          const TrainConfig& config) {
  spec.validate();
  config.validate();
  require(!data.train.empty(), ErrorCode::InvalidArgument, "train: empty training partition");
  require(data.input_size == spec.input_size && data.lookback == spec.lookback,
          ErrorCode::Shape, "train: dataset window shape does not match model spec");

  const auto t_start = std::chrono::steady_clock::now();

  const std::size_t n_total = data.train.size();
  const auto n_val = static_cast<std::size_t>(
      std::floor(config.validation_fraction * static_cast<double>(n_total)));
  const std::size_t n_train = n_total - n_val;
  const bool validate_epochs = n_val > 0;
  const std::vector<WindowSample> val_samples(data.train.end() - static_cast<std::ptrdiff_t>(n_val),
                                              data.train.end());

  ModelParams params = init_params(spec, config.seed);
  AdamState state = adam_init(spec);
  // Shuffle stream is separate from the init stream so window order never
  // perturbs initialization.
  SplitMix64 shuffle_rng(config.seed ^ 0xD1B54A32D192ED03ull);

  const std::size_t threads =
      config.threads > 0 ? config.threads
                         : std::max<std::size_t>(1, std::thread::hardware_concurrency());

  TrainReport report;
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> losses(config.batch_size);
  std::vector<ModelGrads> slots(config.batch_size);

  ModelParams best_params = params;
  double best_val = std::numeric_limits<double>::infinity();
  bool have_best = false;
  std::size_t epochs_since_improve = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    // Fisher-Yates over the index permutation, not the data.
    for (std::size_t i = n_train - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(shuffle_rng.bounded(i + 1));
      std::swap(order[i], order[j]);
    }

    double epoch_sq_sum = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < n_train; begin += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(n_train, begin + config.batch_size);
      const std::size_t count = end - begin;
      try {
        batch_gradients(params, data.train, order, begin, end, threads, losses, slots);
      } catch (const FxError& e) {
        if (e.code() != ErrorCode::Numeric) throw;
        // numeric blowups mid-training are divergence, not corrupt input
        raise(ErrorCode::Divergence,
              "train: diverged at epoch " + std::to_string(epoch + 1) + ", batch " +
                  std::to_string(batch_index + 1) + " (" + e.what() + ")");
      }

      ModelGrads batch_grads = std::move(slots[0]);
      double batch_sq = losses[0];
      for (std::size_t i = 1; i < count; ++i) {
        accumulate(batch_grads, slots[i]);
        batch_sq += losses[i];
      }
      scale(batch_grads, 1.0 / static_cast<double>(count));
      epoch_sq_sum += batch_sq;
      if (!std::isfinite(batch_sq)) {
        raise(ErrorCode::Divergence, "train: non-finite loss at epoch " +
                                         std::to_string(epoch + 1) + ", batch " +
                                         std::to_string(batch_index + 1));
      }
      adam_step(params, batch_grads, state, config);
    }

    const double epoch_loss = epoch_sq_sum / static_cast<double>(n_train);
    report.train_loss.push_back(epoch_loss);
    report.epochs_run = epoch + 1;

    if (validate_epochs) {
      double val = 0.0;
      try {
        val = validation_mse(params, val_samples);
      } catch (const FxError& e) {
        if (e.code() != ErrorCode::Numeric) throw;
        raise(ErrorCode::Divergence,
              "train: diverged during validation at epoch " + std::to_string(epoch + 1) +
                  " (" + e.what() + ")");
      }
      if (!std::isfinite(val)) {
        raise(ErrorCode::Divergence,
              "train: non-finite validation loss at epoch " + std::to_string(epoch + 1));
      }
      report.val_loss.push_back(val);
      if (val < best_val) {
        best_val = val;
        best_params = params;
        have_best = true;
        epochs_since_improve = 0;
      } else {
        ++epochs_since_improve;
        if (config.patience > 0 && epochs_since_improve >= config.patience) {
          report.stopped_early = true;
          break;
        }
      }
    }
  }

  if (validate_epochs && config.patience > 0 && have_best) {
    params = std::move(best_params);
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return {std::move(params), std::move(report)};
}

}  // namespace fxcast
