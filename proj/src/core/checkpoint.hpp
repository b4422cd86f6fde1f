#pragma once

#include <cstdint>
#include <string>

#include "core/dataset.hpp"
#include "core/model.hpp"

namespace fxcast {

inline constexpr int kCheckpointVersion = 1;

// Everything needed to reproduce predictions: model spec, indicator
// configuration, the training-time scaler, and all parameter tensors.
// Serialized as versioned JSON with lossless fp64 round-trip.
struct Checkpoint {
  int format_version = kCheckpointVersion;
  ModelParams params;
  IndicatorConfig indicators;
  Scaler scaler;
  std::uint64_t seed = 0;
  std::size_t epochs_trained = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);

// Rejects unknown format versions and malformed tensors.
Checkpoint load_checkpoint(const std::string& path);

}  // namespace fxcast
