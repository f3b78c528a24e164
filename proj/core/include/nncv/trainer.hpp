#pragma once

#include <cstdint>
#include <vector>

#include "nncv/optimizer.hpp"

namespace nncv {

/// Image collection with a deterministic train/validation split.
struct Dataset {
  std::vector<GrayImage> images;
  double split = 0.9;  // fraction of images used for training
  std::uint64_t seed = 0;

  std::vector<std::size_t> train_indices() const;
  std::vector<std::size_t> val_indices() const;
};

struct TrainReport {
  enum class StopReason { patience, max_epochs };

  double initial_val_loss = 0.0;          // before the first update
  std::vector<double> train_loss;         // mean per-image loss per epoch
  std::vector<double> val_loss;           // mean validation energy per epoch
  int best_epoch = 0;                     // 1-based epoch of the best val loss
  double best_val_loss = 0.0;
  StopReason reason = StopReason::max_epochs;

  std::string csv() const;  // "epoch,train_loss,val_loss" rows, epoch 0 = initial
};

struct TrainResult {
  std::vector<LayerParams> params;  // parameters at the best validation epoch
  TrainReport report;
};

/// Trains initialization priors over a dataset: per image, compute region
/// means, take one full-image gradient step on the smoothed energy; after
/// each epoch evaluate the mean validation energy and stop once it fails to
/// improve for `patience` consecutive epochs.
TrainResult train_prior(const Dataset& data, const RunConfig& cfg, int epochs, int patience);

struct PriorEvaluation {
  MultiphaseModel model;
  EnergyBreakdown energy;
};

/// Applies trained parameters to a test image without updating them:
/// network outputs, region means, and the resulting energy.
PriorEvaluation evaluate_prior(const std::vector<LayerParams>& params, const GrayImage& image,
                               const RunConfig& cfg);

}  // namespace nncv
