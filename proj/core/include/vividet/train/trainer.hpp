#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "vividet/model/config.hpp"
#include "vividet/model/params.hpp"
#include "vividet/train/metrics.hpp"
#include "vividet/train/optimizer.hpp"
#include "vividet/vision/augment.hpp"
#include "vividet/vision/clip.hpp"

namespace vividet {

struct TrainConfig {
  std::size_t batch_size = 32;
  std::size_t epochs = 100;
  double learning_rate = 1e-4;
  double weight_decay = 1e-5;
  /// Share of each class assigned to training.
  double split_fraction = 0.6;
  std::uint64_t seed = 0;
  bool augment = true;
  AugmentSpec augmentation;
  /// Periodic checkpoint callback cadence in epochs; 0 disables.
  std::size_t checkpoint_every = 0;
  /// Threads used for per-clip work inside a batch. Results do not depend on it.
  std::size_t workers = 1;
  /// Optional learning-rate schedule; constant when empty.
  AdamW<float>::Schedule schedule;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
};

/// Per-class seeded shuffle, then round(fraction * class_count) of each class to train.
/// Throws std::invalid_argument if either side ends up empty or a clip is unlabeled.
DatasetSplit stratified_split(const std::vector<VideoClip>& clips, double fraction, std::uint64_t seed);

struct TrainCallbacks {
  std::function<void(const EpochRecord&)> on_epoch;
  /// Called when validation improves (higher accuracy, or equal accuracy and lower loss).
  std::function<void(const EpochRecord&, const ModelParams<float>&)> on_best;
  /// Called every checkpoint_every epochs.
  std::function<void(const EpochRecord&, const ModelParams<float>&)> on_checkpoint;
};

struct TrainResult {
  ModelParams<float> final_params;
  ModelParams<float> best_params;
  std::optional<EpochRecord> best;
  std::vector<EpochRecord> history;
};

/// Mean cross-entropy and accuracy of a parameter set over clips, without gradients.
struct LossAccuracy {
  double loss = 0.0;
  double accuracy = 0.0;
};

LossAccuracy measure(const ModelParams<float>& params, const ModelConfig& config, const std::vector<VideoClip>& clips,
                     std::size_t workers = 1);

/// Trains on `train_set`, validating on `val_set` after every epoch. Throws NumericError on a
/// non-finite loss, std::invalid_argument on empty sets or unlabeled clips.
TrainResult train(const ModelConfig& model, ModelParams<float> initial, const std::vector<VideoClip>& train_set,
                  const std::vector<VideoClip>& val_set, const TrainConfig& config,
                  const TrainCallbacks& callbacks = {});

/// Splits `dataset` with stratified_split, then trains. Both classes must appear in the training split.
TrainResult train(const ModelConfig& model, ModelParams<float> initial, const std::vector<VideoClip>& dataset,
                  const TrainConfig& config, const TrainCallbacks& callbacks = {});

/// Argmax predictions (ties to class 0) accumulated into a report. Throws std::invalid_argument
/// on an empty dataset or an unlabeled clip.
EvalReport evaluate(const ModelParams<float>& params, const ModelConfig& config, const std::vector<VideoClip>& clips,
                    std::size_t workers = 1);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Rethrows the lowest-index exception.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace vividet
