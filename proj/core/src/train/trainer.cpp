#include "vividet/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>

#include "vividet/model/vivit.hpp"
#include "vividet/tensor/autodiff.hpp"
#include "vividet/tensor/rng.hpp"

namespace vividet {

void TrainConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be at least 1");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw std::invalid_argument("split_fraction must lie in (0, 1), got " + std::to_string(split_fraction));
  }
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be positive");
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be non-negative");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  augmentation.validate();
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t threads = std::min(workers, n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

std::size_t label_of(const VideoClip& clip) {
  if (clip.label == Label::Unlabeled) {
    throw std::invalid_argument("clip '" + clip.source_id + "' has no label");
  }
  return class_index(clip.label);
}

template <typename T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

struct ClipOutcome {
  double loss = 0.0;
  bool correct = false;
  std::vector<Tensor<float>> grads;  // canonical parameter order
};

ClipOutcome clip_step(const ModelParams<float>& params, const ModelConfig& config, const VideoClip& clip,
                      bool with_grads) {
  Tape<float> tape;
  tape.set_recording(with_grads);
  const ParamVars<float> vars = bind_params(tape, params, with_grads);
  const Var<float> logits = forward_logits(tape, clip, vars, config);
  const std::size_t label = label_of(clip);
  const Var<float> loss = ad::cross_entropy(logits, std::span<const std::size_t>(&label, 1));

  ClipOutcome out;
  out.loss = static_cast<double>(loss.value().item());
  out.correct = argmax(logits.value().data()) == label;
  if (with_grads && std::isfinite(out.loss)) {
    const Gradients<float> g = backward(tape, loss);
    for (const Var<float>& leaf : vars.leaves()) out.grads.push_back(g[leaf]);
  }
  return out;
}

}  // namespace

DatasetSplit stratified_split(const std::vector<VideoClip>& clips, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("split fraction must lie in (0, 1)");
  std::vector<std::size_t> by_class[kNumClasses];
  for (std::size_t i = 0; i < clips.size(); ++i) by_class[label_of(clips[i])].push_back(i);

  DatasetSplit split;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    Rng rng(mix_seed(seed, c));
    fisher_yates(by_class[c], rng);
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(by_class[c].size())));
    split.train.insert(split.train.end(), by_class[c].begin(), by_class[c].begin() + n_train);
    split.val.insert(split.val.end(), by_class[c].begin() + n_train, by_class[c].end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  if (split.train.empty() || split.val.empty()) {
    throw std::invalid_argument("stratified split of " + std::to_string(clips.size()) + " clips at fraction " +
                                std::to_string(fraction) + " leaves an empty side");
  }
  return split;
}

LossAccuracy measure(const ModelParams<float>& params, const ModelConfig& config, const std::vector<VideoClip>& clips,
                     std::size_t workers) {
  if (clips.empty()) throw std::invalid_argument("cannot measure an empty clip set");
  std::vector<ClipOutcome> outcomes(clips.size());
  parallel_for(clips.size(), workers, [&](std::size_t i) { outcomes[i] = clip_step(params, config, clips[i], false); });
  LossAccuracy la;
  std::size_t correct = 0;
  for (const auto& o : outcomes) {
    la.loss += o.loss;
    correct += o.correct ? 1 : 0;
  }
  la.loss /= static_cast<double>(clips.size());
  la.accuracy = static_cast<double>(correct) / static_cast<double>(clips.size());
  return la;
}

TrainResult train(const ModelConfig& model, ModelParams<float> initial, const std::vector<VideoClip>& train_set,
                  const std::vector<VideoClip>& val_set, const TrainConfig& config, const TrainCallbacks& callbacks) {
  config.validate();
  model.validate();
  validate_params(initial, model);
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  if (val_set.empty()) throw std::invalid_argument("validation set is empty");
  for (const auto& c : train_set) label_of(c);
  for (const auto& c : val_set) label_of(c);

  TrainResult result;
  result.best_params = initial;
  result.final_params = std::move(initial);
  ModelParams<float>& params = result.final_params;

  std::vector<std::string> names;
  params.visit([&](const std::string& name, const Tensor<float>&) { names.push_back(name); });

  AdamW<float> optimizer(AdamWConfig{config.learning_rate, config.weight_decay}, config.schedule);
  std::vector<std::size_t> order(train_set.size());

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle_rng(mix_seed(config.seed, epoch));
    fisher_yates(order, shuffle_rng);

    AugmentSpec aug = config.augmentation;
    aug.seed = mix_seed(mix_seed(config.seed, config.augmentation.seed), epoch);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0, batch = 0; start < order.size(); start += config.batch_size, ++batch) {
      const std::size_t count = std::min(config.batch_size, order.size() - start);
      std::vector<ClipOutcome> outcomes(count);
      parallel_for(count, config.workers, [&](std::size_t k) {
        const VideoClip& src = train_set[order[start + k]];
        if (config.augment) {
          outcomes[k] = clip_step(params, model, augment_clip(src, aug), true);
        } else {
          outcomes[k] = clip_step(params, model, src, true);
        }
      });

      GradMap<float> grads;
      const float inv = 1.0f / static_cast<float>(count);
      for (std::size_t k = 0; k < count; ++k) {
        const ClipOutcome& o = outcomes[k];
        if (!std::isfinite(o.loss)) {
          throw NumericError("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                             std::to_string(batch) + ", clip '" + train_set[order[start + k]].source_id + "'");
        }
        loss_sum += o.loss;
        correct += o.correct ? 1 : 0;
        for (std::size_t p = 0; p < names.size(); ++p) {
          auto [it, fresh] = grads.try_emplace(names[p], o.grads[p].shape());
          Tensor<float>& acc = it->second;
          const Tensor<float>& g = o.grads[p];
          for (std::size_t i = 0; i < acc.numel(); ++i) acc[i] += g[i];
        }
      }
      for (auto& [name, g] : grads)
        for (std::size_t i = 0; i < g.numel(); ++i) g[i] *= inv;
      optimizer.step(params, grads);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(train_set.size());
    rec.train_acc = static_cast<double>(correct) / static_cast<double>(train_set.size());
    const LossAccuracy val = measure(params, model, val_set, config.workers);
    if (!std::isfinite(val.loss)) {
      throw NumericError("training diverged: non-finite validation loss after epoch " + std::to_string(epoch));
    }
    rec.val_loss = val.loss;
    rec.val_acc = val.accuracy;
    result.history.push_back(rec);

    const bool improved = !result.best || rec.val_acc > result.best->val_acc ||
                          (rec.val_acc == result.best->val_acc && rec.val_loss < result.best->val_loss);
    if (improved) {
      result.best = rec;
      result.best_params = params;
      if (callbacks.on_best) callbacks.on_best(rec, params);
    }
    if (callbacks.on_epoch) callbacks.on_epoch(rec);
    if (config.checkpoint_every > 0 && epoch % config.checkpoint_every == 0 && callbacks.on_checkpoint) {
      callbacks.on_checkpoint(rec, params);
    }
  }
  return result;
}

TrainResult train(const ModelConfig& model, ModelParams<float> initial, const std::vector<VideoClip>& dataset,
                  const TrainConfig& config, const TrainCallbacks& callbacks) {
  config.validate();
  const DatasetSplit split = stratified_split(dataset, config.split_fraction, config.seed);
  std::vector<VideoClip> train_set, val_set;
  bool seen[kNumClasses] = {false, false};
  for (std::size_t i : split.train) {
    train_set.push_back(dataset[i]);
    seen[class_index(dataset[i].label)] = true;
  }
  for (std::size_t i : split.val) val_set.push_back(dataset[i]);
  if (!seen[0] || !seen[1]) throw std::invalid_argument("training split does not contain both classes");
  return train(model, std::move(initial), train_set, val_set, config, callbacks);
}

EvalReport evaluate(const ModelParams<float>& params, const ModelConfig& config, const std::vector<VideoClip>& clips,
                    std::size_t workers) {
  if (clips.empty()) throw std::invalid_argument("cannot evaluate an empty dataset");
  for (const auto& c : clips) label_of(c);
  std::vector<std::size_t> predicted(clips.size());
  parallel_for(clips.size(), workers, [&](std::size_t i) {
    const std::vector<float> probs = classify(clips[i], params, config);
    predicted[i] = argmax(std::span<const float>(probs));
  });
  ConfusionMatrix cm{};
  for (std::size_t i = 0; i < clips.size(); ++i) ++cm[class_index(clips[i].label)][predicted[i]];
  return report_from_confusion(cm);
}

}  // namespace vividet
