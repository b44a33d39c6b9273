#pragma once

#include <functional>
#include <map>
#include <string>

#include "vividet/model/params.hpp"

namespace vividet {

template <typename T>
using GradMap = std::map<std::string, Tensor<T>>;

struct AdamWConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive-moment update with bias correction and decoupled weight decay:
///   p <- p - lr * wd * p
///   p <- p - lr * m_hat / (sqrt(v_hat) + eps)
template <typename T>
class AdamW {
 public:
  /// Maps (1-based step, base lr) to the lr used for that step.
  using Schedule = std::function<double(std::size_t step, double base_lr)>;

  explicit AdamW(AdamWConfig config = {}, Schedule schedule = {});

  /// Updates every parameter. Throws std::invalid_argument if a parameter has no gradient
  /// or a gradient's shape differs from its parameter.
  void step(ModelParams<T>& params, const GradMap<T>& grads);

  std::size_t step_count() const noexcept { return step_; }
  const AdamWConfig& config() const noexcept { return config_; }

 private:
  struct Moments {
    Tensor<T> m, v;
  };

  AdamWConfig config_;
  Schedule schedule_;
  std::size_t step_ = 0;
  std::map<std::string, Moments> state_;
};

/// Gradient map keyed by canonical parameter names.
template <typename T>
GradMap<T> zero_grads(const ModelParams<T>& params);

}  // namespace vividet
