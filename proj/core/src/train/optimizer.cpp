#include "vividet/train/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace vividet {

template <typename T>
AdamW<T>::AdamW(AdamWConfig config, Schedule schedule) : config_(config), schedule_(std::move(schedule)) {
  if (!(config_.learning_rate > 0.0)) throw std::invalid_argument("AdamW: learning rate must be positive");
  if (config_.weight_decay < 0.0) throw std::invalid_argument("AdamW: weight decay must be non-negative");
}

template <typename T>
void AdamW<T>::step(ModelParams<T>& params, const GradMap<T>& grads) {
  // Validate first so a missing gradient leaves params untouched.
  params.visit([&](const std::string& name, const Tensor<T>& p) {
    auto it = grads.find(name);
    if (it == grads.end()) throw std::invalid_argument("AdamW: missing gradient for parameter " + name);
    if (it->second.shape() != p.shape()) {
      throw std::invalid_argument("AdamW: gradient for " + name + " has shape " + shape_str(it->second.shape()) +
                                  ", parameter has " + shape_str(p.shape()));
    }
  });
  ++step_;
  const double lr = schedule_ ? schedule_(step_, config_.learning_rate) : config_.learning_rate;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  const double decay = 1.0 - lr * config_.weight_decay;

  params.visit([&](const std::string& name, Tensor<T>& p) {
    const Tensor<T>& g = grads.at(name);
    auto [it, fresh] = state_.try_emplace(name);
    if (fresh) {
      it->second.m = Tensor<T>(p.shape());
      it->second.v = Tensor<T>(p.shape());
    }
    Tensor<T>& m = it->second.m;
    Tensor<T>& v = it->second.v;
    for (std::size_t i = 0; i < p.numel(); ++i) {
      const double gi = static_cast<double>(g[i]);
      const double mi = b1 * static_cast<double>(m[i]) + (1.0 - b1) * gi;
      const double vi = b2 * static_cast<double>(v[i]) + (1.0 - b2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double m_hat = mi / bc1;
      const double v_hat = vi / bc2;
      double pi = static_cast<double>(p[i]) * decay;
      pi -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
      p[i] = static_cast<T>(pi);
    }
  });
}

template <typename T>
GradMap<T> zero_grads(const ModelParams<T>& params) {
  GradMap<T> g;
  params.visit([&](const std::string& name, const Tensor<T>& p) { g.emplace(name, Tensor<T>(p.shape())); });
  return g;
}

template class AdamW<float>;
template class AdamW<double>;
template GradMap<float> zero_grads<float>(const ModelParams<float>&);
template GradMap<double> zero_grads<double>(const ModelParams<double>&);

}  // namespace vividet
