#pragma once

#include <string_view>

#include "vividet/tensor/tensor.hpp"

namespace vividet {

// NaN/Inf scanning of op outputs. On by default in debug builds, off under NDEBUG.
bool finite_checks_enabled() noexcept;
void set_finite_checks(bool enabled) noexcept;

/// Throws NumericError naming `op` if any element is non-finite.
template <typename T>
void check_finite(const Tensor<T>& t, std::string_view op);

/// Runs check_finite only when finite checks are enabled.
template <typename T>
inline void validate_output(const Tensor<T>& t, std::string_view op) {
  if (finite_checks_enabled()) check_finite(t, op);
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> transpose(const Tensor<T>& a);

/// Numerically stable softmax along `axis` (max subtracted before exponentiation).
template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis);

template <typename T>
struct LayerNormStats {
  std::vector<T> mean;
  std::vector<T> rstd;  // 1 / sqrt(var + eps), one per row
};

/// Normalizes each last-axis row to zero mean / unit variance, then applies gain and bias.
template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps,
                     LayerNormStats<T>* stats = nullptr);

/// tanh approximation: 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3))).
template <typename T>
Tensor<T> gelu(const Tensor<T>& x);

template <typename T>
T gelu_scalar(T x);

template <typename T>
T gelu_derivative(T x);

template <typename T>
Tensor<T> tanh_act(const Tensor<T>& x);

}  // namespace vividet
