#include "vividet/tensor/ops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace vividet {

namespace {

#ifdef NDEBUG
std::atomic<bool> g_finite_checks{false};
#else
std::atomic<bool> g_finite_checks{true};
#endif

}  // namespace

std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

bool finite_checks_enabled() noexcept { return g_finite_checks.load(std::memory_order_relaxed); }

void set_finite_checks(bool enabled) noexcept {
  g_finite_checks.store(enabled, std::memory_order_relaxed);
}

template <typename T>
void check_finite(const Tensor<T>& t, std::string_view op) {
  for (std::size_t i = 0; i < t.numel(); ++i) {
    if (!std::isfinite(t[i])) {
      throw NumericError(std::string(op) + ": non-finite value at flat index " +
                         std::to_string(i) + " of tensor " + shape_str(t.shape()));
    }
  }
}

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw DimensionError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor<T> out(Shape{m, n});
  const T* pa = a.data().data();
  const T* pb = b.data().data();
  T* po = out.data().data();
  // i-k-j order keeps the inner loop contiguous in both b and out.
  for (std::size_t i = 0; i < m; ++i) {
    T* orow = po + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = pa[i * k + p];
      const T* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
    }
  }
  validate_output(out, "matmul");
  return out;
}

template <typename T>
Tensor<T> transpose(const Tensor<T>& a) {
  if (a.rank() != 2) throw DimensionError("transpose: expected rank 2, got " + shape_str(a.shape()));
  const std::size_t m = a.rows(), n = a.cols();
  Tensor<T> out(Shape{n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

template <typename T>
Tensor<T> softmax(const Tensor<T>& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) + " out of range for " +
                         shape_str(x.shape()));
  }
  const Shape& s = x.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= s[i];
  for (std::size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  const std::size_t len = s[axis];

  Tensor<T> out(s);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      T mx = x[base];
      for (std::size_t k = 1; k < len; ++k) mx = std::max(mx, x[base + k * inner]);
      T sum = 0;
      for (std::size_t k = 0; k < len; ++k) {
        const T e = std::exp(x[base + k * inner] - mx);
        out[base + k * inner] = e;
        sum += e;
      }
      const T inv = T{1} / sum;
      // Floor at the smallest normal value so underflowed entries stay strictly positive.
      for (std::size_t k = 0; k < len; ++k) {
        T& v = out[base + k * inner];
        v = std::max(v * inv, std::numeric_limits<T>::min());
      }
    }
  }
  validate_output(out, "softmax");
  return out;
}

template <typename T>
Tensor<T> layer_norm(const Tensor<T>& x, const Tensor<T>& gain, const Tensor<T>& bias, T eps,
                     LayerNormStats<T>* stats) {
  if (x.rank() == 0) throw DimensionError("layer_norm: scalar input");
  const std::size_t d = x.shape().back();
  if (gain.numel() != d || bias.numel() != d) {
    throw DimensionError("layer_norm: gain " + shape_str(gain.shape()) + " / bias " +
                         shape_str(bias.shape()) + " do not match input " + shape_str(x.shape()));
  }
  if (!(eps > T{0})) throw std::invalid_argument("layer_norm: eps must be positive");
  const std::size_t rows = x.numel() / d;
  Tensor<T> out(x.shape());
  if (stats) {
    stats->mean.assign(rows, T{0});
    stats->rstd.assign(rows, T{0});
  }
  for (std::size_t r = 0; r < rows; ++r) {
    const T* row = x.data().data() + r * d;
    T mean = 0;
    for (std::size_t j = 0; j < d; ++j) mean += row[j];
    mean /= static_cast<T>(d);
    T var = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const T c = row[j] - mean;
      var += c * c;
    }
    var /= static_cast<T>(d);
    const T rstd = T{1} / std::sqrt(var + eps);
    T* orow = out.data().data() + r * d;
    for (std::size_t j = 0; j < d; ++j) orow[j] = (row[j] - mean) * rstd * gain[j] + bias[j];
    if (stats) {
      stats->mean[r] = mean;
      stats->rstd[r] = rstd;
    }
  }
  validate_output(out, "layer_norm");
  return out;
}

template <typename T>
T gelu_scalar(T x) {
  const T k = static_cast<T>(std::sqrt(2.0 / std::numbers::pi));
  const T u = k * (x + T(0.044715) * x * x * x);
  return T(0.5) * x * (T{1} + std::tanh(u));
}

template <typename T>
T gelu_derivative(T x) {
  const T k = static_cast<T>(std::sqrt(2.0 / std::numbers::pi));
  const T u = k * (x + T(0.044715) * x * x * x);
  const T th = std::tanh(u);
  const T du = k * (T{1} + T(3) * T(0.044715) * x * x);
  return T(0.5) * (T{1} + th) + T(0.5) * x * (T{1} - th * th) * du;
}

template <typename T>
Tensor<T> gelu(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = gelu_scalar(x[i]);
  validate_output(out, "gelu");
  return out;
}

template <typename T>
Tensor<T> tanh_act(const Tensor<T>& x) {
  Tensor<T> out(x.shape());
  for (std::size_t i = 0; i < x.numel(); ++i) out[i] = std::tanh(x[i]);
  validate_output(out, "tanh");
  return out;
}

#define VIVIDET_INSTANTIATE_OPS(T)                                                        \
  template void check_finite<T>(const Tensor<T>&, std::string_view);                     \
  template Tensor<T> matmul<T>(const Tensor<T>&, const Tensor<T>&);                       \
  template Tensor<T> transpose<T>(const Tensor<T>&);                                      \
  template Tensor<T> softmax<T>(const Tensor<T>&, std::size_t);                           \
  template Tensor<T> layer_norm<T>(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, \
                                   T, LayerNormStats<T>*);                                \
  template T gelu_scalar<T>(T);                                                           \
  template T gelu_derivative<T>(T);                                                       \
  template Tensor<T> gelu<T>(const Tensor<T>&);                                           \
  template Tensor<T> tanh_act<T>(const Tensor<T>&);

VIVIDET_INSTANTIATE_OPS(float)
VIVIDET_INSTANTIATE_OPS(double)

#undef VIVIDET_INSTANTIATE_OPS

}  // namespace vividet
