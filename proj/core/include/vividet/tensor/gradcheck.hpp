#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vividet/tensor/autodiff.hpp"

namespace vividet {

/// Scalar function of a set of parameter leaves, evaluated on the given tape.
template <typename T>
using ScalarFunction = std::function<Var<T>(Tape<T>&, std::span<const Var<T>>)>;

struct GradCheckOptions {
  /// Tensors above this size are checked on `sample_count` random coordinates.
  std::size_t full_check_limit = 10000;
  std::size_t sample_count = 512;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_tensor = 0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates_checked = 0;
};

/// |a - b| / max(|a|, |b|, 1e-8)
double relative_error(double a, double b) noexcept;

/// Compares backward() against central differences (f(p+h) - f(p-h)) / 2h coordinate by
/// coordinate. Throws std::logic_error when two forward evaluations at the same point differ.
template <typename T>
GradCheckResult check_gradients(const ScalarFunction<T>& f, std::vector<Tensor<T>> params, T step,
                                const GradCheckOptions& options = {});

}  // namespace vividet
