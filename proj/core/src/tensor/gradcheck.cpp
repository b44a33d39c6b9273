#include "vividet/tensor/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vividet/tensor/rng.hpp"

namespace vividet {

double relative_error(double a, double b) noexcept {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

namespace {

template <typename T>
T evaluate(const ScalarFunction<T>& f, const std::vector<Tensor<T>>& params) {
  Tape<T> tape;
  tape.set_recording(false);
  std::vector<Var<T>> leaves;
  leaves.reserve(params.size());
  for (const auto& p : params) leaves.push_back(tape.leaf(p, false));
  const Var<T> out = f(tape, leaves);
  return out.value().item();
}

}  // namespace

template <typename T>
GradCheckResult check_gradients(const ScalarFunction<T>& f, std::vector<Tensor<T>> params, T step,
                                const GradCheckOptions& options) {
  if (!(step > T{0})) throw std::invalid_argument("check_gradients: step must be positive");

  std::vector<Tensor<T>> analytic;
  T base_value;
  {
    Tape<T> tape;
    std::vector<Var<T>> leaves;
    leaves.reserve(params.size());
    for (const auto& p : params) leaves.push_back(tape.leaf(p, true));
    const Var<T> loss = f(tape, leaves);
    base_value = loss.value().item();
    const Gradients<T> grads = backward(tape, loss);
    for (const auto& leaf : leaves) analytic.push_back(grads[leaf]);
  }
  const T again = evaluate(f, params);
  if (again != base_value) {
    throw std::logic_error("check_gradients: function is not deterministic (two forward passes differ)");
  }

  GradCheckResult result;
  Rng rng(options.seed);
  for (std::size_t t = 0; t < params.size(); ++t) {
    const std::size_t n = params[t].numel();
    std::vector<std::size_t> coords;
    if (n <= options.full_check_limit) {
      coords.resize(n);
      for (std::size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      coords.resize(options.sample_count);
      for (auto& c : coords) c = static_cast<std::size_t>(rng.below(n));
    }
    for (std::size_t idx : coords) {
      const T original = params[t][idx];
      params[t][idx] = original + step;
      const T plus = evaluate(f, params);
      params[t][idx] = original - step;
      const T minus = evaluate(f, params);
      params[t][idx] = original;
      const double numeric = (static_cast<double>(plus) - static_cast<double>(minus)) / (2.0 * static_cast<double>(step));
      const double exact = static_cast<double>(analytic[t][idx]);
      const double err = relative_error(exact, numeric);
      ++result.coordinates_checked;
      if (result.coordinates_checked == 1 || err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_tensor = t;
        result.worst_index = idx;
        result.worst_analytic = exact;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

template GradCheckResult check_gradients<float>(const ScalarFunction<float>&, std::vector<Tensor<float>>, float,
                                                const GradCheckOptions&);
template GradCheckResult check_gradients<double>(const ScalarFunction<double>&, std::vector<Tensor<double>>, double,
                                                 const GradCheckOptions&);

}  // namespace vividet
