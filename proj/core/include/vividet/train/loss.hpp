#pragma once

#include <span>

#include "vividet/tensor/tensor.hpp"

namespace vividet {

/// Mean softmax cross-entropy of batch x classes logits, via log-sum-exp.
/// Throws std::out_of_range for a label outside [0, classes).
template <typename T>
T cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> labels);

}  // namespace vividet
