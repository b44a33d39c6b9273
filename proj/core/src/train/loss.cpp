#include "vividet/train/loss.hpp"

#include "vividet/tensor/autodiff.hpp"

namespace vividet {

template <typename T>
T cross_entropy(const Tensor<T>& logits, std::span<const std::size_t> labels) {
  Tape<T> tape;
  tape.set_recording(false);
  return ad::cross_entropy(tape.constant(logits), labels).value().item();
}

template float cross_entropy<float>(const Tensor<float>&, std::span<const std::size_t>);
template double cross_entropy<double>(const Tensor<double>&, std::span<const std::size_t>);

}  // namespace vividet
