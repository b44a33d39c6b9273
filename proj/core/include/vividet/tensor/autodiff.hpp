#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "vividet/tensor/ops.hpp"
#include "vividet/tensor/tensor.hpp"

namespace vividet {

template <typename T>
class Tape;
template <typename T>
class Var;
template <typename T>
class Gradients;
template <typename T>
Gradients<T> backward(Tape<T>& tape, const Var<T>& loss);

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
template <typename T>
class Var {
 public:
  Var() = default;

  Tape<T>* tape() const noexcept { return tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

  const Tensor<T>& value() const { return tape_->value(id_); }
  const Shape& shape() const { return value().shape(); }
  bool requires_grad() const { return tape_->requires_grad(id_); }

 private:
  friend class Tape<T>;
  Var(Tape<T>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<T>* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Ordered record of executed operations. Node ids increase in execution order, so every
/// operation's inputs precede it. Single owner; not thread-safe.
template <typename T>
class Tape {
 public:
  /// Receives the gradient of the node's output and one accumulation buffer per input
  /// (nullptr for inputs that do not require gradients). Must add, never assign.
  using BackwardFn = std::function<void(const Tensor<T>& grad_out, std::span<Tensor<T>*> input_grads)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<T> leaf(Tensor<T> value, bool requires_grad = true);
  Var<T> constant(Tensor<T> value) { return leaf(std::move(value), false); }

  /// Appends an op output. The closure is dropped when no input requires gradients or
  /// when recording is disabled.
  Var<T> record(Tensor<T> value, std::vector<Var<T>> inputs, BackwardFn backward);

  const Tensor<T>& value(std::size_t id) const { return nodes_.at(id).value; }
  /// Instrumentation access. Editing a value after dependents were recorded invalidates gradients.
  Tensor<T>& mutable_value(std::size_t id) { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  bool is_leaf(std::size_t id) const { return nodes_.at(id).leaf; }
  const std::vector<std::size_t>& inputs_of(std::size_t id) const { return nodes_.at(id).inputs; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// With recording off, no node requires gradients and no closures are stored.
  void set_recording(bool on) noexcept { recording_ = on; }
  bool recording() const noexcept { return recording_; }

 private:
  template <typename U>
  friend Gradients<U> backward(Tape<U>& tape, const Var<U>& loss);

  struct Node {
    Tensor<T> value;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
    bool leaf = false;
  };

  std::vector<Node> nodes_;
  bool recording_ = true;
};

/// Gradient of a scalar loss with respect to every requires_grad leaf of a tape.
template <typename T>
class Gradients {
 public:
  const Tensor<T>& operator[](const Var<T>& v) const;
  bool contains(const Var<T>& v) const { return grads_.count(v.id()) != 0; }
  std::size_t size() const noexcept { return grads_.size(); }

 private:
  template <typename U>
  friend Gradients<U> backward(Tape<U>& tape, const Var<U>& loss);
  std::unordered_map<std::size_t, Tensor<T>> grads_;
};

/// Reverse pass from a scalar `loss`. Leaves never reached receive zero gradients.
template <typename T>
Gradients<T> backward(Tape<T>& tape, const Var<T>& loss);

namespace ad {

template <typename T> Var<T> matmul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> add(const Var<T>& a, const Var<T>& b);
/// a[m x n] + bias[n] broadcast over rows.
template <typename T> Var<T> add_bias(const Var<T>& a, const Var<T>& bias);
template <typename T> Var<T> mul(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> scale(const Var<T>& a, T factor);
template <typename T> Var<T> transpose(const Var<T>& a);
template <typename T> Var<T> reshape(const Var<T>& a, Shape shape);
template <typename T> Var<T> gelu(const Var<T>& x);
template <typename T> Var<T> tanh(const Var<T>& x);
/// Softmax over the last axis.
template <typename T> Var<T> softmax(const Var<T>& x);
template <typename T> Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& bias, T eps);
/// Columns [begin, begin + count) of a 2-D value.
template <typename T> Var<T> slice_cols(const Var<T>& a, std::size_t begin, std::size_t count);
template <typename T> Var<T> concat_cols(std::span<const Var<T>> parts);
/// Rows [begin, begin + count) of a 2-D value.
template <typename T> Var<T> slice_rows(const Var<T>& a, std::size_t begin, std::size_t count);
template <typename T> Var<T> concat_rows(std::span<const Var<T>> parts);
template <typename T> Var<T> sum(const Var<T>& a);
/// Mean over rows of -log softmax(logits)[label], evaluated with log-sum-exp.
template <typename T> Var<T> cross_entropy(const Var<T>& logits, std::span<const std::size_t> labels);

}  // namespace ad

}  // namespace vividet
