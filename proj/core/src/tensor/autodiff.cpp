#include "vividet/tensor/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vividet {

template <typename T>
Var<T> Tape<T>::leaf(Tensor<T> value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad && recording_;
  n.leaf = true;
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
Var<T> Tape<T>::record(Tensor<T> value, std::vector<Var<T>> inputs, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.inputs.reserve(inputs.size());
  bool any = false;
  for (const auto& in : inputs) {
    if (in.tape() != this) throw std::invalid_argument("Tape::record: input belongs to another tape");
    n.inputs.push_back(in.id());
    any = any || nodes_[in.id()].requires_grad;
  }
  n.requires_grad = any && recording_;
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var<T>(this, nodes_.size() - 1);
}

template <typename T>
const Tensor<T>& Gradients<T>::operator[](const Var<T>& v) const {
  auto it = grads_.find(v.id());
  if (it == grads_.end()) throw std::out_of_range("no gradient recorded for node " + std::to_string(v.id()));
  return it->second;
}

template <typename T>
Gradients<T> backward(Tape<T>& tape, const Var<T>& loss) {
  if (loss.tape() != &tape) throw std::invalid_argument("backward: loss was not recorded on this tape");
  if (loss.value().numel() != 1) {
    throw DimensionError("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
  }
  auto& nodes = tape.nodes_;
  std::vector<Tensor<T>> grads(loss.id() + 1);
  std::vector<bool> has(loss.id() + 1, false);
  grads[loss.id()] = Tensor<T>(loss.shape(), T{1});
  has[loss.id()] = true;

  std::vector<Tensor<T>*> slots;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    auto& node = nodes[id];
    if (!has[id] || node.leaf || !node.backward) continue;
    slots.assign(node.inputs.size(), nullptr);
    for (std::size_t k = 0; k < node.inputs.size(); ++k) {
      const std::size_t in = node.inputs[k];
      if (!nodes[in].requires_grad) continue;
      if (!has[in]) {
        grads[in] = Tensor<T>(nodes[in].value.shape(), T{0});
        has[in] = true;
      }
      slots[k] = &grads[in];
    }
    node.backward(grads[id], slots);
    grads[id] = Tensor<T>();  // release intermediate
  }

  Gradients<T> out;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (!nodes[id].leaf || !nodes[id].requires_grad) continue;
    if (id <= loss.id() && has[id]) {
      out.grads_.emplace(id, std::move(grads[id]));
    } else {
      out.grads_.emplace(id, Tensor<T>(nodes[id].value.shape(), T{0}));
    }
  }
  return out;
}

namespace ad {

namespace {

template <typename T>
void require_rank2(const Tensor<T>& t, const char* op) {
  if (t.rank() != 2) throw DimensionError(std::string(op) + ": expected rank 2, got " + shape_str(t.shape()));
}

// dA += G * B^T
template <typename T>
void accumulate_nt(const Tensor<T>& g, const Tensor<T>& b, Tensor<T>& da) {
  const std::size_t m = g.rows(), n = g.cols(), k = b.rows();
  const T* pg = g.data().data();
  const T* pb = b.data().data();
  T* pd = da.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    const T* grow = pg + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T* brow = pb + p * n;
      T acc = 0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      pd[i * k + p] += acc;
    }
  }
}

// dB += A^T * G
template <typename T>
void accumulate_tn(const Tensor<T>& a, const Tensor<T>& g, Tensor<T>& db) {
  const std::size_t m = a.rows(), k = a.cols(), n = g.cols();
  const T* pa = a.data().data();
  const T* pg = g.data().data();
  T* pd = db.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    const T* grow = pg + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = pa[i * k + p];
      T* drow = pd + p * n;
      for (std::size_t j = 0; j < n; ++j) drow[j] += av * grow[j];
    }
  }
}

template <typename T>
void accumulate(Tensor<T>* dst, const Tensor<T>& g) {
  if (!dst) return;
  for (std::size_t i = 0; i < g.numel(); ++i) (*dst)[i] += g[i];
}

}  // namespace

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  Tape<T>* tape = a.tape();
  Tensor<T> out = vividet::matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return tape->record(std::move(out), {a, b}, [tape, ia, ib](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    if (d[0]) accumulate_nt(g, tape->value(ib), *d[0]);
    if (d[1]) accumulate_tn(tape->value(ia), g, *d[1]);
  });
}

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("add: shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()) + " differ");
  }
  Tensor<T> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] += bv[i];
  validate_output(out, "add");
  return a.tape()->record(std::move(out), {a, b}, [](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    accumulate(d[0], g);
    accumulate(d[1], g);
  });
}

template <typename T>
Var<T> add_bias(const Var<T>& a, const Var<T>& bias) {
  require_rank2(a.value(), "add_bias");
  const std::size_t m = a.value().rows(), n = a.value().cols();
  if (bias.value().numel() != n) {
    throw DimensionError("add_bias: bias " + shape_str(bias.shape()) + " does not match " + shape_str(a.shape()));
  }
  Tensor<T> out = a.value();
  const auto& bv = bias.value();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) += bv[j];
  validate_output(out, "add_bias");
  return a.tape()->record(std::move(out), {a, bias}, [m, n](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    accumulate(d[0], g);
    if (d[1]) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) (*d[1])[j] += g[i * n + j];
    }
  });
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError("mul: shapes " + shape_str(a.shape()) + " and " + shape_str(b.shape()) + " differ");
  }
  Tape<T>* tape = a.tape();
  Tensor<T> out = a.value();
  const auto& bv = b.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= bv[i];
  validate_output(out, "mul");
  const std::size_t ia = a.id(), ib = b.id();
  return tape->record(std::move(out), {a, b}, [tape, ia, ib](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    const auto& av = tape->value(ia);
    const auto& bv = tape->value(ib);
    if (d[0])
      for (std::size_t i = 0; i < g.numel(); ++i) (*d[0])[i] += g[i] * bv[i];
    if (d[1])
      for (std::size_t i = 0; i < g.numel(); ++i) (*d[1])[i] += g[i] * av[i];
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, T factor) {
  Tensor<T> out = a.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= factor;
  validate_output(out, "scale");
  return a.tape()->record(std::move(out), {a}, [factor](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    for (std::size_t i = 0; i < g.numel(); ++i) (*d[0])[i] += g[i] * factor;
  });
}

template <typename T>
Var<T> transpose(const Var<T>& a) {
  Tensor<T> out = vividet::transpose(a.value());
  return a.tape()->record(std::move(out), {a}, [](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    accumulate(d[0], vividet::transpose(g));
  });
}

template <typename T>
Var<T> reshape(const Var<T>& a, Shape shape) {
  Tensor<T> out = a.value().reshaped(std::move(shape));
  return a.tape()->record(std::move(out), {a}, [](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    accumulate(d[0], g);
  });
}

template <typename T>
Var<T> gelu(const Var<T>& x) {
  Tape<T>* tape = x.tape();
  const std::size_t ix = x.id();
  return tape->record(vividet::gelu(x.value()), {x}, [tape, ix](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    const auto& xv = tape->value(ix);
    for (std::size_t i = 0; i < g.numel(); ++i) (*d[0])[i] += g[i] * gelu_derivative(xv[i]);
  });
}

template <typename T>
Var<T> tanh(const Var<T>& x) {
  Tape<T>* tape = x.tape();
  const std::size_t iy = tape->size();
  return tape->record(tanh_act(x.value()), {x}, [tape, iy](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    const auto& yv = tape->value(iy);
    for (std::size_t i = 0; i < g.numel(); ++i) (*d[0])[i] += g[i] * (T{1} - yv[i] * yv[i]);
  });
}

template <typename T>
Var<T> softmax(const Var<T>& x) {
  Tape<T>* tape = x.tape();
  if (x.value().rank() == 0) throw DimensionError("softmax: scalar input");
  const std::size_t iy = tape->size();
  const std::size_t n = x.shape().back();
  return tape->record(vividet::softmax(x.value(), x.value().rank() - 1), {x},
                      [tape, iy, n](const Tensor<T>& g, std::span<Tensor<T>*> d) {
                        const auto& y = tape->value(iy);
                        const std::size_t rows = y.numel() / n;
                        for (std::size_t r = 0; r < rows; ++r) {
                          const std::size_t base = r * n;
                          T dot = 0;
                          for (std::size_t j = 0; j < n; ++j) dot += g[base + j] * y[base + j];
                          for (std::size_t j = 0; j < n; ++j) (*d[0])[base + j] += y[base + j] * (g[base + j] - dot);
                        }
                      });
}

template <typename T>
Var<T> layer_norm(const Var<T>& x, const Var<T>& gain, const Var<T>& bias, T eps) {
  Tape<T>* tape = x.tape();
  LayerNormStats<T> stats;
  Tensor<T> out = vividet::layer_norm(x.value(), gain.value(), bias.value(), eps, &stats);
  const std::size_t ix = x.id(), ig = gain.id();
  const std::size_t n = x.shape().back();
  return tape->record(
      std::move(out), {x, gain, bias},
      [tape, ix, ig, n, stats = std::move(stats)](const Tensor<T>& g, std::span<Tensor<T>*> d) {
        const auto& xv = tape->value(ix);
        const auto& gv = tape->value(ig);
        const std::size_t rows = xv.numel() / n;
        std::vector<T> xhat(n), dxhat(n);
        for (std::size_t r = 0; r < rows; ++r) {
          const std::size_t base = r * n;
          const T mean = stats.mean[r], rstd = stats.rstd[r];
          T sum_dxhat = 0, sum_dxhat_xhat = 0;
          for (std::size_t j = 0; j < n; ++j) {
            xhat[j] = (xv[base + j] - mean) * rstd;
            dxhat[j] = g[base + j] * gv[j];
            sum_dxhat += dxhat[j];
            sum_dxhat_xhat += dxhat[j] * xhat[j];
            if (d[1]) (*d[1])[j] += g[base + j] * xhat[j];
            if (d[2]) (*d[2])[j] += g[base + j];
          }
          if (d[0]) {
            const T inv_n = T{1} / static_cast<T>(n);
            for (std::size_t j = 0; j < n; ++j) {
              (*d[0])[base + j] += rstd * (dxhat[j] - sum_dxhat * inv_n - xhat[j] * sum_dxhat_xhat * inv_n);
            }
          }
        }
      });
}

template <typename T>
Var<T> slice_cols(const Var<T>& a, std::size_t begin, std::size_t count) {
  const auto& av = a.value();
  require_rank2(av, "slice_cols");
  const std::size_t m = av.rows(), n = av.cols();
  if (count == 0 || begin + count > n) {
    throw DimensionError("slice_cols: columns [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") out of range for " + shape_str(av.shape()));
  }
  Tensor<T> out(Shape{m, count});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < count; ++j) out.at(i, j) = av.at(i, begin + j);
  return a.tape()->record(std::move(out), {a}, [m, n, begin, count](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < count; ++j) (*d[0])[i * n + begin + j] += g[i * count + j];
  });
}

template <typename T>
Var<T> concat_cols(std::span<const Var<T>> parts) {
  if (parts.empty()) throw DimensionError("concat_cols: no inputs");
  const std::size_t m = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    require_rank2(p.value(), "concat_cols");
    if (p.value().rows() != m) {
      throw DimensionError("concat_cols: row mismatch " + shape_str(parts[0].shape()) + " vs " + shape_str(p.shape()));
    }
    widths.push_back(p.value().cols());
    total += widths.back();
  }
  Tensor<T> out(Shape{m, total});
  std::size_t off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& pv = parts[k].value();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < widths[k]; ++j) out.at(i, off + j) = pv.at(i, j);
    off += widths[k];
  }
  std::vector<Var<T>> inputs(parts.begin(), parts.end());
  return parts[0].tape()->record(std::move(out), std::move(inputs),
                                 [m, total, widths](const Tensor<T>& g, std::span<Tensor<T>*> d) {
                                   std::size_t off = 0;
                                   for (std::size_t k = 0; k < widths.size(); ++k) {
                                     if (d[k]) {
                                       for (std::size_t i = 0; i < m; ++i)
                                         for (std::size_t j = 0; j < widths[k]; ++j)
                                           (*d[k])[i * widths[k] + j] += g[i * total + off + j];
                                     }
                                     off += widths[k];
                                   }
                                 });
}

template <typename T>
Var<T> slice_rows(const Var<T>& a, std::size_t begin, std::size_t count) {
  const auto& av = a.value();
  require_rank2(av, "slice_rows");
  const std::size_t m = av.rows(), n = av.cols();
  if (count == 0 || begin + count > m) {
    throw DimensionError("slice_rows: rows [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                         ") out of range for " + shape_str(av.shape()));
  }
  std::vector<T> flat(av.data().begin() + begin * n, av.data().begin() + (begin + count) * n);
  Tensor<T> out(Shape{count, n}, std::move(flat));
  return a.tape()->record(std::move(out), {a}, [n, begin](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    for (std::size_t i = 0; i < g.numel(); ++i) (*d[0])[begin * n + i] += g[i];
  });
}

template <typename T>
Var<T> concat_rows(std::span<const Var<T>> parts) {
  if (parts.empty()) throw DimensionError("concat_rows: no inputs");
  const std::size_t n = parts[0].value().cols();
  std::vector<T> flat;
  std::vector<std::size_t> sizes;
  for (const auto& p : parts) {
    require_rank2(p.value(), "concat_rows");
    if (p.value().cols() != n) {
      throw DimensionError("concat_rows: column mismatch " + shape_str(parts[0].shape()) + " vs " + shape_str(p.shape()));
    }
    flat.insert(flat.end(), p.value().data().begin(), p.value().data().end());
    sizes.push_back(p.value().numel());
  }
  const std::size_t m = flat.size() / n;
  std::vector<Var<T>> inputs(parts.begin(), parts.end());
  return parts[0].tape()->record(Tensor<T>(Shape{m, n}, std::move(flat)), std::move(inputs),
                                 [sizes](const Tensor<T>& g, std::span<Tensor<T>*> d) {
                                   std::size_t off = 0;
                                   for (std::size_t k = 0; k < sizes.size(); ++k) {
                                     if (d[k])
                                       for (std::size_t i = 0; i < sizes[k]; ++i) (*d[k])[i] += g[off + i];
                                     off += sizes[k];
                                   }
                                 });
}

template <typename T>
Var<T> sum(const Var<T>& a) {
  T s = 0;
  for (T v : a.value().data()) s += v;
  return a.tape()->record(Tensor<T>::scalar(s), {a}, [](const Tensor<T>& g, std::span<Tensor<T>*> d) {
    const T gv = g[0];
    for (std::size_t i = 0; i < d[0]->numel(); ++i) (*d[0])[i] += gv;
  });
}

template <typename T>
Var<T> cross_entropy(const Var<T>& logits, std::span<const std::size_t> labels) {
  const auto& z = logits.value();
  require_rank2(z, "cross_entropy");
  const std::size_t b = z.rows(), k = z.cols();
  if (labels.size() != b) {
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) + " labels for logits " +
                         shape_str(z.shape()));
  }
  for (std::size_t lbl : labels) {
    if (lbl >= k) throw std::out_of_range("cross_entropy: label " + std::to_string(lbl) + " >= class count " + std::to_string(k));
  }
  Tensor<T> probs = vividet::softmax(z, 1);
  T loss = 0;
  for (std::size_t i = 0; i < b; ++i) {
    T mx = z.at(i, 0);
    for (std::size_t j = 1; j < k; ++j) mx = std::max(mx, z.at(i, j));
    T s = 0;
    for (std::size_t j = 0; j < k; ++j) s += std::exp(z.at(i, j) - mx);
    loss += (mx + std::log(s)) - z.at(i, labels[i]);
  }
  loss /= static_cast<T>(b);
  Tensor<T> out = Tensor<T>::scalar(loss);
  validate_output(out, "cross_entropy");
  std::vector<std::size_t> lbls(labels.begin(), labels.end());
  return logits.tape()->record(
      std::move(out), {logits},
      [probs = std::move(probs), lbls = std::move(lbls), b, k](const Tensor<T>& g, std::span<Tensor<T>*> d) {
        const T scale = g[0] / static_cast<T>(b);
        for (std::size_t i = 0; i < b; ++i)
          for (std::size_t j = 0; j < k; ++j) {
            const T target = j == lbls[i] ? T{1} : T{0};
            (*d[0])[i * k + j] += scale * (probs.at(i, j) - target);
          }
      });
}

}  // namespace ad

#define VIVIDET_INSTANTIATE_AD(T)                                                             \
  template class Tape<T>;                                                                    \
  template class Gradients<T>;                                                               \
  template Gradients<T> backward<T>(Tape<T>&, const Var<T>&);                                \
  namespace ad {                                                                             \
  template Var<T> matmul<T>(const Var<T>&, const Var<T>&);                                   \
  template Var<T> add<T>(const Var<T>&, const Var<T>&);                                      \
  template Var<T> add_bias<T>(const Var<T>&, const Var<T>&);                                 \
  template Var<T> mul<T>(const Var<T>&, const Var<T>&);                                      \
  template Var<T> scale<T>(const Var<T>&, T);                                                \
  template Var<T> transpose<T>(const Var<T>&);                                               \
  template Var<T> reshape<T>(const Var<T>&, Shape);                                          \
  template Var<T> gelu<T>(const Var<T>&);                                                    \
  template Var<T> tanh<T>(const Var<T>&);                                                    \
  template Var<T> softmax<T>(const Var<T>&);                                                 \
  template Var<T> layer_norm<T>(const Var<T>&, const Var<T>&, const Var<T>&, T);             \
  template Var<T> slice_cols<T>(const Var<T>&, std::size_t, std::size_t);                    \
  template Var<T> concat_cols<T>(std::span<const Var<T>>);                                   \
  template Var<T> slice_rows<T>(const Var<T>&, std::size_t, std::size_t);                    \
  template Var<T> concat_rows<T>(std::span<const Var<T>>);                                   \
  template Var<T> sum<T>(const Var<T>&);                                                     \
  template Var<T> cross_entropy<T>(const Var<T>&, std::span<const std::size_t>);             \
  }

VIVIDET_INSTANTIATE_AD(float)
VIVIDET_INSTANTIATE_AD(double)

#undef VIVIDET_INSTANTIATE_AD

}  // namespace vividet
