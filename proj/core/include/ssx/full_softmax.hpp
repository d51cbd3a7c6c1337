#pragma once

#include <cmath>
#include <utility>

#include "ssx/dense_kernels.hpp"
#include "ssx/embed_table.hpp"
#include "ssx/sampled_loss.hpp"

// Exact softmax cross-entropy with explicit normalization over all classes.
// Correctness oracle and speed baseline for the sampled loss; the target
// gradient comes back dense on purpose.

namespace ssx {

template <class T>
struct FullForwardCache {
  Matrix<T> logits;         // (B, n)
  std::vector<T> log_norm;  // (B)
  Matrix<T> inputs_embed;   // (B, d)
  IndexList batch_inputs;
  IndexList batch_labels;
  Index input_classes = 0;  // dense shape of the input-side gradient
  // Borrowed for the backward pass; the caller must not mutate or destroy
  // the table between forward and backward.
  const EmbedTable<T>* target_table = nullptr;
};

template <class T>
struct FullGrads {
  SparseGrad<T> grad_input;  // B rows indexed by batch_inputs
  Matrix<T> grad_target;     // (n, d) dense
};

template <class T>
std::pair<double, FullForwardCache<T>> full_forward(const EmbedTable<T>& input_table,
                                                    const EmbedTable<T>& target_table,
                                                    const BatchIndices& batch) {
  const Index batch_len = static_cast<Index>(batch.inputs.size());
  if (batch_len < 1 || batch.labels.size() != batch.inputs.size()) {
    throw ShapeError("full_forward: batch needs equal non-empty inputs and labels, got " +
                     std::to_string(batch.inputs.size()) + " inputs, " +
                     std::to_string(batch.labels.size()) + " labels");
  }
  if (input_table.n_embed() != target_table.n_embed()) {
    throw ShapeError("full_forward: embed dims disagree: input table " +
                     input_table.weights.shape_string() + ", target table " +
                     target_table.weights.shape_string());
  }
  const Index n = target_table.n_classes();

  FullForwardCache<T> cache;
  cache.inputs_embed = row_gather(input_table.weights, batch.inputs);
  cache.logits = matmul(cache.inputs_embed, target_table.weights, /*transpose_b=*/true);
  cache.log_norm = row_logsumexp(cache.logits);
  cache.batch_inputs = batch.inputs;
  cache.batch_labels = batch.labels;
  cache.input_classes = input_table.n_classes();
  cache.target_table = &target_table;

  double sum = 0;
  for (Index i = 0; i < batch_len; ++i) {
    const Index label = batch.labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= n) throw IndexError("full_forward", label, n);
    sum += static_cast<double>(cache.log_norm[static_cast<std::size_t>(i)]) -
           static_cast<double>(cache.logits(i, label));
  }
  return {sum / static_cast<double>(batch_len), std::move(cache)};
}

// Textbook softmax cross-entropy gradient, mean-reduced over the batch:
//   grad_input[i] = (1/B) sum_c (y[i,c] - 1{c==label_i}) v_c
//   grad_target[c] = (1/B) sum_i (y[i,c] - 1{c==label_i}) u_i
template <class T>
FullGrads<T> full_backward(const FullForwardCache<T>& cache) {
  if (cache.target_table == nullptr) {
    throw ShapeError("full_backward: cache has no target table");
  }
  const Matrix<T>& target = cache.target_table->weights;
  const Index batch_len = cache.logits.rows();
  const Index n = cache.logits.cols();
  const Index d = cache.inputs_embed.cols();
  const T batch_size = static_cast<T>(batch_len);

  Matrix<T> probs(batch_len, n);
  for (Index i = 0; i < batch_len; ++i) {
    const T* lrow = cache.logits.row(i).data();
    T* prow = probs.row(i).data();
    const T z = cache.log_norm[static_cast<std::size_t>(i)];
    for (Index c = 0; c < n; ++c) prow[c] = std::exp(lrow[c] - z);
  }

  FullGrads<T> grads;

  Matrix<T> grad_input = matmul(probs, target);  // (B, d)
  for (Index i = 0; i < batch_len; ++i) {
    const Index label = cache.batch_labels[static_cast<std::size_t>(i)];
    detail::axpy(T{-1}, target.row(label).data(), grad_input.row(i).data(), d);
  }
  for (T& v : grad_input.data()) v /= batch_size;
  grads.grad_input = SparseGrad<T>{cache.batch_inputs, std::move(grad_input),
                                   cache.input_classes, d};

  grads.grad_target = matmul_ta(probs, cache.inputs_embed);  // (n, d)
  for (Index i = 0; i < batch_len; ++i) {
    const Index label = cache.batch_labels[static_cast<std::size_t>(i)];
    detail::axpy(T{-1}, cache.inputs_embed.row(i).data(), grads.grad_target.row(label).data(), d);
  }
  for (T& v : grads.grad_target.data()) v /= batch_size;
  return grads;
}

}  // namespace ssx
