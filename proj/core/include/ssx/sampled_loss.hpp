#pragma once

#include <cmath>
#include <utility>

#include "ssx/candidate_sampler.hpp"
#include "ssx/dense_kernels.hpp"
#include "ssx/embed_table.hpp"

// Sampled softmax cross-entropy: a fused forward pass over the m shared
// candidates plus the true label, and an explicit analytic backward pass
// that emits sparse gradient slices instead of relying on autodiff.

namespace ssx {

struct BatchIndices {
  IndexList inputs;  // (B)
  IndexList labels;  // (B)
};

// Everything the backward pass reuses from the forward pass. Embedding
// gathers are kept as copies so backward never touches the tables.
template <class T>
struct ForwardCache {
  std::vector<T> labels_logits;  // (B), prior-corrected
  Matrix<T> samples_logits;      // (B, m), prior-corrected
  std::vector<T> log_norm;       // (B), logsumexp over the m+1 candidate logits
  Matrix<T> inputs_embed;        // (B, d)
  Matrix<T> samples_embed;       // (m, d)
  Matrix<T> labels_embed;        // (B, d)
  IndexList batch_inputs;        // (B)
  IndexList batch_labels;        // (B)
  IndexList sample_ids;          // (m)
  Index input_classes = 0;       // dense gradient shapes
  Index target_classes = 0;
};

template <class T>
struct LossGrads {
  SparseGrad<T> grad_input_embed;   // B rows indexed by batch_inputs
  SparseGrad<T> grad_target_embed;  // m+B rows indexed by sample_ids ++ batch_labels
};

namespace detail {

template <class T>
struct SampledActivations {
  Matrix<T> inputs_embed;
  Matrix<T> samples_embed;
  Matrix<T> labels_embed;
  std::vector<T> labels_logits;
  Matrix<T> samples_logits;
  std::vector<T> log_norm;
};

template <class T>
SampledActivations<T> sampled_activations(const EmbedTable<T>& input_table,
                                          const EmbedTable<T>& target_table,
                                          const BatchIndices& batch,
                                          const CandidateSet<T>& cand) {
  const Index batch_len = static_cast<Index>(batch.inputs.size());
  const Index m = cand.num_sampled();
  if (batch_len < 1 || batch.labels.size() != batch.inputs.size()) {
    throw ShapeError("sampled forward: batch needs equal non-empty inputs and labels, got " +
                     std::to_string(batch.inputs.size()) + " inputs, " +
                     std::to_string(batch.labels.size()) + " labels");
  }
  if (m < 1) throw ShapeError("sampled forward: need at least one candidate sample");
  if (input_table.n_embed() != target_table.n_embed()) {
    throw ShapeError("sampled forward: embed dims disagree: input table " +
                     input_table.weights.shape_string() + ", target table " +
                     target_table.weights.shape_string());
  }
  if (static_cast<Index>(cand.sample_log_priors.size()) != m ||
      static_cast<Index>(cand.label_log_priors.size()) != batch_len) {
    throw ShapeError("sampled forward: candidate priors sized " +
                     std::to_string(cand.sample_log_priors.size()) + "/" +
                     std::to_string(cand.label_log_priors.size()) + ", expected " +
                     std::to_string(m) + "/" + std::to_string(batch_len));
  }

  SampledActivations<T> act;
  act.inputs_embed = row_gather(input_table.weights, batch.inputs);    // (B, d)
  act.samples_embed = row_gather(target_table.weights, cand.sample_ids);  // (m, d)
  act.labels_embed = row_gather(target_table.weights, batch.labels);   // (B, d)

  act.labels_logits = row_dot(act.inputs_embed, act.labels_embed);     // (B)
  for (Index i = 0; i < batch_len; ++i) {
    act.labels_logits[static_cast<std::size_t>(i)] -=
        cand.label_log_priors[static_cast<std::size_t>(i)];  // add prior correction
  }

  act.samples_logits = matmul(act.inputs_embed, act.samples_embed, /*transpose_b=*/true);
  for (Index i = 0; i < batch_len; ++i) {
    T* row = act.samples_logits.row(i).data();
    for (Index j = 0; j < m; ++j) row[j] -= cand.sample_log_priors[static_cast<std::size_t>(j)];
  }

  // logsumexp over the m+1 candidate logits, samples first, label last.
  act.log_norm.resize(static_cast<std::size_t>(batch_len));
  for (Index i = 0; i < batch_len; ++i) {
    const T* row = act.samples_logits.row(i).data();
    const T lbl = act.labels_logits[static_cast<std::size_t>(i)];
    T mx = lbl;
    for (Index j = 0; j < m; ++j) mx = row[j] > mx ? row[j] : mx;
    T sum = 0;
    for (Index j = 0; j < m; ++j) sum += std::exp(row[j] - mx);
    sum += std::exp(lbl - mx);
    act.log_norm[static_cast<std::size_t>(i)] = mx + std::log(sum);
  }
  return act;
}

template <class T>
double mean_candidate_loss(const std::vector<T>& labels_logits, const std::vector<T>& log_norm) {
  double sum = 0;
  for (std::size_t i = 0; i < log_norm.size(); ++i) {
    sum += static_cast<double>(log_norm[i]) - static_cast<double>(labels_logits[i]);
  }
  return sum / static_cast<double>(log_norm.size());
}

// Shared gradient math: given logits, the normalizers, and the gathered
// embeddings, emit the two sparse gradient slices.
template <class T>
LossGrads<T> candidate_grads(const std::vector<T>& labels_logits, const Matrix<T>& samples_logits,
                             const std::vector<T>& log_norm, const Matrix<T>& inputs_embed,
                             const Matrix<T>& samples_embed, const Matrix<T>& labels_embed,
                             const IndexList& batch_inputs, const IndexList& batch_labels,
                             const IndexList& sample_ids, Index input_classes,
                             Index target_classes) {
  const Index batch_len = samples_logits.rows();
  const Index m = samples_logits.cols();
  const Index d = inputs_embed.cols();

  // probs(i,j) = exp(samples_logits - Z) / B; mass(i) = sum_j probs(i,j).
  Matrix<T> probs(batch_len, m);
  std::vector<T> mass(static_cast<std::size_t>(batch_len));
  for (Index i = 0; i < batch_len; ++i) {
    const T* lrow = samples_logits.row(i).data();
    T* prow = probs.row(i).data();
    const T z = log_norm[static_cast<std::size_t>(i)];
    T row_mass = 0;
    for (Index j = 0; j < m; ++j) {
      prow[j] = std::exp(lrow[j] - z) / static_cast<T>(batch_len);
      row_mass += prow[j];
    }
    mass[static_cast<std::size_t>(i)] = row_mass;
  }

  LossGrads<T> grads;

  // Input-side rows: probs * samples_embed - mass[i] * labels_embed[i].
  Matrix<T> grad_input = matmul(probs, samples_embed);  // (B, d)
  for (Index i = 0; i < batch_len; ++i) {
    detail::axpy(-mass[static_cast<std::size_t>(i)], labels_embed.row(i).data(),
                 grad_input.row(i).data(), d);
  }
  grads.grad_input_embed = SparseGrad<T>{batch_inputs, std::move(grad_input), input_classes, d};

  // Target-side rows: samples first (probs^T * inputs_embed), labels after
  // (-mass[i] * inputs_embed[i]).
  Matrix<T> sample_rows = matmul_ta(probs, inputs_embed);  // (m, d)
  Matrix<T> grad_target(m + batch_len, d);
  std::copy(sample_rows.data().begin(), sample_rows.data().end(), grad_target.data().begin());
  for (Index i = 0; i < batch_len; ++i) {
    const T* u = inputs_embed.row(i).data();
    T* out = grad_target.row(m + i).data();
    const T neg_mass = -mass[static_cast<std::size_t>(i)];
    for (Index k = 0; k < d; ++k) out[k] = neg_mass * u[k];
  }
  IndexList target_indices = sample_ids;
  target_indices.insert(target_indices.end(), batch_labels.begin(), batch_labels.end());
  grads.grad_target_embed =
      SparseGrad<T>{std::move(target_indices), std::move(grad_target), target_classes, d};
  return grads;
}

}  // namespace detail

// Forward pass: prior-corrected candidate logits, per-row logsumexp, mean
// loss. The label is always among the candidates, so the loss is >= 0.
template <class T>
std::pair<double, ForwardCache<T>> forward(const EmbedTable<T>& input_table,
                                           const EmbedTable<T>& target_table,
                                           const BatchIndices& batch,
                                           const CandidateSet<T>& cand) {
  auto act = detail::sampled_activations(input_table, target_table, batch, cand);
  const double loss = detail::mean_candidate_loss(act.labels_logits, act.log_norm);
  ForwardCache<T> cache{std::move(act.labels_logits), std::move(act.samples_logits),
                        std::move(act.log_norm),      std::move(act.inputs_embed),
                        std::move(act.samples_embed), std::move(act.labels_embed),
                        batch.inputs,                 batch.labels,
                        cand.sample_ids,              input_table.n_classes(),
                        target_table.n_classes()};
  return {loss, std::move(cache)};
}

// Fused backward pass: reuses the cached logits, normalizers and gathered
// embeddings; no re-gather, no recompute. Gradient indices may duplicate.
template <class T>
LossGrads<T> backward(const ForwardCache<T>& cache) {
  return detail::candidate_grads(cache.labels_logits, cache.samples_logits, cache.log_norm,
                                 cache.inputs_embed, cache.samples_embed, cache.labels_embed,
                                 cache.batch_inputs, cache.batch_labels, cache.sample_ids,
                                 cache.input_classes, cache.target_classes);
}

template <class T>
std::pair<double, LossGrads<T>> loss_and_grads(const EmbedTable<T>& input_table,
                                               const EmbedTable<T>& target_table,
                                               const BatchIndices& batch,
                                               const CandidateSet<T>& cand) {
  auto [loss, cache] = forward(input_table, target_table, batch, cand);
  return {loss, backward(cache)};
}

// Unfused baseline: re-gathers the embeddings and recomputes the logits and
// normalizers from scratch before running the same gradient math. Used by
// the benchmark to quantify what fusing the backward pass saves.
template <class T>
LossGrads<T> naive_backward(const EmbedTable<T>& input_table, const EmbedTable<T>& target_table,
                            const BatchIndices& batch, const CandidateSet<T>& cand) {
  auto act = detail::sampled_activations(input_table, target_table, batch, cand);
  return detail::candidate_grads(act.labels_logits, act.samples_logits, act.log_norm,
                                 act.inputs_embed, act.samples_embed, act.labels_embed,
                                 batch.inputs, batch.labels, cand.sample_ids,
                                 input_table.n_classes(), target_table.n_classes());
}

}  // namespace ssx
