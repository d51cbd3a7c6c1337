#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ssx/matrix.hpp"
#include "ssx/rng.hpp"

namespace ssx {

enum class DistKind { kUniform, kLogUniform };

// Proposal distribution over class ids. Log-uniform puts
// P(k) = (ln(k+2) - ln(k+1)) / ln(n+1), the standard choice for
// Zipf-distributed vocabularies.
class CandidateDist {
 public:
  CandidateDist(DistKind kind, Index n_classes)
      : kind_(kind), n_(n_classes), log_range_(std::log(static_cast<double>(n_classes) + 1.0)) {
    if (n_classes < 1) {
      throw ShapeError("CandidateDist: need n_classes >= 1, got " + std::to_string(n_classes));
    }
  }

  DistKind kind() const { return kind_; }
  Index n_classes() const { return n_; }

  double prob(Index class_id) const {
    if (class_id < 0 || class_id >= n_) throw IndexError("CandidateDist::prob", class_id, n_);
    if (kind_ == DistKind::kUniform) return 1.0 / static_cast<double>(n_);
    return (std::log(static_cast<double>(class_id) + 2.0) -
            std::log(static_cast<double>(class_id) + 1.0)) /
           log_range_;
  }

  double log_prob(Index class_id) const { return std::log(prob(class_id)); }

  // Inverse-CDF draw from a uniform u in [0, 1).
  Index draw(double u) const {
    Index id;
    if (kind_ == DistKind::kUniform) {
      id = static_cast<Index>(u * static_cast<double>(n_));
    } else {
      id = static_cast<Index>(std::exp(u * log_range_)) - 1;
    }
    if (id < 0) id = 0;
    if (id >= n_) id = n_ - 1;  // guards floating-point roundoff at the top end
    return id;
  }

 private:
  DistKind kind_;
  Index n_;
  double log_range_;
};

// The m sample ids shared across the batch, with the log-priors the loss
// subtracts from each candidate logit.
template <class T>
struct CandidateSet {
  IndexList sample_ids;                 // (m)
  std::vector<T> sample_log_priors;     // (m), ln q(sample_ids[j])
  std::vector<T> label_log_priors;      // (B), ln q(labels[i])

  Index num_sampled() const { return static_cast<Index>(sample_ids.size()); }
};

// m ids drawn i.i.d. with replacement; duplicates are legal and labels are
// not excluded (an accidental hit simply appears twice among candidates).
// Deterministic for a fixed seed.
template <class T>
CandidateSet<T> draw_candidates(const CandidateDist& dist, Index num_sampled,
                                const IndexList& labels, std::uint64_t seed) {
  if (num_sampled < 1) {
    throw ShapeError("draw_candidates: need num_sampled >= 1, got " +
                     std::to_string(num_sampled));
  }
  CandidateSet<T> cand;
  cand.sample_ids.reserve(static_cast<std::size_t>(num_sampled));
  cand.sample_log_priors.reserve(static_cast<std::size_t>(num_sampled));
  Xoshiro256PlusPlus rng(seed);
  for (Index j = 0; j < num_sampled; ++j) {
    const Index id = dist.draw(rng.next_double());
    cand.sample_ids.push_back(id);
    cand.sample_log_priors.push_back(static_cast<T>(dist.log_prob(id)));
  }
  cand.label_log_priors.reserve(labels.size());
  for (Index label : labels) {
    cand.label_log_priors.push_back(static_cast<T>(dist.log_prob(label)));
  }
  return cand;
}

// All classes except exclude_label in ascending order, every log-prior
// (including the label's) set to ln(1/n). With B=1 this makes the sampled
// loss coincide with the full softmax loss.
template <class T>
CandidateSet<T> exhaustive_candidates(Index n_classes, Index exclude_label) {
  if (n_classes < 2) {
    throw ShapeError("exhaustive_candidates: need n_classes >= 2, got " +
                     std::to_string(n_classes));
  }
  if (exclude_label < 0 || exclude_label >= n_classes) {
    throw IndexError("exhaustive_candidates", exclude_label, n_classes);
  }
  const T log_prior = static_cast<T>(-std::log(static_cast<double>(n_classes)));
  CandidateSet<T> cand;
  cand.sample_ids.reserve(static_cast<std::size_t>(n_classes - 1));
  for (Index c = 0; c < n_classes; ++c) {
    if (c != exclude_label) cand.sample_ids.push_back(c);
  }
  cand.sample_log_priors.assign(static_cast<std::size_t>(n_classes - 1), log_prior);
  cand.label_log_priors.assign(1, log_prior);
  return cand;
}

}  // namespace ssx
