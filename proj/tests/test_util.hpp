#pragma once

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "ssx/candidate_sampler.hpp"
#include "ssx/embed_table.hpp"
#include "ssx/matrix.hpp"
#include "ssx/rng.hpp"
#include "ssx/sampled_loss.hpp"

// Test-side oracles, deliberately independent of the library kernels:
// direct long-double summation, no max shift, no shared helpers.

namespace ssx::test {

inline long double dot_ld(std::span<const double> a, std::span<const double> b) {
  long double s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += static_cast<long double>(a[k]) * static_cast<long double>(b[k]);
  }
  return s;
}

// Brute-force sampled softmax cross-entropy over the m+1 candidate logits.
inline double reference_sampled_loss(const EmbedTable<double>& input_table,
                                     const EmbedTable<double>& target_table,
                                     const BatchIndices& batch,
                                     const CandidateSet<double>& cand) {
  const std::size_t batch_len = batch.inputs.size();
  long double total = 0;
  for (std::size_t i = 0; i < batch_len; ++i) {
    const auto u = input_table.weights.row(batch.inputs[i]);
    const long double label_logit =
        dot_ld(u, target_table.weights.row(batch.labels[i])) -
        static_cast<long double>(cand.label_log_priors[i]);
    long double sum_exp = 0;
    for (std::size_t j = 0; j < cand.sample_ids.size(); ++j) {
      const long double logit = dot_ld(u, target_table.weights.row(cand.sample_ids[j])) -
                                static_cast<long double>(cand.sample_log_priors[j]);
      sum_exp += std::exp(logit);
    }
    sum_exp += std::exp(label_logit);
    total += std::log(sum_exp) - label_logit;
  }
  return static_cast<double>(total / static_cast<long double>(batch_len));
}

// Brute-force full softmax cross-entropy over all classes.
inline double reference_full_loss(const EmbedTable<double>& input_table,
                                  const EmbedTable<double>& target_table,
                                  const BatchIndices& batch) {
  const std::size_t batch_len = batch.inputs.size();
  long double total = 0;
  for (std::size_t i = 0; i < batch_len; ++i) {
    const auto u = input_table.weights.row(batch.inputs[i]);
    long double sum_exp = 0;
    for (Index c = 0; c < target_table.n_classes(); ++c) {
      sum_exp += std::exp(dot_ld(u, target_table.weights.row(c)));
    }
    total += std::log(sum_exp) - dot_ld(u, target_table.weights.row(batch.labels[i]));
  }
  return static_cast<double>(total / static_cast<long double>(batch_len));
}

template <class T>
Matrix<T> random_matrix(Xoshiro256PlusPlus& rng, Index rows, Index cols, double scale) {
  Matrix<T> m(rows, cols);
  for (auto& v : m.data()) v = static_cast<T>(scale * (2.0 * rng.next_double() - 1.0));
  return m;
}

inline double max_abs_diff(const Matrix<double>& a, const Matrix<double>& b) {
  double worst = 0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  }
  return worst;
}

template <class T>
bool bitwise_equal(const Matrix<T>& a, const Matrix<T>& b) {
  return a.same_shape(b) &&
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(T)) == 0;
}

// Pearson chi-square statistic of observed counts against expected
// probabilities.
inline double chi_square(const std::vector<std::int64_t>& counts,
                         const std::vector<double>& probs, std::int64_t n_draws) {
  double stat = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double expected = probs[k] * static_cast<double>(n_draws);
    const double diff = static_cast<double>(counts[k]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

// Upper 0.001 quantile of chi-square with 15 degrees of freedom.
inline constexpr double kChi2Crit15Df001 = 37.697;

// Minimal XML well-formedness check: tag balance and proper nesting.
inline bool xml_well_formed(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = text.find('<', pos)) != std::string::npos) {
    const std::size_t end = text.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = text.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag.back() == '/') continue;  // self-closing
    if (tag[0] == '/') {
      if (stack.empty()) return false;
      const std::string name = tag.substr(1);
      if (stack.back() != name) return false;
      stack.pop_back();
    } else {
      const std::size_t space = tag.find_first_of(" \t\n");
      stack.push_back(space == std::string::npos ? tag : tag.substr(0, space));
    }
  }
  return stack.empty();
}

}  // namespace ssx::test
