#pragma once

#include <cstdint>
#include <functional>

#include "ssx/matrix.hpp"

// Central finite-difference oracle for both loss implementations. All
// arithmetic is 64-bit; the candidate set is drawn once per check and held
// fixed across perturbations (randomness belongs to the estimator, not to
// the function being differentiated).

namespace ssx {

enum class TableTag { kInput, kTarget };

struct GradReport {
  // max_rel_err is taken over coordinates whose absolute error exceeds
  // atol (zero if none does), so pass == (max_rel_err < rtol ||
  // max_abs_err < atol). A coordinate fails only when both its absolute
  // error is >= atol and its relative error is >= rtol.
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  TableTag worst_table = TableTag::kInput;
  Index worst_row = -1;
  Index worst_col = -1;
  Index n_checked = 0;
  bool pass = true;
};

struct GradCheckConfig {
  Index n_classes = 20;
  Index n_embed = 4;
  Index n_batch = 4;
  Index n_sampled = 8;
};

// (loss(x+h) - loss(x-h)) / 2h for the table entry at (row, col); the entry
// is restored afterward. Throws OracleError if either evaluation is
// non-finite.
double numeric_grad(const std::function<double()>& loss_fn, Matrix<double>& weights, Index row,
                    Index col, double h);

// Sweeps every coordinate of both tables, comparing the analytic gradients
// against numeric_grad of loss_fn.
GradReport compare_grads(const std::function<double()>& loss_fn, Matrix<double>& input_weights,
                         Matrix<double>& target_weights, const Matrix<double>& analytic_input,
                         const Matrix<double>& analytic_target, double rtol, double atol,
                         double h);

// Random small problem, frozen log-uniform candidates, sampled loss.
GradReport check_sampled(const GradCheckConfig& cfg, std::uint64_t seed, double rtol = 1e-5,
                         double atol = 1e-8, double h = 1e-6);

// Same sweep against the full softmax loss.
GradReport check_full(const GradCheckConfig& cfg, std::uint64_t seed, double rtol = 1e-5,
                      double atol = 1e-8, double h = 1e-6);

}  // namespace ssx
