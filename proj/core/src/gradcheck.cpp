#include "ssx/gradcheck.hpp"

#include <cmath>

#include "ssx/candidate_sampler.hpp"
#include "ssx/embed_table.hpp"
#include "ssx/full_softmax.hpp"
#include "ssx/rng.hpp"
#include "ssx/sampled_loss.hpp"

namespace ssx {

double numeric_grad(const std::function<double()>& loss_fn, Matrix<double>& weights, Index row,
                    Index col, double h) {
  if (!(h > 0)) throw ShapeError("numeric_grad: h must be positive");
  double& entry = weights(row, col);
  const double saved = entry;
  entry = saved + h;
  const double loss_plus = loss_fn();
  entry = saved - h;
  const double loss_minus = loss_fn();
  entry = saved;
  if (!std::isfinite(loss_plus) || !std::isfinite(loss_minus)) {
    throw OracleError("numeric_grad: non-finite loss under perturbation at (" +
                      std::to_string(row) + ", " + std::to_string(col) + ")");
  }
  return (loss_plus - loss_minus) / (2.0 * h);
}

namespace {

struct SweepState {
  double rtol, atol, h;
  GradReport report;

  void sweep(const std::function<double()>& loss_fn, Matrix<double>& weights,
             const Matrix<double>& analytic, TableTag tag) {
    for (Index r = 0; r < weights.rows(); ++r) {
      for (Index c = 0; c < weights.cols(); ++c) {
        const double numeric = numeric_grad(loss_fn, weights, r, c, h);
        const double a = analytic(r, c);
        const double abs_err = std::abs(a - numeric);
        const double denom = std::max(std::abs(a), std::abs(numeric));
        const double rel_err = denom > 0 ? abs_err / denom : 0.0;
        report.max_abs_err = std::max(report.max_abs_err, abs_err);
        if (abs_err >= atol) {
          if (rel_err >= rtol) report.pass = false;
          if (rel_err > report.max_rel_err) {
            report.max_rel_err = rel_err;
            report.worst_table = tag;
            report.worst_row = r;
            report.worst_col = c;
          }
        }
        ++report.n_checked;
      }
    }
  }
};

}  // namespace

GradReport compare_grads(const std::function<double()>& loss_fn, Matrix<double>& input_weights,
                         Matrix<double>& target_weights, const Matrix<double>& analytic_input,
                         const Matrix<double>& analytic_target, double rtol, double atol,
                         double h) {
  if (!input_weights.same_shape(analytic_input) || !target_weights.same_shape(analytic_target)) {
    throw ShapeError("compare_grads: analytic gradient shapes do not match the tables");
  }
  SweepState state{rtol, atol, h, GradReport{}};
  state.sweep(loss_fn, input_weights, analytic_input, TableTag::kInput);
  state.sweep(loss_fn, target_weights, analytic_target, TableTag::kTarget);
  return state.report;
}

namespace {

struct Problem {
  EmbedTable<double> input_table;
  EmbedTable<double> target_table;
  BatchIndices batch;
  CandidateSet<double> cand;
};

Problem make_problem(const GradCheckConfig& cfg, std::uint64_t seed) {
  if (cfg.n_classes < 1 || cfg.n_embed < 1 || cfg.n_batch < 1 || cfg.n_sampled < 1) {
    throw ShapeError("gradcheck: all config counts must be >= 1");
  }
  SplitMix64 seeds(seed);
  Problem p;
  p.input_table = init_table<double>(cfg.n_classes, cfg.n_embed, TableRole::kInput, seeds.next());
  p.target_table =
      init_table<double>(cfg.n_classes, cfg.n_embed, TableRole::kTarget, seeds.next());
  Xoshiro256PlusPlus rng(seeds.next());
  const auto n = static_cast<std::uint64_t>(cfg.n_classes);
  for (Index i = 0; i < cfg.n_batch; ++i) {
    p.batch.inputs.push_back(static_cast<Index>(rng.next_below(n)));
    p.batch.labels.push_back(static_cast<Index>(rng.next_below(n)));
  }
  // Drawn once; every perturbed evaluation sees the same candidates.
  CandidateDist dist(DistKind::kLogUniform, cfg.n_classes);
  p.cand = draw_candidates<double>(dist, cfg.n_sampled, p.batch.labels, seeds.next());
  return p;
}

}  // namespace

GradReport check_sampled(const GradCheckConfig& cfg, std::uint64_t seed, double rtol, double atol,
                         double h) {
  Problem p = make_problem(cfg, seed);
  auto grads = loss_and_grads(p.input_table, p.target_table, p.batch, p.cand).second;
  const Matrix<double> analytic_input = densify(grads.grad_input_embed);
  const Matrix<double> analytic_target = densify(grads.grad_target_embed);
  auto loss_fn = [&p] { return forward(p.input_table, p.target_table, p.batch, p.cand).first; };
  return compare_grads(loss_fn, p.input_table.weights, p.target_table.weights, analytic_input,
                       analytic_target, rtol, atol, h);
}

GradReport check_full(const GradCheckConfig& cfg, std::uint64_t seed, double rtol, double atol,
                      double h) {
  Problem p = make_problem(cfg, seed);
  auto cache = full_forward(p.input_table, p.target_table, p.batch).second;
  auto grads = full_backward(cache);
  const Matrix<double> analytic_input = densify(grads.grad_input);
  auto loss_fn = [&p] { return full_forward(p.input_table, p.target_table, p.batch).first; };
  return compare_grads(loss_fn, p.input_table.weights, p.target_table.weights, analytic_input,
                       grads.grad_target, rtol, atol, h);
}

}  // namespace ssx
