// Acceptance suite: runs every release criterion at its pinned tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ssx/bench.hpp"
#include "ssx/candidate_sampler.hpp"
#include "ssx/full_softmax.hpp"
#include "ssx/gradcheck.hpp"
#include "ssx/sampled_loss.hpp"
#include "ssx/train.hpp"
#include "test_util.hpp"

namespace {

using namespace ssx;

struct Criterion {
  std::string name;
  std::function<bool(std::string&)> run;
};

// 50 random small configs; densified analytic gradients of both losses match
// central finite differences with rel err < 1e-5 (abs floor 1e-8).
bool gradient_oracle_suite(std::string& detail) {
  Xoshiro256PlusPlus rng(101);
  double worst_rel = 0, worst_abs = 0;
  int failures = 0;
  for (int trial = 0; trial < 50; ++trial) {
    GradCheckConfig cfg;
    cfg.n_classes = 2 + static_cast<Index>(rng.next_below(49));  // <= 50
    cfg.n_embed = 1 + static_cast<Index>(rng.next_below(8));     // <= 8
    cfg.n_batch = 1 + static_cast<Index>(rng.next_below(8));     // <= 8
    cfg.n_sampled = 1 + static_cast<Index>(rng.next_below(16));  // <= 16
    const std::uint64_t seed = rng.next();
    const auto sampled = check_sampled(cfg, seed, 1e-5, 1e-8);
    const auto full = check_full(cfg, seed, 1e-5, 1e-8);
    failures += sampled.pass ? 0 : 1;
    failures += full.pass ? 0 : 1;
    worst_rel = std::max({worst_rel, sampled.max_rel_err, full.max_rel_err});
    worst_abs = std::max({worst_abs, sampled.max_abs_err, full.max_abs_err});
  }
  std::ostringstream ss;
  ss << "50 configs, sampled+full, worst masked rel err " << worst_rel << ", worst abs err "
     << worst_abs;
  detail = ss.str();
  return failures == 0;
}

// B=1 with exhaustive uniform candidates: sampled loss equals full softmax
// loss within 1e-10 and densified gradients within 1e-9, 20 instances.
bool oracle_equivalence(std::string& detail) {
  Xoshiro256PlusPlus rng(202);
  double worst_loss = 0, worst_grad = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.next_below(39));  // <= 40
    const Index d = 1 + static_cast<Index>(rng.next_below(8));
    const auto input = init_table<double>(n, d, TableRole::kInput, rng.next(), 1.0);
    const auto target = init_table<double>(n, d, TableRole::kTarget, rng.next(), 1.0);
    const Index label = static_cast<Index>(rng.next_below(n));
    BatchIndices batch{{static_cast<Index>(rng.next_below(n))}, {label}};
    const auto cand = exhaustive_candidates<double>(n, label);

    const auto [sampled_loss_val, sampled_grads] = loss_and_grads(input, target, batch, cand);
    const auto [full_loss_val, full_cache] = full_forward(input, target, batch);
    const auto full_grads = full_backward(full_cache);

    worst_loss = std::max(worst_loss, std::abs(sampled_loss_val - full_loss_val));
    worst_grad = std::max(worst_grad,
                          test::max_abs_diff(densify(sampled_grads.grad_input_embed),
                                             densify(full_grads.grad_input)));
    worst_grad = std::max(worst_grad, test::max_abs_diff(densify(sampled_grads.grad_target_embed),
                                                         full_grads.grad_target));
  }
  std::ostringstream ss;
  ss << "20 instances, worst loss gap " << worst_loss << ", worst grad gap " << worst_grad;
  detail = ss.str();
  return worst_loss < 1e-10 && worst_grad < 1e-9;
}

// The d=1 instance (u=[1], v=[[1],[0]], label 0, sample 1, priors 0.5).
bool worked_micro_example(std::string& detail) {
  EmbedTable<double> input{Matrix<double>::from_rows({{1}}), TableRole::kInput};
  EmbedTable<double> target{Matrix<double>::from_rows({{1}, {0}}), TableRole::kTarget};
  BatchIndices batch{{0}, {0}};
  CandidateSet<double> cand{{1}, {std::log(0.5)}, {std::log(0.5)}};

  const auto [loss, grads] = loss_and_grads(input, target, batch, cand);
  const double expected_loss = std::log(1.0 + std::exp(-1.0));
  const double expected_grad = 1.0 / (1.0 + std::exp(1.0));

  const double err =
      std::max({std::abs(loss - expected_loss),
                std::abs(std::abs(grads.grad_input_embed.rows(0, 0)) - expected_grad),
                std::abs(std::abs(grads.grad_target_embed.rows(0, 0)) - expected_grad),
                std::abs(std::abs(grads.grad_target_embed.rows(1, 0)) - expected_grad)});
  std::ostringstream ss;
  ss << "loss " << loss << " vs ln(1+e^-1), three rows at 1/(1+e), max err " << err;
  detail = ss.str();
  return err < 1e-9;
}

// Prior-shift invariance, permutation equivariance, non-negativity and
// per-row probability normalization over >= 100 random instances each.
bool invariance_suite(std::string& detail) {
  Xoshiro256PlusPlus rng(303);
  double worst_shift = 0, worst_perm = 0, worst_norm = 0, worst_loss = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 3 + static_cast<Index>(rng.next_below(30));
    const Index d = 1 + static_cast<Index>(rng.next_below(8));
    const Index batch_len = 1 + static_cast<Index>(rng.next_below(8));
    const Index m = 2 + static_cast<Index>(rng.next_below(15));
    const auto input = init_table<double>(n, d, TableRole::kInput, rng.next(), 1.0);
    const auto target = init_table<double>(n, d, TableRole::kTarget, rng.next(), 1.0);
    BatchIndices batch;
    for (Index i = 0; i < batch_len; ++i) {
      batch.inputs.push_back(static_cast<Index>(rng.next_below(n)));
      batch.labels.push_back(static_cast<Index>(rng.next_below(n)));
    }
    const CandidateDist dist(DistKind::kLogUniform, n);
    const auto cand = draw_candidates<double>(dist, m, batch.labels, rng.next());

    const auto [loss, cache] = forward(input, target, batch, cand);
    const auto grads = backward(cache);
    worst_loss = std::min(worst_loss, loss);  // non-negativity: min must stay >= 0

    // Normalization: B * samples_mass[i] + exp(labels_logits[i] - Z[i]) = 1.
    for (Index i = 0; i < batch_len; ++i) {
      const double z = cache.log_norm[static_cast<std::size_t>(i)];
      double mass = 0;
      for (Index j = 0; j < m; ++j) {
        mass += std::exp(cache.samples_logits(i, j) - z) / static_cast<double>(batch_len);
      }
      const double total = static_cast<double>(batch_len) * mass +
                           std::exp(cache.labels_logits[static_cast<std::size_t>(i)] - z);
      worst_norm = std::max(worst_norm, std::abs(total - 1.0));
    }

    // Prior shift: add one constant to every log-prior.
    auto shifted = cand;
    const double shift = 4.0 * (2.0 * rng.next_double() - 1.0);
    for (auto& lp : shifted.sample_log_priors) lp += shift;
    for (auto& lp : shifted.label_log_priors) lp += shift;
    const auto [shifted_loss, shifted_grads] = loss_and_grads(input, target, batch, shifted);
    worst_shift = std::max(worst_shift, std::abs(shifted_loss - loss));
    worst_shift = std::max(worst_shift, test::max_abs_diff(densify(shifted_grads.grad_input_embed),
                                                           densify(grads.grad_input_embed)));
    worst_shift =
        std::max(worst_shift, test::max_abs_diff(densify(shifted_grads.grad_target_embed),
                                                 densify(grads.grad_target_embed)));

    // Joint permutation of (sample_ids, sample_log_priors): reversal.
    auto reversed = cand;
    std::reverse(reversed.sample_ids.begin(), reversed.sample_ids.end());
    std::reverse(reversed.sample_log_priors.begin(), reversed.sample_log_priors.end());
    const auto [rev_loss, rev_grads] = loss_and_grads(input, target, batch, reversed);
    worst_perm = std::max(worst_perm, std::abs(rev_loss - loss));
    worst_perm = std::max(worst_perm, test::max_abs_diff(densify(rev_grads.grad_target_embed),
                                                         densify(grads.grad_target_embed)));
    worst_perm = std::max(worst_perm, test::max_abs_diff(densify(rev_grads.grad_input_embed),
                                                         densify(grads.grad_input_embed)));
  }
  std::ostringstream ss;
  ss << "100 instances: shift err " << worst_shift << ", perm err " << worst_perm
     << ", min loss " << worst_loss << ", norm err " << worst_norm;
  detail = ss.str();
  return worst_shift <= 1e-10 && worst_perm <= 1e-12 && worst_loss >= 0.0 && worst_norm <= 1e-9;
}

// Table 1 geometry: sampled forward+backward at least 10x faster than full,
// fused backward path at least 1.2x faster than the recompute baseline.
bool benchmark_table1(std::string& detail) {
  BenchConfig cfg;  // defaults are the Table 1 values, iters=20, f32
  const auto records = run_bench(cfg);
  auto mean_of = [&](const char* kernel, const char* pass) -> double {
    for (const auto& r : records) {
      if (r.kernel == kernel && r.pass == pass) return static_cast<double>(r.mean_ns);
    }
    return -1.0;
  };
  const double full_fb = mean_of("full", "forward_backward");
  const double sampled_fb = mean_of("sampled", "forward_backward");
  const double naive_fb = mean_of("sampled_naive_bwd", "forward_backward");
  const double full_vs_sampled = full_fb / sampled_fb;
  const double naive_vs_fused = naive_fb / sampled_fb;
  std::ostringstream ss;
  ss << "full/sampled fwd+bwd " << full_vs_sampled << "x (need >= 10), naive/fused "
     << naive_vs_fused << "x (need >= 1.2)";
  detail = ss.str();
  return full_vs_sampled >= 10.0 && naive_vs_fused >= 1.2;
}

// Toy SkipGram config: mean loss over the last 100 steps at least 20% below
// the first 100, all losses finite, loss log bitwise identical across two
// same-seed runs.
bool end_to_end_training(std::string& detail) {
  const TrainConfig cfg;  // documented toy config: 2000/32/128/32, lr .05, 1000 steps, seed 7
  const auto log = train_skipgram(cfg);
  const auto rerun = train_skipgram(cfg);

  bool finite = true;
  for (const auto& entry : log) finite = finite && std::isfinite(entry.loss);

  bool identical = log.size() == rerun.size();
  for (std::size_t i = 0; identical && i < log.size(); ++i) {
    identical = log[i].step == rerun[i].step && log[i].loss == rerun[i].loss;
  }

  double head = 0, tail = 0;
  for (int i = 0; i < 100; ++i) head += log[static_cast<std::size_t>(i)].loss;
  for (int i = cfg.steps - 100; i < cfg.steps; ++i) tail += log[static_cast<std::size_t>(i)].loss;
  head /= 100.0;
  tail /= 100.0;
  const double reduction = (head - tail) / head;

  std::ostringstream ss;
  ss << "first-100 mean " << head << ", last-100 mean " << tail << ", reduction "
     << 100.0 * reduction << "% (need >= 20%), finite=" << finite
     << ", bitwise-identical rerun=" << identical;
  detail = ss.str();
  return reduction >= 0.20 && finite && identical;
}

// Log-uniform probabilities sum to one; 1e5-draw empirical frequencies pass
// chi-square at significance 0.001 for n=16 uniform and log-uniform.
bool sampler_statistics(std::string& detail) {
  const Index n = 16;
  double sum_err = 0;
  for (Index classes : {16, 1000, 100000}) {
    const CandidateDist dist(DistKind::kLogUniform, classes);
    double sum = 0;
    for (Index c = 0; c < classes; ++c) sum += dist.prob(c);
    sum_err = std::max(sum_err, std::abs(sum - 1.0));
  }

  double worst_stat = 0;
  const Index draws = 100000;
  for (DistKind kind : {DistKind::kUniform, DistKind::kLogUniform}) {
    const CandidateDist dist(kind, n);
    const auto cand = draw_candidates<double>(dist, draws, {}, 424242);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n), 0);
    for (Index id : cand.sample_ids) ++counts[static_cast<std::size_t>(id)];
    std::vector<double> probs(static_cast<std::size_t>(n));
    for (Index c = 0; c < n; ++c) probs[static_cast<std::size_t>(c)] = dist.prob(c);
    worst_stat = std::max(worst_stat, test::chi_square(counts, probs, draws));
  }

  std::ostringstream ss;
  ss << "prob sum err " << sum_err << " (need <= 1e-9), worst chi-square " << worst_stat
     << " (crit " << test::kChi2Crit15Df001 << ", df 15, a=0.001)";
  detail = ss.str();
  return sum_err <= 1e-9 && worst_stat < test::kChi2Crit15Df001;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"gradient-oracle-suite", gradient_oracle_suite},
      {"oracle-equivalence", oracle_equivalence},
      {"worked-micro-example", worked_micro_example},
      {"invariance-suite", invariance_suite},
      {"benchmark-table1", benchmark_table1},
      {"end-to-end-training", end_to_end_training},
      {"sampler-statistics", sampler_statistics},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (argc > 1) {
      bool selected = false;
      for (int i = 1; i < argc; ++i) selected = selected || criterion.name == argv[i];
      if (!selected) continue;
    }
    std::string detail;
    bool ok = false;
    const auto start = std::chrono::steady_clock::now();
    try {
      ok = criterion.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] %-22s (%.1fs) %s\n", ok ? "PASS" : "FAIL", criterion.name.c_str(), seconds,
                detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
  return failures;
}
