#include "ssx/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <new>
#include <numeric>

#include "ssx/candidate_sampler.hpp"
#include "ssx/embed_table.hpp"
#include "ssx/full_softmax.hpp"
#include "ssx/rng.hpp"
#include "ssx/sampled_loss.hpp"

namespace ssx {

std::string_view to_string(Dtype dtype) { return dtype == Dtype::kF32 ? "f32" : "f64"; }

std::string_view to_string(Kernel kernel) {
  switch (kernel) {
    case Kernel::kFull:
      return "full";
    case Kernel::kSampled:
      return "sampled";
    case Kernel::kSampledNaiveBwd:
      return "sampled_naive_bwd";
  }
  return "?";
}

std::optional<Dtype> parse_dtype(std::string_view name) {
  if (name == "f32") return Dtype::kF32;
  if (name == "f64") return Dtype::kF64;
  return std::nullopt;
}

std::optional<Kernel> parse_kernel(std::string_view name) {
  if (name == "full") return Kernel::kFull;
  if (name == "sampled") return Kernel::kSampled;
  if (name == "sampled_naive_bwd") return Kernel::kSampledNaiveBwd;
  return std::nullopt;
}

namespace {

template <class T>
inline void do_not_optimize(const T& value) {
  asm volatile("" : : "r,m"(value) : "memory");
}

template <class T>
struct Workload {
  EmbedTable<T> input_table;
  EmbedTable<T> target_table;
  BatchIndices batch;
  CandidateSet<T> cand;
};

template <class T>
Workload<T> make_workload(const BenchConfig& cfg) {
  SplitMix64 seeds(cfg.seed);
  Workload<T> w;
  w.input_table =
      init_table<T>(cfg.n_classes, cfg.n_embed, TableRole::kInput, seeds.next());
  w.target_table =
      init_table<T>(cfg.n_classes, cfg.n_embed, TableRole::kTarget, seeds.next());
  Xoshiro256PlusPlus rng(seeds.next());
  const auto n = static_cast<std::uint64_t>(cfg.n_classes);
  for (Index i = 0; i < cfg.n_batch; ++i) {
    w.batch.inputs.push_back(static_cast<Index>(rng.next_below(n)));
    w.batch.labels.push_back(static_cast<Index>(rng.next_below(n)));
  }
  CandidateDist dist(DistKind::kLogUniform, cfg.n_classes);
  w.cand = draw_candidates<T>(dist, cfg.n_sampled, w.batch.labels, seeds.next());
  return w;
}

template <class T>
double run_once(const Workload<T>& w, Kernel kernel, bool with_backward) {
  switch (kernel) {
    case Kernel::kFull: {
      auto [loss, cache] = full_forward(w.input_table, w.target_table, w.batch);
      if (with_backward) {
        auto grads = full_backward(cache);
        do_not_optimize(grads.grad_target.data().back());
      } else {
        do_not_optimize(cache.log_norm.back());
      }
      return loss;
    }
    case Kernel::kSampled: {
      if (with_backward) {
        auto [loss, grads] = loss_and_grads(w.input_table, w.target_table, w.batch, w.cand);
        do_not_optimize(grads.grad_target_embed.rows.data().back());
        return loss;
      }
      auto [loss, cache] = forward(w.input_table, w.target_table, w.batch, w.cand);
      do_not_optimize(cache.log_norm.back());
      return loss;
    }
    case Kernel::kSampledNaiveBwd: {
      auto [loss, cache] = forward(w.input_table, w.target_table, w.batch, w.cand);
      do_not_optimize(cache.log_norm.back());
      if (with_backward) {
        // Deliberately ignores the cache: re-gathers and recomputes.
        auto grads = naive_backward(w.input_table, w.target_table, w.batch, w.cand);
        do_not_optimize(grads.grad_target_embed.rows.data().back());
      }
      return loss;
    }
  }
  return 0.0;
}

std::int64_t percentile(const std::vector<std::int64_t>& sorted, double q) {
  const auto n = static_cast<std::int64_t>(sorted.size());
  auto rank = static_cast<std::int64_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::int64_t>(rank, 1, n);
  return sorted[static_cast<std::size_t>(rank - 1)];
}

template <class T>
std::vector<BenchRecord> run_bench_typed(const BenchConfig& cfg) {
  const Workload<T> w = make_workload<T>(cfg);

  std::vector<BenchRecord> records;
  for (Kernel kernel : cfg.kernels) {
    for (bool with_backward : {false, true}) {
      for (int i = 0; i < cfg.warmup; ++i) {
        do_not_optimize(run_once(w, kernel, with_backward));
      }
      std::vector<std::int64_t> ns(static_cast<std::size_t>(cfg.iters));
      double loss = 0.0;
      for (int i = 0; i < cfg.iters; ++i) {
        const auto start = std::chrono::steady_clock::now();
        const double run_loss = run_once(w, kernel, with_backward);
        const auto stop = std::chrono::steady_clock::now();
        ns[static_cast<std::size_t>(i)] =
            std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
        if (i == 0) {
          loss = run_loss;
        } else if (run_loss != loss) {
          throw std::logic_error("run_bench: loss drifted across timed iterations");
        }
      }
      std::vector<std::int64_t> sorted = ns;
      std::sort(sorted.begin(), sorted.end());
      BenchRecord rec;
      rec.kernel = to_string(kernel);
      rec.pass = with_backward ? "forward_backward" : "forward";
      rec.n_classes = cfg.n_classes;
      rec.n_sampled = cfg.n_sampled;
      rec.n_embed = cfg.n_embed;
      rec.n_batch = cfg.n_batch;
      rec.dtype = to_string(cfg.dtype);
      rec.iters = cfg.iters;
      rec.mean_ns = std::accumulate(ns.begin(), ns.end(), std::int64_t{0}) /
                    static_cast<std::int64_t>(cfg.iters);
      rec.p50_ns = percentile(sorted, 0.50);
      rec.p95_ns = percentile(sorted, 0.95);
      rec.min_ns = sorted.front();
      rec.loss = loss;
      records.push_back(std::move(rec));
    }
  }
  return records;
}

}  // namespace

std::vector<BenchRecord> run_bench(const BenchConfig& cfg) {
  if (cfg.n_classes < 1 || cfg.n_sampled < 1 || cfg.n_embed < 1 || cfg.n_batch < 1) {
    throw ShapeError("run_bench: all geometry counts must be >= 1");
  }
  if (cfg.iters < 1 || cfg.warmup < 0) {
    throw ShapeError("run_bench: need iters >= 1 and warmup >= 0");
  }
  if (cfg.kernels.empty()) {
    throw ShapeError("run_bench: no kernels selected");
  }
  try {
    return cfg.dtype == Dtype::kF32 ? run_bench_typed<float>(cfg) : run_bench_typed<double>(cfg);
  } catch (const std::bad_alloc&) {
    throw ResourceError("run_bench: allocation failed at classes=" +
                        std::to_string(cfg.n_classes) + " embed=" + std::to_string(cfg.n_embed) +
                        " batch=" + std::to_string(cfg.n_batch) +
                        "; retry with a smaller configuration");
  }
}

}  // namespace ssx
