#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ssx/matrix.hpp"

namespace ssx {

enum class Dtype { kF32, kF64 };

enum class Kernel { kFull, kSampled, kSampledNaiveBwd };

std::string_view to_string(Dtype dtype);
std::string_view to_string(Kernel kernel);
std::optional<Dtype> parse_dtype(std::string_view name);
std::optional<Kernel> parse_kernel(std::string_view name);

struct BenchConfig {
  Index n_classes = 100000;
  Index n_sampled = 100;
  Index n_embed = 300;
  Index n_batch = 256;
  int iters = 20;
  int warmup = 3;
  std::uint64_t seed = 1;
  Dtype dtype = Dtype::kF32;
  std::vector<Kernel> kernels = {Kernel::kFull, Kernel::kSampled, Kernel::kSampledNaiveBwd};
};

struct BenchRecord {
  std::string kernel;
  std::string pass;  // "forward" | "forward_backward"
  Index n_classes = 0;
  Index n_sampled = 0;
  Index n_embed = 0;
  Index n_batch = 0;
  std::string dtype;
  int iters = 0;
  std::int64_t mean_ns = 0;
  std::int64_t p50_ns = 0;
  std::int64_t p95_ns = 0;
  std::int64_t min_ns = 0;
  // Loss observed during the timed runs; identical across iterations for a
  // fixed seed. Not part of the serialized record.
  double loss = 0.0;
};

// Generates seeded random tables, batch and candidates, then times each
// requested kernel for the forward and forward+backward passes: `warmup`
// untimed runs followed by `iters` timed runs on a monotonic clock. Data
// generation is excluded from the timings.
std::vector<BenchRecord> run_bench(const BenchConfig& cfg);

}  // namespace ssx
