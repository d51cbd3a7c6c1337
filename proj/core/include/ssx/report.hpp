#pragma once

#include <filesystem>
#include <vector>

#include "ssx/bench.hpp"
#include "ssx/train.hpp"

namespace ssx {

// One JSON object per line, keys in fixed order: kernel, pass, n_classes,
// n_sampled, n_embed, n_batch, dtype, iters, mean_ns, p50_ns, p95_ns,
// min_ns. UTF-8, LF line endings.
void emit_jsonl(const std::vector<BenchRecord>& records, const std::filesystem::path& path);

// Standalone SVG bar chart of mean_ns, bars ordered by (pass, kernel).
// Byte-deterministic for a fixed record list.
void emit_plot_svg(const std::vector<BenchRecord>& records, const std::filesystem::path& path);

// One {"step": k, "loss": v} object per line.
void emit_train_log(const std::vector<StepLoss>& log, const std::filesystem::path& path);

}  // namespace ssx
