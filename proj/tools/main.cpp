// ssx: benchmark, gradient-check and train the sampled softmax kernels.
//
// Exit codes: 0 success / checks passed, 1 check failure, 2 usage error,
// 3 runtime error.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssx/bench.hpp"
#include "ssx/gradcheck.hpp"
#include "ssx/report.hpp"
#include "ssx/train.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct BenchArgs {
  ssx::BenchConfig cfg;
  std::string dtype = "f32";
  std::vector<std::string> kernels = {"full", "sampled", "sampled_naive_bwd"};
  std::string out_path;
  std::string svg_path;
};

int run_bench_cli(BenchArgs& args) {
  const auto dtype = ssx::parse_dtype(args.dtype);
  if (!dtype) {
    std::fprintf(stderr, "unknown dtype '%s' (expected f32 or f64)\n", args.dtype.c_str());
    return kExitUsage;
  }
  args.cfg.dtype = *dtype;
  args.cfg.kernels.clear();
  for (const auto& name : args.kernels) {
    const auto kernel = ssx::parse_kernel(name);
    if (!kernel) {
      std::fprintf(stderr,
                   "unknown kernel '%s' (expected full, sampled or sampled_naive_bwd)\n",
                   name.c_str());
      return kExitUsage;
    }
    args.cfg.kernels.push_back(*kernel);
  }

  const auto records = ssx::run_bench(args.cfg);
  for (const auto& r : records) {
    std::printf("%-18s %-17s mean=%11lld ns  p50=%11lld ns  p95=%11lld ns  min=%11lld ns  loss=%.6f\n",
                r.kernel.c_str(), r.pass.c_str(), static_cast<long long>(r.mean_ns),
                static_cast<long long>(r.p50_ns), static_cast<long long>(r.p95_ns),
                static_cast<long long>(r.min_ns), r.loss);
  }
  ssx::emit_jsonl(records, args.out_path);
  std::printf("wrote %zu records to %s\n", records.size(), args.out_path.c_str());
  if (!args.svg_path.empty()) {
    ssx::emit_plot_svg(records, args.svg_path);
    std::printf("wrote chart to %s\n", args.svg_path.c_str());
  }
  return kExitPass;
}

struct GradcheckArgs {
  ssx::GradCheckConfig cfg;
  int trials = 5;
  std::uint64_t seed = 3;
  double rtol = 1e-5;
  double atol = 1e-8;
};

int run_gradcheck_cli(const GradcheckArgs& args) {
  bool all_pass = true;
  for (int t = 0; t < args.trials; ++t) {
    const std::uint64_t seed = args.seed + static_cast<std::uint64_t>(t);
    const auto report = ssx::check_sampled(args.cfg, seed, args.rtol, args.atol);
    std::printf(
        "trial %d seed=%llu: checked %lld coords, max_rel_err=%.3e max_abs_err=%.3e "
        "worst=%s[%lld,%lld] %s\n",
        t, static_cast<unsigned long long>(seed), static_cast<long long>(report.n_checked),
        report.max_rel_err, report.max_abs_err,
        report.worst_table == ssx::TableTag::kInput ? "input" : "target",
        static_cast<long long>(report.worst_row), static_cast<long long>(report.worst_col),
        report.pass ? "PASS" : "FAIL");
    all_pass = all_pass && report.pass;
  }
  std::printf("gradcheck: %s\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? kExitPass : kExitCheckFailed;
}

struct TrainArgs {
  ssx::TrainConfig cfg;
  std::string log_path;
};

int run_train_cli(const TrainArgs& args) {
  const auto log = ssx::train_skipgram(args.cfg);
  for (const auto& entry : log) {
    if (entry.step % 50 == 0 || entry.step == args.cfg.steps - 1) {
      std::printf("step %6d  loss %.6f\n", entry.step, entry.loss);
    }
  }
  if (!args.log_path.empty()) {
    ssx::emit_train_log(log, args.log_path);
    std::printf("wrote %zu steps to %s\n", log.size(), args.log_path.c_str());
  }
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sampled softmax kernels: benchmark, gradient check, toy SkipGram trainer"};
  app.require_subcommand(1);

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "time the loss kernels and emit JSONL results");
  bench->add_option("--classes", bench_args.cfg.n_classes)->check(CLI::PositiveNumber);
  bench->add_option("--sampled", bench_args.cfg.n_sampled)->check(CLI::PositiveNumber);
  bench->add_option("--embed", bench_args.cfg.n_embed)->check(CLI::PositiveNumber);
  bench->add_option("--batch", bench_args.cfg.n_batch)->check(CLI::PositiveNumber);
  bench->add_option("--iters", bench_args.cfg.iters)->check(CLI::PositiveNumber);
  bench->add_option("--warmup", bench_args.cfg.warmup)->check(CLI::NonNegativeNumber);
  bench->add_option("--seed", bench_args.cfg.seed);
  bench->add_option("--dtype", bench_args.dtype, "f32 or f64");
  bench->add_option("--kernels", bench_args.kernels, "comma-separated kernel list")
      ->delimiter(',');
  bench->add_option("--out", bench_args.out_path, "JSONL output path")->required();
  bench->add_option("--svg", bench_args.svg_path, "optional SVG bar chart path");

  GradcheckArgs grad_args;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "finite-difference check of the sampled loss gradients");
  gradcheck->add_option("--classes", grad_args.cfg.n_classes)->check(CLI::PositiveNumber);
  gradcheck->add_option("--sampled", grad_args.cfg.n_sampled)->check(CLI::PositiveNumber);
  gradcheck->add_option("--embed", grad_args.cfg.n_embed)->check(CLI::PositiveNumber);
  gradcheck->add_option("--batch", grad_args.cfg.n_batch)->check(CLI::PositiveNumber);
  gradcheck->add_option("--trials", grad_args.trials)->check(CLI::PositiveNumber);
  gradcheck->add_option("--seed", grad_args.seed);
  gradcheck->add_option("--rtol", grad_args.rtol)->check(CLI::PositiveNumber);
  gradcheck->add_option("--atol", grad_args.atol)->check(CLI::PositiveNumber);

  TrainArgs train_args;
  auto* train = app.add_subcommand("train", "toy SkipGram training loop on a Zipf corpus");
  train->add_option("--classes", train_args.cfg.n_classes)->check(CLI::PositiveNumber);
  train->add_option("--embed", train_args.cfg.n_embed)->check(CLI::PositiveNumber);
  train->add_option("--batch", train_args.cfg.n_batch)->check(CLI::PositiveNumber);
  train->add_option("--sampled", train_args.cfg.n_sampled)->check(CLI::PositiveNumber);
  train->add_option("--steps", train_args.cfg.steps)->check(CLI::PositiveNumber);
  train->add_option("--lr", train_args.cfg.lr)->check(CLI::NonNegativeNumber);
  train->add_option("--seed", train_args.cfg.seed);
  train->add_option("--log", train_args.log_path, "JSONL per-step loss log path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (bench->parsed()) return run_bench_cli(bench_args);
    if (gradcheck->parsed()) return run_gradcheck_cli(grad_args);
    if (train->parsed()) return run_train_cli(train_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
