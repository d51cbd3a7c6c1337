#include "ssx/train.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "ssx/candidate_sampler.hpp"
#include "ssx/rng.hpp"
#include "ssx/sampled_loss.hpp"

namespace ssx {

namespace {

// Zipf(s=1) over class ids: P(k) proportional to 1/(k+1). Inverse-CDF draw
// via binary search over the cumulative weights.
class ZipfSampler {
 public:
  explicit ZipfSampler(Index n_classes) : cdf_(static_cast<std::size_t>(n_classes)) {
    double total = 0.0;
    for (Index k = 0; k < n_classes; ++k) {
      total += 1.0 / static_cast<double>(k + 1);
      cdf_[static_cast<std::size_t>(k)] = total;
    }
    for (auto& c : cdf_) c /= total;
  }

  Index draw(double u) const {
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    const auto k = static_cast<Index>(it - cdf_.begin());
    return k < static_cast<Index>(cdf_.size()) ? k : static_cast<Index>(cdf_.size()) - 1;
  }

 private:
  std::vector<double> cdf_;
};

constexpr Index kContextWindow = 2;

}  // namespace

std::vector<StepLoss> train_skipgram(const TrainConfig& cfg) {
  // Scale chosen so the initial candidate logits have roughly unit
  // variance; the table default of 0.5/n_embed starts the mean-reduced SGD
  // too close to zero to make visible progress in a 1000-step toy run.
  const double scale = std::sqrt(3.0 / std::sqrt(static_cast<double>(cfg.n_embed)));
  SplitMix64 seeds(cfg.seed);
  auto input_table =
      init_table<double>(cfg.n_classes, cfg.n_embed, TableRole::kInput, seeds.next(), scale);
  auto target_table =
      init_table<double>(cfg.n_classes, cfg.n_embed, TableRole::kTarget, seeds.next(), scale);
  return train_skipgram(cfg, input_table, target_table);
}

std::vector<StepLoss> train_skipgram(const TrainConfig& cfg, EmbedTable<double>& input_table,
                                     EmbedTable<double>& target_table) {
  if (cfg.steps < 1) throw ShapeError("train_skipgram: need steps >= 1");
  if (cfg.corpus_size < 1) throw ShapeError("train_skipgram: need corpus_size >= 1");
  if (!(cfg.lr >= 0) || !std::isfinite(cfg.lr)) {
    throw ShapeError("train_skipgram: lr must be finite and non-negative");
  }

  // Seed streams are derived from the config seed, offset so that the
  // corpus/batch/candidate draws stay decorrelated but reproducible.
  SplitMix64 seeds(cfg.seed + 0x5353582d54524e00ull);
  Xoshiro256PlusPlus corpus_rng(seeds.next());
  Xoshiro256PlusPlus batch_rng(seeds.next());
  SplitMix64 cand_seeds(seeds.next());

  // Synthetic corpus: Zipf-distributed centers, context = center shifted by
  // a small nonzero offset mod n.
  const ZipfSampler zipf(cfg.n_classes);
  std::vector<std::pair<Index, Index>> corpus;
  corpus.reserve(static_cast<std::size_t>(cfg.corpus_size));
  for (Index i = 0; i < cfg.corpus_size; ++i) {
    const Index center = zipf.draw(corpus_rng.next_double());
    const auto magnitude =
        static_cast<Index>(corpus_rng.next_below(static_cast<std::uint64_t>(kContextWindow))) + 1;
    const bool negative = (corpus_rng.next() & 1ull) != 0;
    const Index offset = negative ? -magnitude : magnitude;
    Index context = (center + offset) % cfg.n_classes;
    if (context < 0) context += cfg.n_classes;
    corpus.emplace_back(center, context);
  }

  const CandidateDist dist(DistKind::kLogUniform, cfg.n_classes);
  std::vector<StepLoss> log;
  log.reserve(static_cast<std::size_t>(cfg.steps));

  BatchIndices batch;
  batch.inputs.resize(static_cast<std::size_t>(cfg.n_batch));
  batch.labels.resize(static_cast<std::size_t>(cfg.n_batch));
  for (int step = 0; step < cfg.steps; ++step) {
    for (Index i = 0; i < cfg.n_batch; ++i) {
      const auto& pair =
          corpus[batch_rng.next_below(static_cast<std::uint64_t>(cfg.corpus_size))];
      batch.inputs[static_cast<std::size_t>(i)] = pair.first;
      batch.labels[static_cast<std::size_t>(i)] = pair.second;
    }
    const auto cand = draw_candidates<double>(dist, cfg.n_sampled, batch.labels,
                                              cand_seeds.next());
    auto [loss, grads] = loss_and_grads(input_table, target_table, batch, cand);
    if (!std::isfinite(loss)) {
      throw TrainingError(step, "training diverged: non-finite loss");
    }
    apply_sgd(input_table, grads.grad_input_embed, cfg.lr);
    apply_sgd(target_table, grads.grad_target_embed, cfg.lr);
    log.push_back({step, loss});
  }
  return log;
}

}  // namespace ssx
