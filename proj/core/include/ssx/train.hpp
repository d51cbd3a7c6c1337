#pragma once

#include <cstdint>
#include <vector>

#include "ssx/embed_table.hpp"

namespace ssx {

// Toy SkipGram trainer over a synthetic Zipf corpus: per step, draw a batch
// of (center, context) pairs, draw log-uniform candidates, take the sampled
// loss gradients and apply SGD to both tables.
struct TrainConfig {
  Index n_classes = 2000;
  Index n_embed = 32;
  Index n_batch = 128;
  Index n_sampled = 32;
  int steps = 1000;
  double lr = 0.05;
  std::uint64_t seed = 7;
  Index corpus_size = 65536;  // (center, context) pairs generated up front
};

struct StepLoss {
  int step;
  double loss;
};

// Returns one entry per step. Deterministic given the seed; throws
// TrainingError if the loss goes non-finite.
std::vector<StepLoss> train_skipgram(const TrainConfig& cfg);

// Same, but trains caller-provided tables in place.
std::vector<StepLoss> train_skipgram(const TrainConfig& cfg, EmbedTable<double>& input_table,
                                     EmbedTable<double>& target_table);

}  // namespace ssx
