#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ssx/dense_kernels.hpp"
#include "ssx/matrix.hpp"
#include "ssx/rng.hpp"

namespace ssx {

enum class TableRole { kInput, kTarget };

// A class-embedding table: one row per class.
template <class T>
struct EmbedTable {
  Matrix<T> weights;  // (n_classes, n_embed)
  TableRole role = TableRole::kInput;

  Index n_classes() const { return weights.rows(); }
  Index n_embed() const { return weights.cols(); }
};

// Gradient as sparse row slices. Indices may duplicate; duplicates mean
// additive accumulation.
template <class T>
struct SparseGrad {
  IndexList indices;
  Matrix<T> rows;  // (indices.size(), dense_cols)
  Index dense_rows = 0;
  Index dense_cols = 0;

  void validate() const {
    if (rows.rows() != static_cast<Index>(indices.size()) || rows.cols() != dense_cols) {
      throw ShapeError("SparseGrad: rows is " + rows.shape_string() + " for " +
                       std::to_string(indices.size()) + " indices and dense shape " +
                       std::to_string(dense_rows) + "x" + std::to_string(dense_cols));
    }
    for (Index id : indices) {
      if (id < 0 || id >= dense_rows) throw IndexError("SparseGrad", id, dense_rows);
    }
  }
};

// Entries i.i.d. uniform on [-scale, scale] from a seeded xoshiro stream;
// the same seed reproduces the table bit-for-bit.
template <class T>
EmbedTable<T> init_table(Index n_classes, Index n_embed, TableRole role,
                         std::uint64_t seed, double scale) {
  if (n_classes < 1 || n_embed < 1) {
    throw ShapeError("init_table: need n_classes, n_embed >= 1, got " +
                     std::to_string(n_classes) + "x" + std::to_string(n_embed));
  }
  if (!(scale > 0)) {
    throw ShapeError("init_table: scale must be positive");
  }
  EmbedTable<T> table{Matrix<T>(n_classes, n_embed), role};
  Xoshiro256PlusPlus rng(seed);
  for (auto& w : table.weights.data()) {
    w = static_cast<T>(scale * (2.0 * rng.next_double() - 1.0));
  }
  return table;
}

// Default scale 0.5 / n_embed keeps initial logits near zero.
template <class T>
EmbedTable<T> init_table(Index n_classes, Index n_embed, TableRole role,
                         std::uint64_t seed) {
  return init_table<T>(n_classes, n_embed, role, seed, 0.5 / static_cast<double>(n_embed));
}

// Dense view of a sparse gradient; duplicate indices sum. Test oracle and
// gradcheck helper, not the update fast path.
template <class T>
Matrix<T> densify(const SparseGrad<T>& g) {
  g.validate();
  Matrix<T> out(g.dense_rows, g.dense_cols);
  for (Index j = 0; j < static_cast<Index>(g.indices.size()); ++j) {
    detail::axpy(T{1}, g.rows.row(j).data(),
                 out.row(g.indices[static_cast<std::size_t>(j)]).data(), g.dense_cols);
  }
  return out;
}

// table -= lr * densify(g), touching only the rows named in g.indices.
// Duplicates are accumulated first and applied once (the contract is the
// gradient sum, not sequential subtraction).
template <class T>
void apply_sgd(EmbedTable<T>& table, const SparseGrad<T>& g, T lr) {
  if (g.dense_rows != table.n_classes() || g.dense_cols != table.n_embed()) {
    throw ShapeError("apply_sgd: gradient dense shape " + std::to_string(g.dense_rows) +
                     "x" + std::to_string(g.dense_cols) + " does not match table " +
                     table.weights.shape_string());
  }
  g.validate();
  const Index d = table.n_embed();

  std::unordered_map<Index, Index> slot_of;
  slot_of.reserve(g.indices.size());
  IndexList unique_ids;
  std::vector<T> acc;
  for (Index j = 0; j < static_cast<Index>(g.indices.size()); ++j) {
    const Index id = g.indices[static_cast<std::size_t>(j)];
    auto [it, inserted] = slot_of.try_emplace(id, static_cast<Index>(unique_ids.size()));
    if (inserted) {
      unique_ids.push_back(id);
      acc.insert(acc.end(), static_cast<std::size_t>(d), T{0});
    }
    detail::axpy(T{1}, g.rows.row(j).data(), acc.data() + it->second * d, d);
  }
  for (Index s = 0; s < static_cast<Index>(unique_ids.size()); ++s) {
    detail::axpy(-lr, acc.data() + s * d,
                 table.weights.row(unique_ids[static_cast<std::size_t>(s)]).data(), d);
  }
}

}  // namespace ssx
