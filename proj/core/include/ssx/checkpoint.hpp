#pragma once

#include <filesystem>

#include "ssx/embed_table.hpp"

namespace ssx {

// Flat little-endian table checkpoint:
//   magic "SSME" | u32 version=1 | u64 rows | u64 cols | u8 dtype (4=f32, 8=f64)
// followed by rows*cols row-major values. Round-trips bit-exactly.
template <class T>
void save_table(const EmbedTable<T>& table, const std::filesystem::path& path);

template <class T>
EmbedTable<T> load_table(const std::filesystem::path& path,
                         TableRole role = TableRole::kInput);

}  // namespace ssx
