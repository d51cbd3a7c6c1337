#include "ssx/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ssx {

namespace {

constexpr char kMagic[4] = {'S', 'S', 'M', 'E'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

template <class T>
void write_values(std::ostream& out, const std::vector<T>& values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(T)));
  } else {
    for (T v : values) {
      unsigned char b[sizeof(T)];
      std::memcpy(b, &v, sizeof(T));
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
      out.write(reinterpret_cast<const char*>(b), sizeof(T));
    }
  }
}

template <class T>
void read_values(std::istream& in, std::vector<T>& values) {
  if constexpr (std::endian::native == std::endian::little) {
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(values.size() * sizeof(T)));
  } else {
    for (T& v : values) {
      unsigned char b[sizeof(T)];
      in.read(reinterpret_cast<char*>(b), sizeof(T));
      for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
      std::memcpy(&v, b, sizeof(T));
    }
  }
}

}  // namespace

template <class T>
void save_table(const EmbedTable<T>& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("save_table: cannot open " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u64(out, static_cast<std::uint64_t>(table.n_classes()));
  put_u64(out, static_cast<std::uint64_t>(table.n_embed()));
  const unsigned char dtype = sizeof(T);
  out.write(reinterpret_cast<const char*>(&dtype), 1);
  write_values(out, table.weights.data());
  if (!out) throw IoError("save_table: write failed on " + path.string());
}

template <class T>
EmbedTable<T> load_table(const std::filesystem::path& path, TableRole role) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_table: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("load_table: bad magic in " + path.string());
  }
  const std::uint32_t version = get_u32(in);
  if (version != kVersion) {
    throw IoError("load_table: unsupported version " + std::to_string(version) + " in " +
                  path.string());
  }
  const auto rows = static_cast<Index>(get_u64(in));
  const auto cols = static_cast<Index>(get_u64(in));
  unsigned char dtype = 0;
  in.read(reinterpret_cast<char*>(&dtype), 1);
  if (!in) throw IoError("load_table: truncated header in " + path.string());
  if (dtype != sizeof(T)) {
    throw IoError("load_table: dtype code " + std::to_string(dtype) + " in " + path.string() +
                  " does not match requested " + std::to_string(sizeof(T)) + "-byte element");
  }
  EmbedTable<T> table{Matrix<T>(rows, cols), role};
  read_values(in, table.weights.data());
  if (!in) throw IoError("load_table: truncated payload in " + path.string());
  return table;
}

template void save_table<float>(const EmbedTable<float>&, const std::filesystem::path&);
template void save_table<double>(const EmbedTable<double>&, const std::filesystem::path&);
template EmbedTable<float> load_table<float>(const std::filesystem::path&, TableRole);
template EmbedTable<double> load_table<double>(const std::filesystem::path&, TableRole);

}  // namespace ssx
