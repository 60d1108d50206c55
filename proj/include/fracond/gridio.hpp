#ifndef FRACOND_GRIDIO_HPP
#define FRACOND_GRIDIO_HPP

#include <filesystem>
#include <iosfwd>

#include "fracond/grid.hpp"

namespace fracond {

/// CSV columns: index, x, [y,] value. Header line included.
void write_csv(const GridFunction& u, const std::filesystem::path& path);
GridFunction read_csv(const std::filesystem::path& path, const GridSpec& expected);

/// Compact dump: magic "FCGF", then dim (i32), N (i32), L (f64), then
/// node_count raw little-endian f64 values in index order.
void write_binary(const GridFunction& u, const std::filesystem::path& path);
GridFunction read_binary(const std::filesystem::path& path);

/// FNV-1a over the raw value bytes; used to tag exported matrices.
std::uint64_t content_hash(const std::vector<double>& values);
std::uint64_t content_hash(const std::vector<long>& values);

}  // namespace fracond

#endif
