#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "steinmetz/models.hpp"

namespace steinmetz {

struct Checkpoint {
  Model model;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
};

/// One file: a single-line JSON header (spec, seed, epoch, parameter names
/// and shapes) terminated by '\n', followed by the parameters as
/// little-endian f64 blobs in declared layer order.
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace steinmetz
