#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace steinmetz::io {

/// Little-endian IEEE-754 binary64 encoding, independent of host byte order.
std::vector<unsigned char> encode_f64_le(std::span<const double> values);
std::vector<double> decode_f64_le(std::span<const unsigned char> bytes);

std::vector<unsigned char> encode_u32_le(std::span<const std::uint32_t> values);
std::vector<std::uint32_t> decode_u32_le(std::span<const unsigned char> bytes);

/// Whole-file helpers; failures raise DataError naming the path.
std::vector<unsigned char> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const unsigned char> bytes);

}  // namespace steinmetz::io
