#include "steinmetz/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "steinmetz/errors.hpp"

namespace steinmetz::io {

namespace {

template <typename Word>
void put_le(std::vector<unsigned char>& out, Word w) {
  for (std::size_t b = 0; b < sizeof(Word); ++b) out.push_back(static_cast<unsigned char>(w >> (8 * b)));
}

template <typename Word>
Word get_le(const unsigned char* p) {
  Word w = 0;
  for (std::size_t b = 0; b < sizeof(Word); ++b) w |= static_cast<Word>(p[b]) << (8 * b);
  return w;
}

}  // namespace

std::vector<unsigned char> encode_f64_le(std::span<const double> values) {
  std::vector<unsigned char> out;
  out.reserve(values.size() * 8);
  for (double v : values) put_le(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

std::vector<double> decode_f64_le(std::span<const unsigned char> bytes) {
  if (bytes.size() % 8 != 0) throw DataError("f64 blob length is not a multiple of 8 bytes");
  std::vector<double> out(bytes.size() / 8);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + 8 * i));
  return out;
}

std::vector<unsigned char> encode_u32_le(std::span<const std::uint32_t> values) {
  std::vector<unsigned char> out;
  out.reserve(values.size() * 4);
  for (auto v : values) put_le(out, v);
  return out;
}

std::vector<std::uint32_t> decode_u32_le(std::span<const unsigned char> bytes) {
  if (bytes.size() % 4 != 0) throw DataError("u32 blob length is not a multiple of 4 bytes");
  std::vector<std::uint32_t> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = get_le<std::uint32_t>(bytes.data() + 4 * i);
  return out;
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const unsigned char> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("short write to '" + path.string() + "'");
}

}  // namespace steinmetz::io
