#include "adaframe/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace adaframe {

std::string_view to_string(FormatErrorCode code) {
  switch (code) {
    case FormatErrorCode::io: return "io";
    case FormatErrorCode::bad_magic: return "bad_magic";
    case FormatErrorCode::version_mismatch: return "version_mismatch";
    case FormatErrorCode::truncated: return "truncated";
    case FormatErrorCode::dim_inconsistent: return "dim_inconsistent";
  }
  return "unknown";
}

FormatError::FormatError(FormatErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

namespace {

template <typename UInt>
void put_le(std::vector<std::uint8_t>& out, UInt v) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
}

template <typename UInt>
UInt get_le(const std::uint8_t* p) {
  UInt v = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) v |= static_cast<UInt>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void ByteWriter::bytes(std::string_view raw) { buffer_.insert(buffer_.end(), raw.begin(), raw.end()); }
void ByteWriter::u32(std::uint32_t v) { put_le(buffer_, v); }
void ByteWriter::f32(float v) { put_le(buffer_, std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { put_le(buffer_, std::bit_cast<std::uint64_t>(v)); }

void ByteReader::require(std::size_t n, const char* what) const {
  if (remaining() < n) {
    throw FormatError(FormatErrorCode::truncated,
                      std::string("unexpected end of data reading ") + what);
  }
}

void ByteReader::expect_magic(std::string_view magic) {
  require(magic.size(), "magic");
  if (std::memcmp(data_.data() + offset_, magic.data(), magic.size()) != 0) {
    throw FormatError(FormatErrorCode::bad_magic, "expected \"" + std::string(magic) + "\"");
  }
  offset_ += magic.size();
}

std::uint32_t ByteReader::u32() {
  require(4, "u32");
  const auto v = get_le<std::uint32_t>(data_.data() + offset_);
  offset_ += 4;
  return v;
}

float ByteReader::f32() {
  require(4, "f32");
  const auto v = get_le<std::uint32_t>(data_.data() + offset_);
  offset_ += 4;
  return std::bit_cast<float>(v);
}

double ByteReader::f64() {
  require(8, "f64");
  const auto v = get_le<std::uint64_t>(data_.data() + offset_);
  offset_ += 8;
  return std::bit_cast<double>(v);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(FormatErrorCode::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatErrorCode::io, "cannot open " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw FormatError(FormatErrorCode::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError(FormatErrorCode::io, "rename to " + path.string() + ": " + ec.message());
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace adaframe
