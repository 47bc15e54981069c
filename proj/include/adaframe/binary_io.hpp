#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adaframe {

enum class FormatErrorCode { io, bad_magic, version_mismatch, truncated, dim_inconsistent };

std::string_view to_string(FormatErrorCode code);

class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrorCode code, const std::string& detail);
  FormatErrorCode code() const { return code_; }

 private:
  FormatErrorCode code_;
};

/// Little-endian encoder.
class ByteWriter {
 public:
  void bytes(std::string_view raw);
  void u32(std::uint32_t v);
  void f32(float v);
  void f64(double v);
  const std::vector<std::uint8_t>& buffer() const { return buffer_; }

 private:
  std::vector<std::uint8_t> buffer_;
};

/// Little-endian decoder; every read past the end raises `truncated`.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  void expect_magic(std::string_view magic);
  std::uint32_t u32();
  float f32();
  double f64();
  std::size_t remaining() const { return data_.size() - offset_; }
  /// Fails with `truncated` unless n more bytes are available.
  void require(std::size_t n, const char* what) const;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t offset_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace adaframe
