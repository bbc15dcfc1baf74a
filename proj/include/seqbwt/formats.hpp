#pragma once

// On-disk formats.
//
//   .bwt  raw symbols, one byte each, no header and no trailing newline.
//   .sap  "SAP1" | bit count (u64 little-endian) | bits packed 8 per byte,
//         least-significant bit first, final byte zero-padded.
//
// The sequential readers and writers below are the only way the construction
// engine touches segment files, so their counters describe its access pattern.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "seqbwt/core.hpp"

namespace seqbwt {

inline constexpr char kSapMagic[4] = {'S', 'A', 'P', '1'};
inline constexpr std::size_t kSapHeaderSize = 12;
inline constexpr std::size_t kDefaultIoBuffer = std::size_t{1} << 20;

struct AccessCounters {
  std::uint64_t files_opened = 0;
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  std::uint64_t bits_read = 0;
  std::uint64_t bits_written = 0;
  /// Streams closed before they were consumed to the end.
  std::uint64_t partial_scans = 0;

  AccessCounters& operator+=(const AccessCounters& other);
};

namespace detail {
struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;
FilePtr open_file(const std::filesystem::path& path, const char* mode);
}  // namespace detail

class ByteReader {
 public:
  ByteReader(const std::filesystem::path& path, AccessCounters* counters = nullptr,
             std::size_t buffer_size = kDefaultIoBuffer);
  ByteReader(const ByteReader&) = delete;
  ByteReader& operator=(const ByteReader&) = delete;
  ~ByteReader();

  /// Returns false at end of file.
  bool next(char& c) {
    if (pos_ == end_ && !refill()) return false;
    c = buffer_[pos_++];
    ++consumed_;
    return true;
  }
  std::uint64_t consumed() const noexcept { return consumed_; }
  std::uint64_t size() const noexcept { return size_; }

 private:
  bool refill();

  std::filesystem::path path_;
  detail::FilePtr file_;
  AccessCounters* counters_;
  std::vector<char> buffer_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
  std::uint64_t consumed_ = 0;
  std::uint64_t size_ = 0;
};

class ByteWriter {
 public:
  ByteWriter(const std::filesystem::path& path, AccessCounters* counters = nullptr,
             std::size_t buffer_size = kDefaultIoBuffer);
  ByteWriter(const ByteWriter&) = delete;
  ByteWriter& operator=(const ByteWriter&) = delete;
  ~ByteWriter();

  void put(char c) {
    if (pos_ == capacity_) flush();
    buffer_[pos_++] = c;
  }
  void write(std::string_view bytes);
  /// Flushes and closes; throws IoError on failure. Idempotent.
  void close();
  std::uint64_t written() const noexcept { return written_ + pos_; }

 private:
  void flush();

  std::filesystem::path path_;
  detail::FilePtr file_;
  AccessCounters* counters_;
  std::size_t capacity_;
  std::unique_ptr<char[]> buffer_;  // left uninitialized
  std::size_t pos_ = 0;
  std::uint64_t written_ = 0;
};

class SapReader {
 public:
  SapReader(const std::filesystem::path& path, AccessCounters* counters = nullptr,
            std::size_t buffer_size = kDefaultIoBuffer);
  SapReader(const SapReader&) = delete;
  SapReader& operator=(const SapReader&) = delete;
  ~SapReader() {
    if (counters_) counters_->bits_read += read_;
  }

  bool next(bool& bit) {
    if (read_ == count_) return false;
    if ((read_ & 7) == 0) {
      char c;
      if (!bytes_.next(c)) throw_truncated();
      current_ = static_cast<unsigned char>(c);
    }
    bit = (current_ >> (read_ & 7)) & 1u;
    ++read_;
    return true;
  }
  std::uint64_t count() const noexcept { return count_; }
  std::uint64_t consumed() const noexcept { return read_; }

 private:
  [[noreturn]] void throw_truncated() const;

  std::filesystem::path path_;
  ByteReader bytes_;
  AccessCounters* counters_;
  std::uint64_t count_ = 0;
  std::uint64_t read_ = 0;
  unsigned current_ = 0;
};

class SapWriter {
 public:
  /// The bit count goes into the header up front; close() checks it was met.
  SapWriter(const std::filesystem::path& path, std::uint64_t count,
            AccessCounters* counters = nullptr, std::size_t buffer_size = kDefaultIoBuffer);

  void put(bool bit) {
    if (bit) current_ |= 1u << (written_ & 7);
    ++written_;
    if ((written_ & 7) == 0) {
      bytes_.put(static_cast<char>(current_));
      current_ = 0;
    }
  }
  void close();
  std::uint64_t written() const noexcept { return written_; }

 private:
  std::filesystem::path path_;
  ByteWriter bytes_;
  AccessCounters* counters_;
  std::uint64_t count_;
  std::uint64_t written_ = 0;
  unsigned current_ = 0;
  bool closed_ = false;
};

BwtString read_bwt_file(const std::filesystem::path& path);
void write_bwt_file(const std::filesystem::path& path, const BwtString& bwt);
SapArray read_sap_file(const std::filesystem::path& path);
void write_sap_file(const std::filesystem::path& path, const SapArray& sap);

/// In-memory encodings of the same formats (used for stdin/stdout streams).
std::string encode_sap(const SapArray& sap);
SapArray decode_sap(std::string_view bytes);

std::string read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::string_view bytes);

}  // namespace seqbwt
