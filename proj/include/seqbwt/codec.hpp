#pragma once

// Second-stage compression of BWT byte streams.
//
// Container layout (all integers little-endian):
//
//   "BTC1" | profile u8 | original_length u64 | table_entry_count u16 |
//   code lengths (u8 each) | payload (MSB-first, zero-padded) | crc32 u32
//
// The crc32 (zlib polynomial) covers every byte before it and is verified
// before anything is decoded.
//
// Token order of the code-length table:
//   raw-huff      token = symbol rank in $ACGNT               (6 entries max)
//   rle-huff      token = bucket * 6 + symbol rank            (390 entries max)
//   mtf-rle-huff  token = bucket * 6 + move-to-front index    (390 entries max)
// Run-length buckets: 1 -> 0, 2 -> 1, 3 -> 2, and a length in [2^k, 2^(k+1))
// for k >= 2 -> bucket k + 1, followed in the payload by its low k bits.
// Trailing zero-length entries are not stored.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace seqbwt::codec {

enum class Profile : std::uint8_t { RawHuff = 1, RleHuff = 2, MtfRleHuff = 3 };

inline constexpr Profile kProfiles[] = {Profile::RawHuff, Profile::RleHuff, Profile::MtfRleHuff};

/// "raw-huff", "rle-huff" or "mtf-rle-huff"; throws UsageError otherwise.
Profile parse_profile(std::string_view name);
std::string_view profile_name(Profile profile);

// --- run-length tokens -------------------------------------------------------

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t value);
/// Throws DataError on a truncated or overlong varint.
std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& pos);

/// One (symbol byte, varint length) pair per maximal run.
std::vector<std::uint8_t> rle_encode(std::string_view bytes);
std::string rle_decode(std::span<const std::uint8_t> tokens);
/// Number of runs in a token stream.
std::size_t rle_token_count(std::span<const std::uint8_t> tokens);

// --- move-to-front -----------------------------------------------------------

/// Indices into a list that starts as $ACGNT. Throws DataError on other bytes.
std::vector<std::uint8_t> mtf_encode(std::string_view bytes);
std::string mtf_decode(std::span<const std::uint8_t> indices);

// --- Huffman -----------------------------------------------------------------

inline constexpr unsigned kMaxCodeLength = 24;

/// Length-limited Huffman code lengths; zero for absent symbols. A single
/// present symbol gets length 1.
std::vector<std::uint8_t> huffman_code_lengths(std::span<const std::uint64_t> frequencies,
                                               unsigned max_length = kMaxCodeLength);

class BitWriter {
 public:
  /// Appends the low `count` bits of `value`, most significant first.
  void put(std::uint64_t value, unsigned count);
  /// Pads the final byte with zeros and returns the buffer.
  std::string finish();
  std::uint64_t bit_count() const noexcept { return bits_; }

 private:
  std::string bytes_;
  std::uint64_t acc_ = 0;
  unsigned pending_ = 0;
  std::uint64_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::string_view bytes) : bytes_(bytes) {}
  /// Throws DataError on payload underrun.
  unsigned bit();
  std::uint64_t bits(unsigned count);
  std::uint64_t remaining() const noexcept { return bytes_.size() * 8 - pos_; }
  /// True when only zero padding (< 8 bits) is left.
  bool at_padding() const noexcept;

 private:
  std::string_view bytes_;
  std::uint64_t pos_ = 0;
};

class HuffmanEncoder {
 public:
  explicit HuffmanEncoder(std::span<const std::uint8_t> lengths);
  void encode(std::uint32_t symbol, BitWriter& out) const;

 private:
  std::vector<std::uint8_t> lengths_;
  std::vector<std::uint32_t> codes_;
};

class HuffmanDecoder {
 public:
  /// Throws DataError for an over-subscribed, empty, or (except a single
  /// 1-bit code) incomplete table.
  explicit HuffmanDecoder(std::span<const std::uint8_t> lengths);
  std::uint32_t decode(BitReader& in) const;

 private:
  std::vector<std::uint32_t> count_;    // codes per length
  std::vector<std::uint32_t> symbols_;  // ordered by (length, symbol)
};

struct HuffmanBlock {
  std::vector<std::uint8_t> lengths;  // trailing zeros trimmed
  std::string payload;
  std::uint64_t payload_bits = 0;
};

/// Canonical Huffman coding of a nonempty token stream over [0, alphabet).
HuffmanBlock huffman_encode(std::span<const std::uint32_t> tokens, std::size_t alphabet);
std::vector<std::uint32_t> huffman_decode(const HuffmanBlock& block, std::size_t count);

// --- container ---------------------------------------------------------------

inline constexpr char kBlobMagic[4] = {'B', 'T', 'C', '1'};
inline constexpr std::size_t kBlobHeaderSize = 15;
inline constexpr std::size_t kBlobTrailerSize = 4;

/// Input must be nonempty and over $ACGNT; throws DataError otherwise.
std::string compress(std::string_view bytes, Profile profile);
/// Throws DataError on any malformed or corrupted blob.
std::string decompress(std::string_view blob);
Profile blob_profile(std::string_view blob);

std::uint32_t crc32(std::string_view bytes);

// --- metrics -----------------------------------------------------------------

/// Pipes `bytes` through `command` (run by /bin/sh) and returns the size of its
/// standard output. Throws IoError if the command cannot run or exits nonzero.
std::uint64_t external_compress(std::string_view bytes, const std::string& command);

struct Metrics {
  std::uint64_t input_bases = 0;
  std::uint64_t compressed_bits = 0;
  double bpb = 0.0;
};

/// Bits per original read base (end markers excluded). Throws DataError when
/// input_bases is zero.
Metrics bits_per_base(std::uint64_t input_bases, std::uint64_t compressed_bits);

}  // namespace seqbwt::codec
