#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqbwt {

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

/// The fixed ordered alphabet $ < A < C < G < N < T. Rank 0 is the end marker.
namespace alphabet {

inline constexpr char kSentinel = '$';
inline constexpr std::size_t kSize = 6;   // including the sentinel
inline constexpr std::size_t kSigma = 5;  // symbols other than the sentinel
inline constexpr std::array<char, kSize> kSymbols = {'$', 'A', 'C', 'G', 'N', 'T'};

namespace detail {
constexpr std::array<std::int8_t, 256> make_rank_table() {
  std::array<std::int8_t, 256> table{};
  for (auto& r : table) r = -1;
  for (std::size_t i = 0; i < kSize; ++i)
    table[static_cast<unsigned char>(kSymbols[i])] = static_cast<std::int8_t>(i);
  return table;
}
inline constexpr auto kRankTable = make_rank_table();
}  // namespace detail

/// Rank of a symbol in the alphabet order, or -1 for bytes outside it.
constexpr int rank(char symbol) noexcept {
  return detail::kRankTable[static_cast<unsigned char>(symbol)];
}

constexpr char symbol(std::size_t rank) noexcept { return kSymbols[rank]; }

constexpr bool is_symbol(char c) noexcept { return rank(c) >= 0; }

/// True for the five read bases (everything except the sentinel).
constexpr bool is_base(char c) noexcept { return rank(c) > 0; }

}  // namespace alphabet

/// Upcases lowercase bases in place. Returns the offset of the first byte that
/// is not a base after upcasing, if any.
std::optional<std::size_t> normalize_bases(std::string& bases);

// ---------------------------------------------------------------------------
// Reads and collections
// ---------------------------------------------------------------------------

/// An ordered multiset of reads. The position of a read defines the rank of
/// its end marker, and equal suffixes of different reads order by that rank.
class ReadCollection {
 public:
  ReadCollection() = default;

  /// Throws DataError on an empty read or a byte outside A,C,G,N,T.
  explicit ReadCollection(std::vector<std::string> reads);

  std::size_t size() const noexcept { return reads_.size(); }
  bool empty() const noexcept { return reads_.empty(); }
  const std::string& operator[](std::size_t i) const { return reads_[i]; }
  const std::vector<std::string>& reads() const noexcept { return reads_; }
  std::size_t total_length() const noexcept { return total_length_; }
  std::size_t max_length() const noexcept { return max_length_; }

  auto begin() const noexcept { return reads_.begin(); }
  auto end() const noexcept { return reads_.end(); }

  friend bool operator==(const ReadCollection&, const ReadCollection&) = default;

 private:
  std::vector<std::string> reads_;
  std::size_t total_length_ = 0;
  std::size_t max_length_ = 0;
};

// ---------------------------------------------------------------------------
// BWT, SAP-array and runs
// ---------------------------------------------------------------------------

/// Collection BWT, one symbol per byte over $ACGNT.
struct BwtString {
  std::string bytes;

  std::size_t size() const noexcept { return bytes.size(); }
  std::size_t sentinel_count() const noexcept;
  friend bool operator==(const BwtString&, const BwtString&) = default;
};

/// Bit i is set iff the suffix associated with BWT position i equals the one
/// at position i-1, end markers excluded.
struct SapArray {
  std::vector<bool> bits;

  std::size_t size() const noexcept { return bits.size(); }
  /// Parses a string of '0'/'1' characters; other characters are skipped.
  static SapArray from_string(std::string_view digits);
  std::string to_string() const;
  friend bool operator==(const SapArray&, const SapArray&) = default;
};

struct Run {
  char symbol = 0;
  std::uint64_t length = 0;
  friend bool operator==(const Run&, const Run&) = default;
};

using RunList = std::vector<Run>;

/// Maximal-run decomposition of a byte sequence.
RunList runs(std::string_view bytes);

/// Number of maximal runs without materializing them.
std::size_t count_runs(std::string_view bytes) noexcept;

/// Half-open [start, end) range of BWT positions.
struct Interval {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t length() const noexcept { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Splits [0, n) into SAP-intervals. Throws DataError if bit 0 is set.
std::vector<Interval> sap_intervals(const SapArray& sap);

struct ValidationReport {
  bool ok = true;
  std::size_t offset = 0;  // first offending byte when !ok
  std::string message;
  explicit operator bool() const noexcept { return ok; }
};

/// Checks alphabet membership and that exactly m sentinels are present.
ValidationReport validate(const BwtString& bwt, std::size_t m);

}  // namespace seqbwt
