#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string_view>
#include <vector>

#include "seqbwt/core.hpp"

namespace seqbwt::invert {

inline constexpr std::size_t kDefaultCheckpointStride = std::size_t{1} << 16;

/// Symbol counts with checkpoints every `stride` positions.
class OccTable {
 public:
  explicit OccTable(const BwtString& bwt, std::size_t stride = kDefaultCheckpointStride);

  std::size_t size() const noexcept { return bwt_.size(); }
  std::size_t stride() const noexcept { return stride_; }
  /// Number of symbols strictly smaller than the symbol of rank r.
  std::uint64_t smaller(std::size_t r) const noexcept { return smaller_[r]; }
  /// Occurrences of the symbol of rank r in bwt[0, i).
  std::uint64_t occ(std::size_t r, std::size_t i) const;
  std::uint64_t total(std::size_t r) const noexcept { return totals_[r]; }
  /// LF step from row i. Sentinels map to rows [0, m) in occurrence order.
  std::size_t lf(std::size_t i) const;

 private:
  std::string_view bwt_;
  std::size_t stride_;
  std::vector<std::array<std::uint64_t, alphabet::kSize>> checkpoints_;
  std::array<std::uint64_t, alphabet::kSize> totals_{};
  std::array<std::uint64_t, alphabet::kSize> smaller_{};
};

/// Single LF step; builds a temporary OccTable. Throws DataError for i >= n.
std::size_t lf_map(const BwtString& bwt, std::size_t i);

struct Options {
  std::size_t checkpoint_stride = kDefaultCheckpointStride;
};

/// Recovers the reads in end-marker order. All reads are walked in lockstep:
/// each step sorts the live rows and resolves them in one pass over the BWT.
/// Throws DataError when a walk exceeds n steps or the walks do not account
/// for every symbol (the input is not a collection BWT).
ReadCollection invert_bwt(const BwtString& bwt, const Options& options = {});

/// FASTA with headers ">read_<i>" (1-based), one sequence line per read.
void write_fasta(std::ostream& out, const ReadCollection& reads);

}  // namespace seqbwt::invert
