#pragma once

// Brute-force reference constructions. Every suffix of every read is
// materialized and sorted explicitly, so these are only meant for small
// collections (up to roughly 1e5 bases) and serve as ground truth in tests.

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "seqbwt/core.hpp"

namespace seqbwt::oracle {

struct SuffixRecord {
  std::size_t read_index = 0;    // 1-based end-marker rank
  std::size_t suffix_start = 0;  // offset into the read; == length for the empty suffix
  std::string_view key;          // suffix text without the end marker
  char preceding = 0;            // '$' for the full-read suffix
};

/// Suffix order: key lexicographic (a proper prefix sorts first), then read index.
bool suffix_less(const SuffixRecord& a, const SuffixRecord& b) noexcept;

/// All suffixes of the collection in BWT order. The records view into `collection`.
std::vector<SuffixRecord> sorted_suffixes(const ReadCollection& collection);

std::pair<BwtString, SapArray> bwt_sap(const ReadCollection& collection);

/// BWT and SAP restricted to suffixes of length <= max_length, which is what
/// the staged construction holds after that many stages.
std::pair<BwtString, SapArray> partial_bwt_sap(const ReadCollection& collection,
                                               std::size_t max_length);

/// 1-based read order after a stable sort on reversed read text.
std::vector<std::size_t> rlo_permutation(const ReadCollection& collection);

}  // namespace seqbwt::oracle
