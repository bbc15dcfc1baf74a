#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seqbwt/core.hpp"

namespace seqbwt::reorder {

enum class Strategy {
  /// Symbols of each SAP-interval in alphabet order ($ first).
  SortAscending,
  /// All copies of the symbol that ended the previous output run first (when
  /// the interval has any), then the rest in alphabet order.
  RunExtension,
};

namespace detail {
[[noreturn]] void bad_symbol(std::uint64_t position);
[[noreturn]] void bad_first_bit();
}  // namespace detail

/// Streaming SAP-interval permutation. Feed (symbol, bit) pairs in BWT order;
/// each completed interval is emitted to the sink. Only per-symbol tallies of
/// the open interval are kept.
template <typename Sink>
class SapPermuter {
 public:
  SapPermuter(Strategy strategy, Sink sink) : strategy_(strategy), sink_(std::move(sink)) {}

  void push(char symbol, bool same_as_previous) {
    const int r = alphabet::rank(symbol);
    if (r < 0) detail::bad_symbol(position_);
    if (!same_as_previous) flush();
    else if (position_ == 0) detail::bad_first_bit();
    ++counts_[r];
    ++position_;
  }

  void finish() { flush(); }

 private:
  void flush() {
    if (strategy_ == Strategy::RunExtension && last_ >= 0 && counts_[last_] > 0) emit(last_);
    for (int r = 0; r < static_cast<int>(alphabet::kSize); ++r) emit(r);
  }

  void emit(int r) {
    if (counts_[r] == 0) return;
    const char c = alphabet::symbol(r);
    for (std::uint64_t i = 0; i < counts_[r]; ++i) sink_(c);
    counts_[r] = 0;
    last_ = r;
  }

  Strategy strategy_;
  Sink sink_;
  std::uint64_t counts_[alphabet::kSize] = {};
  std::uint64_t position_ = 0;
  int last_ = -1;
};

/// Rearranges symbols within SAP-intervals only. Throws DataError on a length
/// mismatch, a set first bit, or a byte outside the alphabet.
BwtString sap_permute(const BwtString& bwt, const SapArray& sap, Strategy strategy);

/// Same transform streamed between files (.bwt + .sap -> .bwt).
void sap_permute_files(const std::filesystem::path& bwt_in, const std::filesystem::path& sap_in,
                       const std::filesystem::path& bwt_out, Strategy strategy);

/// Reads reordered so their reverses are in lexicographic order (stable).
ReadCollection rlo_sort(const ReadCollection& collection);

/// 0-based stable RLO order of arbitrary read strings.
std::vector<std::size_t> rlo_order(const std::vector<std::string>& reads);

struct RunStats {
  std::uint64_t length = 0;
  std::uint64_t runs = 0;
  double mean_run_length = 0.0;

  // Filled only when a SAP-array was supplied.
  bool has_intervals = false;
  std::uint64_t intervals = 0;
  std::uint64_t mixed_intervals = 0;    // intervals with more than one distinct symbol
  std::uint64_t interval_runs_total = 0;
  std::uint64_t phi_total = 0;
  std::uint64_t bound_violations = 0;   // intervals whose run count exceeds phi
  std::vector<std::uint32_t> interval_runs;
  std::vector<std::uint8_t> interval_phi;
};

RunStats run_stats(const BwtString& bwt, const SapArray* sap = nullptr);

}  // namespace seqbwt::reorder
