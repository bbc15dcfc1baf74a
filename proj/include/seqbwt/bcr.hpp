#pragma once

// Staged external-memory construction of the collection BWT and its
// SAP-array.
//
// Stage j inserts, for every read still active, the symbol that precedes its
// j-suffix. Insertions arrive sorted by (segment, position), so each stage is
// one sequential merge pass per segment: old segment files are streamed in,
// new ones streamed out. Per-read state is a 16-byte cursor plus one byte of
// the current column; everything else lives in the working directory.
//
// Working directory layout:
//   col.<j>              byte per read: symbol preceding the read's j-suffix,
//                        '$' at j == length, 0 once the read has retired
//   seg.<h>.<p>.bwt/.sap segment h at parity p (stages alternate parities)
//   manifest             key=value lines describing the last completed stage

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqbwt/core.hpp"
#include "seqbwt/formats.hpp"

namespace seqbwt::bcr {

inline constexpr std::size_t kSegments = alphabet::kSize;

struct Options {
  /// Buffer size for every segment stream.
  std::size_t io_buffer = kDefaultIoBuffer;
  /// Bases held in memory while transposing reads into column files.
  std::size_t transpose_block = std::size_t{32} << 20;
  /// Segment merge scans run on up to this many threads.
  unsigned threads = 1;
  /// Keep working files after a successful build.
  bool keep_files = false;
};

/// One pending insertion. Sorted by (segment, position) within a stage.
struct Cursor {
  std::uint64_t position = 0;  // absolute offset in the target segment after insertion
  std::uint32_t read = 0;      // 0-based read index
  std::uint8_t segment = 0;    // target segment (symbol rank of the suffix's first symbol)
  std::uint8_t sap = 0;        // SAP bit to write with the inserted symbol
};
static_assert(sizeof(Cursor) == 16);

using SymbolCounts = std::array<std::uint64_t, alphabet::kSize>;

struct BuildStats {
  std::size_t reads = 0;
  std::size_t total_bases = 0;
  std::size_t stages = 0;  // number of merge passes, stage 0 included
  AccessCounters segment_io;
  AccessCounters column_io;
  /// Bytes the segment scans must read if every old segment file is streamed
  /// exactly once per stage.
  std::uint64_t expected_segment_bytes = 0;
  /// Stages whose observed segment reads differed from the expectation or
  /// left a stream partially consumed. Zero for a purely sequential build.
  std::uint64_t access_violations = 0;
  std::uint64_t peak_cursors = 0;

  /// Bytes of per-read RAM held by the engine at its peak (cursor arrays and
  /// the loaded column).
  std::uint64_t peak_state_bytes() const noexcept { return peak_cursors * 2 * sizeof(Cursor) + reads; }
};

/// Reads transposed into per-column files in the working directory.
class ColumnStore {
 public:
  ColumnStore(std::filesystem::path workdir, const Options& options, AccessCounters* counters);

  void add(std::string_view read);
  /// Flushes the pending block; must be called before load().
  void finish();

  std::size_t reads() const noexcept { return reads_; }
  std::size_t max_length() const noexcept { return max_length_; }
  std::size_t total_length() const noexcept { return total_length_; }

  std::vector<char> load(std::size_t column) const;
  std::filesystem::path path(std::size_t column) const;
  void remove_files() const;

 private:
  void flush_block();

  std::filesystem::path workdir_;
  std::size_t block_limit_;
  AccessCounters* counters_;
  std::string block_bases_;
  std::vector<std::size_t> block_ends_;
  std::size_t reads_ = 0;
  std::size_t max_length_ = 0;
  std::size_t total_length_ = 0;
  std::size_t columns_ = 0;  // column files created so far
  bool finished_ = false;
};

/// The sigma+1 disk-backed partial BWT segments with their SAP streams.
class PartialBwtSegments {
 public:
  PartialBwtSegments(std::filesystem::path workdir, std::size_t reads, const Options& options);

  /// Number of completed merge passes (stage 0 included).
  std::size_t completed() const noexcept { return completed_; }
  std::uint64_t length(std::size_t h) const noexcept { return lengths_[h]; }
  const SymbolCounts& counts(std::size_t h) const noexcept { return counts_[h]; }
  std::uint64_t total_length() const noexcept;

  std::filesystem::path bwt_path(std::size_t h, unsigned parity) const;
  std::filesystem::path sap_path(std::size_t h, unsigned parity) const;
  unsigned parity() const noexcept { return parity_; }

  /// Concatenation of the current segments (diagnostics and tests only).
  std::pair<BwtString, SapArray> load() const;
  void remove_files() const;

 private:
  friend std::vector<Cursor> advance_stage(PartialBwtSegments&, std::span<const Cursor>,
                                           std::span<const char>, BuildStats&);
  void write_manifest() const;

  std::filesystem::path workdir_;
  std::size_t reads_;
  Options options_;
  std::size_t completed_ = 0;
  unsigned parity_ = 0;
  std::array<std::uint64_t, kSegments> lengths_{};
  std::array<SymbolCounts, kSegments> counts_{};
};

/// Creates empty segments and the stage-0 cursors: every read inserts its last
/// base into segment 0 at its own index, SAP 0 for the first and 1 after.
std::vector<Cursor> stage0_cursors(std::size_t reads);

/// One merge pass. `cursors` must be sorted by (segment, position); `column`
/// holds, per read, the symbol to insert. Returns the next stage's cursors,
/// already sorted. Throws std::logic_error on a cursor-order breach.
std::vector<Cursor> advance_stage(PartialBwtSegments& segments, std::span<const Cursor> cursors,
                                  std::span<const char> column, BuildStats& stats);

/// Drives a full build inside one working directory.
class Builder {
 public:
  /// The directory is created if missing and must not contain files.
  Builder(std::filesystem::path workdir, Options options = {});
  ~Builder();

  /// Throws DataError for empty reads or bytes outside A,C,G,N,T.
  void add_read(std::string_view read);

  /// Transposes the reads and runs stage 0.
  void start();
  bool done() const noexcept { return started_ && cursors_.empty(); }
  /// Runs the next stage; returns its index.
  std::size_t advance();
  void run();

  std::size_t stage() const noexcept { return stage_; }
  const std::vector<Cursor>& cursors() const noexcept { return cursors_; }
  const PartialBwtSegments& segments() const { return *segments_; }
  const BuildStats& stats() const noexcept { return stats_; }

  std::pair<BwtString, SapArray> finalize();
  void finalize_to(const std::filesystem::path& bwt_out, const std::filesystem::path& sap_out);

 private:
  template <typename EmitSymbol, typename EmitBit>
  void concatenate(EmitSymbol&& symbol, EmitBit&& bit);
  void cleanup();

  std::filesystem::path workdir_;
  Options options_;
  BuildStats stats_;
  ColumnStore columns_;
  std::unique_ptr<PartialBwtSegments> segments_;
  std::vector<Cursor> cursors_;
  std::size_t stage_ = 0;
  bool started_ = false;
  bool finalized_ = false;
};

/// Builds the BWT and SAP-array of an in-memory collection. `workdir` must be
/// empty (or absent); working files are removed on success unless requested.
std::pair<BwtString, SapArray> build_bwt_sap(const ReadCollection& collection,
                                             const std::filesystem::path& workdir,
                                             const Options& options = {},
                                             BuildStats* stats = nullptr);

}  // namespace seqbwt::bcr
