#include "seqbwt/bcr.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "seqbwt/error.hpp"

namespace seqbwt::bcr {

namespace fs = std::filesystem;

namespace {

std::uint64_t sap_file_size(std::uint64_t bits) { return kSapHeaderSize + (bits + 7) / 8; }

}  // namespace

// ---------------------------------------------------------------------------
// ColumnStore

ColumnStore::ColumnStore(fs::path workdir, const Options& options, AccessCounters* counters)
    : workdir_(std::move(workdir)),
      block_limit_(std::max<std::size_t>(options.transpose_block, 1)),
      counters_(counters) {}

fs::path ColumnStore::path(std::size_t column) const {
  return workdir_ / ("col." + std::to_string(column));
}

void ColumnStore::add(std::string_view read) {
  if (finished_) throw std::logic_error("ColumnStore::add after finish");
  if (read.empty()) throw DataError("read " + std::to_string(reads_ + 1) + " is empty");
  for (std::size_t i = 0; i < read.size(); ++i) {
    if (!alphabet::is_base(read[i]))
      throw DataError("read " + std::to_string(reads_ + 1) + ": invalid base at offset " +
                      std::to_string(i));
  }
  if (reads_ == UINT32_MAX) throw DataError("too many reads for one build");
  block_bases_.append(read);
  block_ends_.push_back(block_bases_.size());
  ++reads_;
  total_length_ += read.size();
  max_length_ = std::max(max_length_, read.size());
  if (block_bases_.size() >= block_limit_) flush_block();
}

// Appends the pending block to every column file. Column j of a read of
// length L holds read[L-1-j] for j < L, '$' for j == L and 0 beyond.
void ColumnStore::flush_block() {
  if (block_ends_.empty()) return;
  const std::size_t block_reads = block_ends_.size();
  const std::size_t reads_before = reads_ - block_reads;
  const std::size_t needed = max_length_ + 1;
  std::string buffer(block_reads, '\0');
  for (std::size_t j = 0; j < needed; ++j) {
    std::size_t begin = 0;
    for (std::size_t r = 0; r < block_reads; ++r) {
      const std::size_t end = block_ends_[r];
      const std::size_t len = end - begin;
      buffer[r] = j < len ? block_bases_[end - 1 - j] : (j == len ? alphabet::kSentinel : '\0');
      begin = end;
    }
    std::ofstream out(path(j), std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open " + path(j).string());
    if (j >= columns_ && reads_before > 0) {
      const std::string padding(reads_before, '\0');
      out.write(padding.data(), static_cast<std::streamsize>(padding.size()));
      if (counters_) counters_->bytes_written += padding.size();
    }
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (!out) throw IoError("write failed on " + path(j).string());
    if (counters_) {
      ++counters_->files_opened;
      counters_->bytes_written += buffer.size();
    }
  }
  columns_ = std::max(columns_, needed);
  block_bases_.clear();
  block_ends_.clear();
}

void ColumnStore::finish() {
  if (finished_) return;
  flush_block();
  finished_ = true;
}

std::vector<char> ColumnStore::load(std::size_t column) const {
  if (!finished_) throw std::logic_error("ColumnStore::load before finish");
  std::vector<char> out(reads_);
  if (column >= columns_) {
    std::fill(out.begin(), out.end(), '\0');
    return out;
  }
  ByteReader in(path(column), counters_);
  for (auto& c : out) {
    if (!in.next(c)) throw DataError("column file " + path(column).string() + " is truncated");
  }
  return out;
}

void ColumnStore::remove_files() const {
  std::error_code ec;
  for (std::size_t j = 0; j < columns_; ++j) fs::remove(path(j), ec);
}

// ---------------------------------------------------------------------------
// PartialBwtSegments

PartialBwtSegments::PartialBwtSegments(fs::path workdir, std::size_t reads, const Options& options)
    : workdir_(std::move(workdir)), reads_(reads), options_(options) {
  for (std::size_t h = 0; h < kSegments; ++h) {
    ByteWriter(bwt_path(h, parity_)).close();
    SapWriter sap(sap_path(h, parity_), 0);
    sap.close();
  }
  write_manifest();
}

std::uint64_t PartialBwtSegments::total_length() const noexcept {
  std::uint64_t n = 0;
  for (auto len : lengths_) n += len;
  return n;
}

fs::path PartialBwtSegments::bwt_path(std::size_t h, unsigned parity) const {
  return workdir_ / ("seg." + std::to_string(h) + "." + std::to_string(parity) + ".bwt");
}

fs::path PartialBwtSegments::sap_path(std::size_t h, unsigned parity) const {
  return workdir_ / ("seg." + std::to_string(h) + "." + std::to_string(parity) + ".sap");
}

void PartialBwtSegments::write_manifest() const {
  std::ofstream out(workdir_ / "manifest", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest in " + workdir_.string());
  out << "stage=" << (completed_ == 0 ? std::string("none") : std::to_string(completed_ - 1)) << '\n'
      << "m=" << reads_ << '\n'
      << "parity=" << parity_ << '\n';
  for (std::size_t h = 0; h < kSegments; ++h) out << "seg." << h << ".length=" << lengths_[h] << '\n';
  if (!out) throw IoError("cannot write manifest in " + workdir_.string());
}

std::pair<BwtString, SapArray> PartialBwtSegments::load() const {
  BwtString bwt;
  SapArray sap;
  for (std::size_t h = 0; h < kSegments; ++h) {
    bwt.bytes += read_file_bytes(bwt_path(h, parity_));
    const SapArray part = read_sap_file(sap_path(h, parity_));
    sap.bits.insert(sap.bits.end(), part.bits.begin(), part.bits.end());
  }
  return {std::move(bwt), std::move(sap)};
}

void PartialBwtSegments::remove_files() const {
  std::error_code ec;
  for (std::size_t h = 0; h < kSegments; ++h) {
    for (unsigned p = 0; p < 2; ++p) {
      fs::remove(bwt_path(h, p), ec);
      fs::remove(sap_path(h, p), ec);
    }
  }
  fs::remove(workdir_ / "manifest", ec);
}

// ---------------------------------------------------------------------------
// Stages

std::vector<Cursor> stage0_cursors(std::size_t reads) {
  std::vector<Cursor> cursors(reads);
  for (std::size_t t = 0; t < reads; ++t)
    cursors[t] = Cursor{t, static_cast<std::uint32_t>(t), 0, static_cast<std::uint8_t>(t > 0)};
  return cursors;
}

namespace {

struct SegmentPlan {
  std::size_t first = 0;  // cursor range [first, last)
  std::size_t last = 0;
  std::uint64_t new_length = 0;
  SymbolCounts before{};                          // symbol counts in all earlier segments
  std::array<std::size_t, alphabet::kSize> out{};  // next-cursor write offsets per symbol
};

// Merges one segment. last_interval[c] counts the SAP-interval starts seen up
// to the last occurrence of c in this segment, `intervals` those seen up to
// the current position (both restart at 0 per segment). The suffix c+x built
// from an inserted c equals its predecessor exactly when the previous c lies
// in x's SAP-interval, i.e. last_interval[c] == intervals.
void merge_segment(const PartialBwtSegments& segments, std::size_t h, const SegmentPlan& plan,
                   std::span<const Cursor> cursors, std::span<const char> column,
                   std::vector<Cursor>& next, AccessCounters& io, std::size_t io_buffer) {
  const unsigned parity = segments.parity();
  ByteReader old_bwt(segments.bwt_path(h, parity), &io, io_buffer);
  SapReader old_sap(segments.sap_path(h, parity), &io, io_buffer);
  ByteWriter new_bwt(segments.bwt_path(h, parity ^ 1u), &io, io_buffer);
  SapWriter new_sap(segments.sap_path(h, parity ^ 1u), plan.new_length, &io, io_buffer);

  SymbolCounts before = plan.before;
  std::array<std::size_t, alphabet::kSize> out = plan.out;
  std::array<std::uint64_t, alphabet::kSize> last_interval{};
  std::uint64_t intervals = 0;
  std::size_t ci = plan.first;

  for (std::uint64_t q = 0; q < plan.new_length; ++q) {
    char symbol;
    bool bit;
    const bool inserted = ci < plan.last && cursors[ci].position == q;
    if (inserted) {
      symbol = column[cursors[ci].read];
      bit = cursors[ci].sap != 0;
    } else if (!old_bwt.next(symbol) || !old_sap.next(bit)) {
      throw DataError("segment " + std::to_string(h) + " is shorter than recorded");
    }
    intervals += !bit;
    const int r = alphabet::rank(symbol);
    if (r < 0) throw DataError("segment " + std::to_string(h) + " holds a byte outside the alphabet");
    if (r > 0) {
      if (inserted) {
        next[out[r]++] = Cursor{before[r], cursors[ci].read, static_cast<std::uint8_t>(r),
                                static_cast<std::uint8_t>(last_interval[r] == intervals)};
      }
      last_interval[r] = intervals;
    }
    ++before[r];
    if (inserted) ++ci;
    new_bwt.put(symbol);
    new_sap.put(bit);
  }
  if (ci != plan.last)
    throw std::logic_error("cursor position beyond the end of segment " + std::to_string(h));
  char extra;
  if (old_bwt.next(extra)) throw DataError("segment " + std::to_string(h) + " is longer than recorded");
  bool extra_bit;
  if (old_sap.next(extra_bit))
    throw DataError("segment " + std::to_string(h) + " SAP stream is longer than recorded");
  new_bwt.close();
  new_sap.close();
}

}  // namespace

std::vector<Cursor> advance_stage(PartialBwtSegments& segments, std::span<const Cursor> cursors,
                                  std::span<const char> column, BuildStats& stats) {
  std::array<SegmentPlan, kSegments> plans{};
  std::array<SymbolCounts, kSegments> inserted{};

  // Order check and per-segment insertion tallies.
  std::size_t i = 0;
  for (std::size_t h = 0; h < kSegments; ++h) {
    plans[h].first = i;
    for (; i < cursors.size() && cursors[i].segment == h; ++i) {
      const Cursor& c = cursors[i];
      if (i > plans[h].first && c.position <= cursors[i - 1].position)
        throw std::logic_error("cursor ordering violation in segment " + std::to_string(h));
      if (c.read >= column.size()) throw std::logic_error("cursor refers to an unknown read");
      const int r = alphabet::rank(column[c.read]);
      if (r < 0) throw std::logic_error("active cursor for a retired read");
      ++inserted[h][r];
    }
    plans[h].last = i;
  }
  if (i != cursors.size()) throw std::logic_error("cursor ordering violation: segment out of order");

  std::array<SymbolCounts, kSegments> new_counts = segments.counts_;
  SymbolCounts running{};
  std::array<std::size_t, alphabet::kSize> bucket{};
  std::size_t next_total = 0;
  for (std::size_t r = 1; r < alphabet::kSize; ++r) {
    bucket[r] = next_total;
    for (std::size_t h = 0; h < kSegments; ++h) next_total += inserted[h][r];
  }
  for (std::size_t h = 0; h < kSegments; ++h) {
    plans[h].before = running;
    plans[h].new_length = segments.lengths_[h] + (plans[h].last - plans[h].first);
    for (std::size_t r = 0; r < alphabet::kSize; ++r) {
      new_counts[h][r] += inserted[h][r];
      running[r] += new_counts[h][r];
      plans[h].out[r] = bucket[r];
      bucket[r] += inserted[h][r];
    }
  }

  std::uint64_t expected = 0;
  for (std::size_t h = 0; h < kSegments; ++h)
    expected += segments.lengths_[h] + sap_file_size(segments.lengths_[h]);

  std::vector<Cursor> next(next_total);
  std::array<AccessCounters, kSegments> io{};
  const std::size_t buffer = segments.options_.io_buffer;
  const unsigned threads = std::clamp<unsigned>(segments.options_.threads, 1, kSegments);
  if (threads == 1) {
    for (std::size_t h = 0; h < kSegments; ++h)
      merge_segment(segments, h, plans[h], cursors, column, next, io[h], buffer);
  } else {
    std::array<std::exception_ptr, kSegments> errors{};
    for (std::size_t base = 0; base < kSegments; base += threads) {
      std::vector<std::jthread> workers;
      for (std::size_t h = base; h < std::min(base + threads, kSegments); ++h) {
        workers.emplace_back([&, h] {
          try {
            merge_segment(segments, h, plans[h], cursors, column, next, io[h], buffer);
          } catch (...) {
            errors[h] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  AccessCounters stage_io;
  for (const auto& c : io) stage_io += c;
  stats.segment_io += stage_io;
  stats.expected_segment_bytes += expected;
  if (stage_io.bytes_read != expected || stage_io.partial_scans != 0) ++stats.access_violations;
  stats.peak_cursors = std::max<std::uint64_t>(stats.peak_cursors, cursors.size());
  ++stats.stages;

  for (std::size_t h = 0; h < kSegments; ++h) segments.lengths_[h] = plans[h].new_length;
  segments.counts_ = new_counts;
  segments.parity_ ^= 1u;
  ++segments.completed_;
  segments.write_manifest();
  return next;
}

// ---------------------------------------------------------------------------
// Builder

namespace {

fs::path prepare_workdir(fs::path dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw IoError("cannot create working directory " + dir.string());
  if (!fs::is_empty(dir)) throw IoError("working directory " + dir.string() + " is not empty");
  return dir;
}

}  // namespace

Builder::Builder(fs::path workdir, Options options)
    : workdir_(prepare_workdir(std::move(workdir))),
      options_(options),
      columns_(workdir_, options_, &stats_.column_io) {}

Builder::~Builder() = default;

void Builder::add_read(std::string_view read) {
  if (started_) throw std::logic_error("Builder::add_read after start");
  columns_.add(read);
}

void Builder::start() {
  if (started_) return;
  columns_.finish();
  if (columns_.reads() == 0) throw DataError("empty read collection");
  stats_.reads = columns_.reads();
  stats_.total_bases = columns_.total_length();

  const std::uint64_t n = columns_.total_length() + columns_.reads();
  const std::uint64_t needed = 2 * (n + sap_file_size(n)) + 2 * kSegments * kSapHeaderSize;
  std::error_code ec;
  const auto space = fs::space(workdir_, ec);
  if (!ec && space.available < needed)
    throw IoError("insufficient disk space in " + workdir_.string() + ": need " +
                  std::to_string(needed) + " bytes, " + std::to_string(space.available) + " available");

  segments_ = std::make_unique<PartialBwtSegments>(workdir_, columns_.reads(), options_);
  started_ = true;
  const std::vector<Cursor> initial = stage0_cursors(columns_.reads());
  const std::vector<char> column = columns_.load(0);
  cursors_ = advance_stage(*segments_, initial, column, stats_);
  stage_ = 0;
}

std::size_t Builder::advance() {
  if (!started_) start();
  if (cursors_.empty()) return stage_;
  ++stage_;
  const std::vector<char> column = columns_.load(stage_);
  cursors_ = advance_stage(*segments_, cursors_, column, stats_);
  return stage_;
}

void Builder::run() {
  if (!started_) start();
  while (!cursors_.empty()) advance();
}

template <typename EmitSymbol, typename EmitBit>
void Builder::concatenate(EmitSymbol&& emit_symbol, EmitBit&& emit_bit) {
  run();
  const std::uint64_t expected = stats_.total_bases + stats_.reads;
  if (segments_->total_length() != expected)
    throw DataError("partial BWT holds " + std::to_string(segments_->total_length()) +
                    " symbols, expected " + std::to_string(expected));
  std::uint64_t sentinels = 0;
  AccessCounters io;
  std::uint64_t expected_bytes = 0;
  for (std::size_t h = 0; h < kSegments; ++h) {
    expected_bytes += segments_->length(h) + sap_file_size(segments_->length(h));
    ByteReader bwt(segments_->bwt_path(h, segments_->parity()), &io, options_.io_buffer);
    SapReader sap(segments_->sap_path(h, segments_->parity()), &io, options_.io_buffer);
    if (bwt.size() != segments_->length(h) || sap.count() != segments_->length(h))
      throw DataError("segment " + std::to_string(h) + " file length does not match the manifest");
    SymbolCounts seen{};
    char c;
    bool bit;
    while (bwt.next(c)) {
      if (!sap.next(bit)) throw DataError("segment " + std::to_string(h) + " SAP stream is short");
      const int r = alphabet::rank(c);
      if (r < 0) throw DataError("segment " + std::to_string(h) + " holds a byte outside the alphabet");
      ++seen[r];
      emit_symbol(c);
      emit_bit(bit);
    }
    if (seen != segments_->counts(h))
      throw DataError("segment " + std::to_string(h) + " symbol counts do not match the build");
    sentinels += seen[0];
  }
  stats_.segment_io += io;
  stats_.expected_segment_bytes += expected_bytes;
  if (io.bytes_read != expected_bytes || io.partial_scans != 0) ++stats_.access_violations;
  if (sentinels != stats_.reads)
    throw DataError("found " + std::to_string(sentinels) + " end markers for " +
                    std::to_string(stats_.reads) + " reads");
}

std::pair<BwtString, SapArray> Builder::finalize() {
  BwtString bwt;
  SapArray sap;
  bwt.bytes.reserve(stats_.total_bases + stats_.reads);
  concatenate([&](char c) { bwt.bytes.push_back(c); }, [&](bool b) { sap.bits.push_back(b); });
  cleanup();
  return {std::move(bwt), std::move(sap)};
}

void Builder::finalize_to(const fs::path& bwt_out, const fs::path& sap_out) {
  run();
  ByteWriter bwt(bwt_out, nullptr, options_.io_buffer);
  SapWriter sap(sap_out, stats_.total_bases + stats_.reads, nullptr, options_.io_buffer);
  concatenate([&](char c) { bwt.put(c); }, [&](bool b) { sap.put(b); });
  bwt.close();
  sap.close();
  cleanup();
}

void Builder::cleanup() {
  finalized_ = true;
  if (options_.keep_files) return;
  columns_.remove_files();
  if (segments_) segments_->remove_files();
}

std::pair<BwtString, SapArray> build_bwt_sap(const ReadCollection& collection, const fs::path& workdir,
                                             const Options& options, BuildStats* stats) {
  Builder builder(workdir, options);
  for (const auto& read : collection) builder.add_read(read);
  auto result = builder.finalize();
  if (stats) *stats = builder.stats();
  return result;
}

}  // namespace seqbwt::bcr
