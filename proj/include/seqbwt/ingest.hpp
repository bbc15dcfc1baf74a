#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "seqbwt/core.hpp"

namespace seqbwt::ingest {

inline constexpr int kMaxPhred = 93;
inline constexpr int kPhredOffset = 33;
inline constexpr int kDefaultTrimThreshold = 15;

struct QualityRead {
  std::string name;
  std::string bases;
  std::vector<std::uint8_t> quals;  // Phred scores, same length as bases

  friend bool operator==(const QualityRead&, const QualityRead&) = default;
};

/// A parsed FASTA or FASTQ record. FASTA records have no qualities.
struct Record {
  std::string name;
  std::string bases;
  std::vector<std::uint8_t> quals;
  bool has_quals = false;
};

/// Streaming single-pass FASTA/FASTQ reader. The format is taken from the
/// first non-blank byte. Bases are upcased; anything other than A,C,G,N,T
/// (after upcasing) is a DataError carrying the line number. FASTA sequences
/// may span lines; FASTQ records are four lines each.
class FastxReader {
 public:
  explicit FastxReader(std::istream& in);

  bool next(Record& record);
  bool is_fastq() const noexcept { return fastq_; }
  std::size_t line() const noexcept { return line_; }

 private:
  bool next_line(std::string& out);
  bool next_fasta(Record& record);
  bool next_fastq(Record& record);

  std::istream& in_;
  bool fastq_ = false;
  std::size_t line_ = 0;
  std::string pending_;
  bool has_pending_ = false;
};

ReadCollection parse_fasta(std::istream& in);
std::vector<QualityRead> parse_fastq(std::istream& in);

void write_fastq(std::ostream& out, std::span<const QualityRead> reads);
void write_fasta(std::ostream& out, std::span<const QualityRead> reads);

/// Length of the prefix kept by bwa-style trimming: the p in [0, L] that
/// maximizes sum_{i>p} (threshold - q_i), largest p on ties; untrimmed unless
/// that maximum is positive.
std::size_t bwa_trim_point(std::span<const std::uint8_t> quals, int threshold);
QualityRead trim_bwa(const QualityRead& read, int threshold = kDefaultTrimThreshold);

// --- simulation --------------------------------------------------------------

struct SimulationSpec {
  std::string reference;
  double coverage = 0.0;
  std::size_t read_length = 0;
  double error_rate = 0.0;  // substitution probability per base
  std::uint64_t seed = 0;

  /// Optional low-quality tail: the last tail_length bases of every read use
  /// tail_error_rate and carry tail_quality unless substituted.
  std::size_t tail_length = 0;
  double tail_error_rate = 0.0;

  std::uint8_t high_quality = 40;
  std::uint8_t tail_quality = 10;
  std::uint8_t error_quality = 2;
};

/// Throws DataError when a SimulationSpec invariant does not hold.
void validate(const SimulationSpec& spec);

/// ceil(coverage * |reference| / read_length).
std::size_t simulated_read_count(const SimulationSpec& spec);

/// Read `index` of the simulation. Its generator is seeded from (seed, index)
/// alone, so reads can be produced in any order or in parallel.
QualityRead simulate_read(const SimulationSpec& spec, std::size_t index);
std::vector<QualityRead> simulate_reads(const SimulationSpec& spec);

/// Concatenated bases of every record in a FASTA file.
std::string load_reference(const std::filesystem::path& fasta);

/// Uniform random A/C/G/T sequence.
std::string random_reference(std::size_t length, std::uint64_t seed);

/// Generator helpers, exposed for tests.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace seqbwt::ingest
