#include "seqbwt/ingest.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include "seqbwt/error.hpp"

namespace seqbwt::ingest {

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace

FastxReader::FastxReader(std::istream& in) : in_(in) {
  std::string first;
  while (next_line(first)) {
    if (first.empty()) continue;
    if (first[0] == '@') fastq_ = true;
    else if (first[0] != '>') fail(line_, "expected '>' or '@' at the start of a record");
    pending_ = std::move(first);
    has_pending_ = true;
    break;
  }
}

bool FastxReader::next_line(std::string& out) {
  if (has_pending_) {
    out = std::move(pending_);
    has_pending_ = false;
    return true;
  }
  if (!std::getline(in_, out)) {
    if (in_.bad()) throw IoError("read error at line " + std::to_string(line_ + 1));
    return false;
  }
  ++line_;
  strip_cr(out);
  return true;
}

bool FastxReader::next(Record& record) { return fastq_ ? next_fastq(record) : next_fasta(record); }

bool FastxReader::next_fasta(Record& record) {
  std::string line;
  do {
    if (!next_line(line)) return false;
  } while (line.empty());
  if (line[0] != '>') fail(line_, "expected a '>' header");
  const std::size_t header_line = line_;
  record.name = line.substr(1);
  record.bases.clear();
  record.quals.clear();
  record.has_quals = false;
  while (next_line(line)) {
    if (!line.empty() && line[0] == '>') {
      pending_ = std::move(line);
      has_pending_ = true;
      break;
    }
    const std::size_t offset = record.bases.size();
    record.bases += line;
    if (auto bad = normalize_bases(record.bases); bad && *bad >= offset)
      fail(line_, "invalid base '" + std::string(1, record.bases[*bad]) + "'");
  }
  if (record.bases.empty()) fail(header_line, "record '" + record.name + "' has no sequence");
  return true;
}

bool FastxReader::next_fastq(Record& record) {
  std::string header;
  do {
    if (!next_line(header)) return false;
  } while (header.empty());
  if (header[0] != '@') fail(line_, "expected an '@' header");
  const std::size_t header_line = line_;
  record.name = header.substr(1);
  record.has_quals = true;

  std::string plus, quals;
  if (!next_line(record.bases)) fail(header_line, "truncated record (missing sequence)");
  if (auto bad = normalize_bases(record.bases))
    fail(line_, "invalid base '" + std::string(1, record.bases[*bad]) + "'");
  if (record.bases.empty()) fail(line_, "empty sequence");
  if (!next_line(plus) || plus.empty() || plus[0] != '+')
    fail(header_line, "truncated record (missing '+' line)");
  if (!next_line(quals)) fail(header_line, "truncated record (missing qualities)");
  if (quals.size() != record.bases.size())
    fail(line_, "quality length " + std::to_string(quals.size()) + " differs from sequence length " +
                    std::to_string(record.bases.size()));
  record.quals.resize(quals.size());
  for (std::size_t i = 0; i < quals.size(); ++i) {
    const int q = static_cast<unsigned char>(quals[i]) - kPhredOffset;
    if (q < 0 || q > kMaxPhred) fail(line_, "quality character out of range");
    record.quals[i] = static_cast<std::uint8_t>(q);
  }
  return true;
}

ReadCollection parse_fasta(std::istream& in) {
  FastxReader reader(in);
  if (reader.is_fastq()) throw DataError("line 1: expected FASTA, found FASTQ");
  std::vector<std::string> reads;
  Record rec;
  while (reader.next(rec)) reads.push_back(std::move(rec.bases));
  if (reads.empty()) throw DataError("no records in FASTA input");
  return ReadCollection(std::move(reads));
}

std::vector<QualityRead> parse_fastq(std::istream& in) {
  FastxReader reader(in);
  std::vector<QualityRead> reads;
  Record rec;
  if (!reader.is_fastq()) {
    if (reader.next(rec)) throw DataError("line 1: expected FASTQ, found FASTA");
    return reads;
  }
  while (reader.next(rec)) reads.push_back({std::move(rec.name), std::move(rec.bases), std::move(rec.quals)});
  return reads;
}

void write_fastq(std::ostream& out, std::span<const QualityRead> reads) {
  std::string quals;
  for (const auto& r : reads) {
    quals.resize(r.quals.size());
    for (std::size_t i = 0; i < r.quals.size(); ++i) quals[i] = static_cast<char>(r.quals[i] + kPhredOffset);
    out << '@' << r.name << '\n' << r.bases << "\n+\n" << quals << '\n';
  }
}

void write_fasta(std::ostream& out, std::span<const QualityRead> reads) {
  for (const auto& r : reads) out << '>' << r.name << '\n' << r.bases << '\n';
}

// ---------------------------------------------------------------------------

std::size_t bwa_trim_point(std::span<const std::uint8_t> quals, int threshold) {
  std::int64_t sum = 0;
  std::int64_t best = 0;
  std::size_t keep = quals.size();
  for (std::size_t p = quals.size(); p-- > 0;) {
    sum += threshold - static_cast<int>(quals[p]);
    if (sum > best) {
      best = sum;
      keep = p;
    }
  }
  return keep;
}

QualityRead trim_bwa(const QualityRead& read, int threshold) {
  const std::size_t keep = bwa_trim_point(read.quals, threshold);
  QualityRead out{read.name, read.bases.substr(0, keep),
                  std::vector<std::uint8_t>(read.quals.begin(), read.quals.begin() + static_cast<std::ptrdiff_t>(keep))};
  return out;
}

// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// Distribution helpers written out so results do not depend on the standard
// library's (implementation-defined) distributions.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x < threshold);
  return x % n;
}

double uniform_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

char substitute(std::mt19937_64& rng, char base) {
  static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
  char others[4];
  std::size_t k = 0;
  for (char b : kBases)
    if (b != base) others[k++] = b;
  return others[uniform_below(rng, k)];
}

}  // namespace

void validate(const SimulationSpec& spec) {
  if (spec.reference.empty()) throw DataError("simulation reference is empty");
  if (!(spec.coverage > 0.0) || !std::isfinite(spec.coverage)) throw DataError("coverage must be > 0");
  if (!(spec.error_rate >= 0.0 && spec.error_rate < 1.0)) throw DataError("error rate must be in [0, 1)");
  if (!(spec.tail_error_rate >= 0.0 && spec.tail_error_rate < 1.0))
    throw DataError("tail error rate must be in [0, 1)");
  if (spec.read_length == 0) throw DataError("read length must be positive");
  if (spec.read_length > spec.reference.size()) throw DataError("read length exceeds the reference length");
  if (spec.tail_length > spec.read_length) throw DataError("tail length exceeds the read length");
  for (std::size_t i = 0; i < spec.reference.size(); ++i)
    if (!alphabet::is_base(spec.reference[i]))
      throw DataError("reference has an invalid base at offset " + std::to_string(i));
  if (spec.high_quality > kMaxPhred || spec.tail_quality > kMaxPhred || spec.error_quality > kMaxPhred)
    throw DataError("quality values must be <= 93");
}

std::size_t simulated_read_count(const SimulationSpec& spec) {
  const double exact = spec.coverage * static_cast<double>(spec.reference.size()) /
                       static_cast<double>(spec.read_length);
  return static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

QualityRead simulate_read(const SimulationSpec& spec, std::size_t index) {
  std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64(index)));
  const std::size_t offsets = spec.reference.size() - spec.read_length + 1;
  const std::size_t start = uniform_below(rng, offsets);
  QualityRead read;
  read.name = "sim_" + std::to_string(index + 1);
  read.bases = spec.reference.substr(start, spec.read_length);
  read.quals.assign(spec.read_length, spec.high_quality);
  const std::size_t tail_start = spec.read_length - spec.tail_length;
  for (std::size_t i = 0; i < spec.read_length; ++i) {
    const bool tail = i >= tail_start;
    const double rate = tail ? spec.tail_error_rate : spec.error_rate;
    if (tail) read.quals[i] = spec.tail_quality;
    if (rate > 0.0 && uniform_unit(rng) < rate) {
      read.bases[i] = substitute(rng, read.bases[i]);
      read.quals[i] = spec.error_quality;
    }
  }
  return read;
}

std::vector<QualityRead> simulate_reads(const SimulationSpec& spec) {
  validate(spec);
  const std::size_t count = simulated_read_count(spec);
  std::vector<QualityRead> reads;
  reads.reserve(count);
  for (std::size_t i = 0; i < count; ++i) reads.push_back(simulate_read(spec, i));
  return reads;
}

std::string load_reference(const std::filesystem::path& fasta) {
  std::ifstream in(fasta, std::ios::binary);
  if (!in) throw IoError("cannot open reference " + fasta.string());
  FastxReader reader(in);
  if (reader.is_fastq()) throw DataError(fasta.string() + ": reference must be FASTA");
  std::string reference;
  Record rec;
  while (reader.next(rec)) reference += rec.bases;
  if (reference.empty()) throw DataError(fasta.string() + ": reference has no sequence");
  return reference;
}

std::string random_reference(std::size_t length, std::uint64_t seed) {
  static constexpr char kBases[] = {'A', 'C', 'G', 'T'};
  std::mt19937_64 rng(splitmix64(seed));
  std::string ref(length, 'A');
  for (auto& c : ref) c = kBases[uniform_below(rng, 4)];
  return ref;
}

}  // namespace seqbwt::ingest
