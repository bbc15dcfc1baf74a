#include "seqbwt/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>

#include <CLI11.hpp>

#include "seqbwt/bcr.hpp"
#include "seqbwt/codec.hpp"
#include "seqbwt/core.hpp"
#include "seqbwt/error.hpp"
#include "seqbwt/experiment.hpp"
#include "seqbwt/formats.hpp"
#include "seqbwt/ingest.hpp"
#include "seqbwt/invert.hpp"
#include "seqbwt/oracle.hpp"
#include "seqbwt/reorder.hpp"

namespace seqbwt::cli {

namespace {

namespace fs = std::filesystem;

// The oracle materializes every suffix; refuse inputs where that gets silly.
constexpr std::size_t kOracleLimit = 1'000'000;

struct Streams {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

bool is_stream(const std::string& path) { return path == "-"; }

/// Throws UsageError when two paths name the same file or two outputs are
/// both standard output.
void require_distinct(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
  std::vector<std::pair<fs::path, std::string>> files;
  bool stdout_used = false;
  auto add = [&](const std::string& p, bool output) {
    if (p.empty()) return;
    if (is_stream(p)) {
      if (output && stdout_used) throw UsageError("only one output may be '-'");
      if (output) stdout_used = true;
      return;
    }
    const fs::path canonical = fs::weakly_canonical(p);
    for (const auto& [other, name] : files)
      if (other == canonical) throw UsageError("paths must be distinct: '" + name + "' and '" + p + "'");
    files.emplace_back(canonical, p);
  };
  for (const auto& p : inputs) add(p, false);
  for (const auto& p : outputs) add(p, true);
}

class Input {
 public:
  Input(const std::string& path, std::istream& standard) {
    if (is_stream(path)) {
      stream_ = &standard;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError("cannot open " + path);
    stream_ = &file_;
  }
  std::istream& get() { return *stream_; }

  std::string read_all() {
    std::string bytes{std::istreambuf_iterator<char>(*stream_), std::istreambuf_iterator<char>()};
    if (stream_->bad()) throw IoError("read failed");
    return bytes;
  }

 private:
  std::ifstream file_;
  std::istream* stream_ = nullptr;
};

class Output {
 public:
  Output(std::string path, std::ostream& standard) : path_(std::move(path)) {
    if (is_stream(path_)) {
      stream_ = &standard;
      return;
    }
    file_.open(path_, std::ios::binary | std::ios::trunc);
    if (!file_) throw IoError("cannot create " + path_);
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void close() {
    stream_->flush();
    if (!*stream_) throw IoError("write failed: " + path_);
    if (file_.is_open()) {
      file_.close();
      if (!file_) throw IoError("write failed: " + path_);
    }
  }

 private:
  std::string path_;
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::string read_bytes(const std::string& path, std::istream& standard) {
  if (!is_stream(path)) return read_file_bytes(path);
  return Input(path, standard).read_all();
}

void write_bytes(const std::string& path, std::ostream& standard, std::string_view bytes) {
  if (!is_stream(path)) return write_file_bytes(path, bytes);
  Output out(path, standard);
  out.get().write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
}

std::vector<ingest::Record> read_records(const std::string& path, std::istream& standard, bool& fastq) {
  Input input(path, standard);
  ingest::FastxReader reader(input.get());
  std::vector<ingest::Record> records;
  ingest::Record rec;
  while (reader.next(rec)) records.push_back(rec);
  fastq = reader.is_fastq();
  return records;
}

ReadCollection read_collection(const std::string& path, std::istream& standard) {
  bool fastq = false;
  std::vector<std::string> reads;
  for (auto& r : read_records(path, standard, fastq)) reads.push_back(std::move(r.bases));
  if (reads.empty()) throw DataError("no reads in " + path);
  return ReadCollection(std::move(reads));
}

SapArray read_sap(const std::string& path, std::istream& standard) {
  if (!is_stream(path)) return read_sap_file(path);
  return decode_sap(Input(path, standard).read_all());
}

reorder::Strategy parse_strategy(const std::string& name) {
  if (name == "sap-sort") return reorder::Strategy::SortAscending;
  if (name == "sap-runext") return reorder::Strategy::RunExtension;
  if (name == "rlo")
    throw UsageError("strategy rlo reorders reads, not BWT symbols; run 'rlo' on the reads before 'bwt'");
  throw UsageError("unknown strategy '" + name + "' (expected none, sap-sort or sap-runext)");
}

// --- subcommands --------------------------------------------------------------

struct BwtArgs {
  std::string in, workdir, out, sap, stats_out;
  unsigned threads = 1;
  bool keep = false;
};

void cmd_bwt(const BwtArgs& a, Streams s) {
  require_distinct({a.in}, {a.out, a.sap, a.stats_out});
  bcr::Options options;
  options.threads = a.threads;
  options.keep_files = a.keep;
  bcr::Builder builder(a.workdir, options);
  {
    Input input(a.in, s.in);
    ingest::FastxReader reader(input.get());
    ingest::Record rec;
    while (reader.next(rec)) builder.add_read(rec.bases);
  }
  builder.run();
  if (!is_stream(a.out) && !is_stream(a.sap)) {
    builder.finalize_to(a.out, a.sap);
  } else {
    auto [bwt, sap] = builder.finalize();
    write_bytes(a.out, s.out, bwt.bytes);
    write_bytes(a.sap, s.out, encode_sap(sap));
  }
  if (!a.stats_out.empty()) {
    const auto& st = builder.stats();
    Output out(a.stats_out, s.out);
    auto& o = out.get();
    o << "reads=" << st.reads << '\n'
      << "total_bases=" << st.total_bases << '\n'
      << "stages=" << st.stages << '\n'
      << "segment_bytes_read=" << st.segment_io.bytes_read << '\n'
      << "segment_bytes_written=" << st.segment_io.bytes_written << '\n'
      << "expected_segment_bytes=" << st.expected_segment_bytes << '\n'
      << "access_violations=" << st.access_violations << '\n'
      << "partial_scans=" << st.segment_io.partial_scans + st.column_io.partial_scans << '\n'
      << "column_bytes_read=" << st.column_io.bytes_read << '\n'
      << "peak_cursors=" << st.peak_cursors << '\n'
      << "peak_state_bytes=" << st.peak_state_bytes() << '\n';
    out.close();
  }
}

struct PermuteArgs {
  std::string in, sap, out, strategy = "sap-sort";
};

void cmd_permute(const PermuteArgs& a, Streams s) {
  if (a.strategy == "none") {
    require_distinct({a.in}, {a.out});
    write_bytes(a.out, s.out, read_bytes(a.in, s.in));
    return;
  }
  const reorder::Strategy strategy = parse_strategy(a.strategy);
  if (a.sap.empty()) throw UsageError("--sap is required for strategy " + a.strategy);
  if (is_stream(a.in) && is_stream(a.sap)) throw UsageError("--in and --sap cannot both be '-'");
  require_distinct({a.in, a.sap}, {a.out});
  if (!is_stream(a.in) && !is_stream(a.sap) && !is_stream(a.out)) {
    reorder::sap_permute_files(a.in, a.sap, a.out, strategy);
    return;
  }
  const BwtString bwt{read_bytes(a.in, s.in)};
  const SapArray sap = read_sap(a.sap, s.in);
  write_bytes(a.out, s.out, reorder::sap_permute(bwt, sap, strategy).bytes);
}

struct RloArgs {
  std::string in, out = "-";
};

void cmd_rlo(const RloArgs& a, Streams s) {
  require_distinct({a.in}, {a.out});
  bool fastq = false;
  auto records = read_records(a.in, s.in, fastq);
  std::vector<std::string> bases;
  bases.reserve(records.size());
  for (const auto& r : records) bases.push_back(r.bases);
  const auto order = reorder::rlo_order(bases);
  Output out(a.out, s.out);
  for (std::size_t i : order) {
    const auto& r = records[i];
    if (fastq) {
      const ingest::QualityRead q{r.name, r.bases, r.quals};
      ingest::write_fastq(out.get(), std::span(&q, 1));
    } else {
      out.get() << '>' << r.name << '\n' << r.bases << '\n';
    }
  }
  out.close();
}

struct CodecArgs {
  std::string in, out, profile = "rle-huff";
};

void cmd_compress(const CodecArgs& a, Streams s) {
  require_distinct({a.in}, {a.out});
  const codec::Profile profile = codec::parse_profile(a.profile);
  write_bytes(a.out, s.out, codec::compress(read_bytes(a.in, s.in), profile));
}

void cmd_decompress(const CodecArgs& a, Streams s) {
  require_distinct({a.in}, {a.out});
  write_bytes(a.out, s.out, codec::decompress(read_bytes(a.in, s.in)));
}

struct InvertArgs {
  std::string in, out = "-";
  std::size_t stride = invert::kDefaultCheckpointStride;
};

void cmd_invert(const InvertArgs& a, Streams s) {
  require_distinct({a.in}, {a.out});
  const BwtString bwt{read_bytes(a.in, s.in)};
  const ReadCollection reads = invert::invert_bwt(bwt, {a.stride});
  Output out(a.out, s.out);
  invert::write_fasta(out.get(), reads);
  out.close();
}

struct TrimArgs {
  std::string in, out = "-";
  int threshold = ingest::kDefaultTrimThreshold;
};

void cmd_trim(const TrimArgs& a, Streams s) {
  require_distinct({a.in}, {a.out});
  Input input(a.in, s.in);
  ingest::FastxReader reader(input.get());
  if (!reader.is_fastq()) {
    ingest::Record probe;
    if (reader.next(probe)) throw DataError("trim needs FASTQ input (qualities)");
  }
  Output out(a.out, s.out);
  ingest::Record rec;
  std::size_t dropped = 0;
  while (reader.next(rec)) {
    const auto trimmed = ingest::trim_bwa({rec.name, rec.bases, rec.quals}, a.threshold);
    if (trimmed.bases.empty()) {
      ++dropped;
      continue;
    }
    ingest::write_fastq(out.get(), std::span(&trimmed, 1));
  }
  out.close();
  if (dropped) s.err << "seqbwt: trim: dropped " << dropped << " reads trimmed to length 0\n";
}

struct SimulateArgs {
  std::string reference, out = "-", format = "fastq";
  std::size_t reference_length = 0;
  double coverage = 0, error = 0, tail_error = 0;
  std::size_t read_length = 0, tail_length = 0;
  std::uint64_t seed = 1;
};

void cmd_simulate(const SimulateArgs& a, Streams s) {
  require_distinct({a.reference}, {a.out});
  if (a.reference.empty() == (a.reference_length == 0))
    throw UsageError("give exactly one of --reference and --reference-length");
  if (a.format != "fastq" && a.format != "fasta") throw UsageError("--format must be fastq or fasta");
  ingest::SimulationSpec spec;
  spec.reference = a.reference.empty() ? ingest::random_reference(a.reference_length, a.seed)
                                       : ingest::load_reference(a.reference);
  spec.coverage = a.coverage;
  spec.read_length = a.read_length;
  spec.error_rate = a.error;
  spec.seed = a.seed;
  spec.tail_length = a.tail_length;
  spec.tail_error_rate = a.tail_error;
  ingest::validate(spec);
  Output out(a.out, s.out);
  const std::size_t count = ingest::simulated_read_count(spec);
  for (std::size_t i = 0; i < count; ++i) {
    const auto read = ingest::simulate_read(spec, i);
    if (a.format == "fastq") ingest::write_fastq(out.get(), std::span(&read, 1));
    else ingest::write_fasta(out.get(), std::span(&read, 1));
  }
  out.close();
}

struct StatsArgs {
  std::string bwt, sap, reads, out = "-", format = "kv", external, dataset;
  bool oracle = false;
};

void cmd_stats(const StatsArgs& a, Streams s) {
  if (a.format != "kv" && a.format != "csv") throw UsageError("--format must be kv or csv");
  if (!a.oracle && a.bwt.empty()) throw UsageError("stats needs --bwt, or --oracle with --reads");
  if (a.oracle && a.reads.empty()) throw UsageError("--oracle needs --reads");
  if (!a.reads.empty() && !a.oracle) throw UsageError("--reads is only used with --oracle");
  {
    int from_stdin = is_stream(a.bwt) + is_stream(a.sap) + is_stream(a.reads);
    if (from_stdin > 1) throw UsageError("only one input may be '-'");
  }
  require_distinct({a.bwt, a.sap, a.reads}, {a.out});

  BwtString bwt;
  std::optional<SapArray> sap;
  if (!a.bwt.empty()) bwt.bytes = read_bytes(a.bwt, s.in);
  if (!a.sap.empty()) sap = read_sap(a.sap, s.in);

  std::optional<bool> oracle_match;
  std::string mismatch;
  if (a.oracle) {
    const ReadCollection reads = read_collection(a.reads, s.in);
    if (reads.total_length() > kOracleLimit)
      throw UsageError("--oracle is limited to " + std::to_string(kOracleLimit) + " bases");
    auto [obwt, osap] = oracle::bwt_sap(reads);
    if (a.bwt.empty()) {
      bwt = std::move(obwt);
      if (!sap) sap = std::move(osap);
    } else {
      oracle_match = bwt == obwt && (!sap || *sap == osap);
      if (!*oracle_match) {
        std::size_t k = 0;
        while (k < bwt.size() && k < obwt.size() && bwt.bytes[k] == obwt.bytes[k]) ++k;
        mismatch = k < std::min(bwt.size(), obwt.size()) || bwt.size() != obwt.size()
                       ? "BWT differs from the oracle at offset " + std::to_string(k)
                       : "SAP-array differs from the oracle";
      }
    }
  }

  const std::size_t m = bwt.sentinel_count();
  if (const auto report = validate(bwt, m); !report)
    throw DataError("offset " + std::to_string(report.offset) + ": " + report.message);
  if (sap && sap->size() != bwt.size()) throw DataError("SAP-array length differs from the BWT length");
  const std::uint64_t input_bases = bwt.size() - m;
  const auto runs = reorder::run_stats(bwt, sap ? &*sap : nullptr);

  std::string external = a.external;
  if (external.empty())
    if (const char* env = std::getenv(kExternalEnv)) external = env;

  std::vector<experiment::Row> rows;
  const std::string dataset =
      !a.dataset.empty() ? a.dataset
                         : (!a.bwt.empty() && !is_stream(a.bwt) ? fs::path(a.bwt).stem().string() : "stdin");
  for (codec::Profile p : codec::kProfiles) {
    const std::uint64_t bytes = codec::compress(bwt.bytes, p).size();
    const auto metrics = codec::bits_per_base(input_bases, bytes * 8);
    rows.push_back({dataset, std::string(codec::profile_name(p)), input_bases, bytes, metrics.bpb});
  }
  if (!external.empty()) {
    const std::uint64_t bytes = codec::external_compress(bwt.bytes, external);
    rows.push_back({dataset, "external", input_bases, bytes, codec::bits_per_base(input_bases, bytes * 8).bpb});
  }

  Output out(a.out, s.out);
  auto& o = out.get();
  if (a.format == "csv") {
    experiment::write_csv(o, rows);
  } else {
    o << "length=" << bwt.size() << '\n'
      << "sentinels=" << m << '\n'
      << "input_bases=" << input_bases << '\n'
      << "runs=" << runs.runs << '\n'
      << "mean_run_length=" << std::setprecision(6) << runs.mean_run_length << '\n';
    if (runs.has_intervals) {
      o << "intervals=" << runs.intervals << '\n'
        << "mixed_intervals=" << runs.mixed_intervals << '\n'
        << "interval_runs=" << runs.interval_runs_total << '\n'
        << "phi_total=" << runs.phi_total << '\n'
        << "bound_violations=" << runs.bound_violations << '\n';
    }
    for (const auto& r : rows) {
      o << "compressed_bytes." << r.pipeline << '=' << r.compressed_bytes << '\n'
        << "bpb." << r.pipeline << '=' << std::fixed << std::setprecision(6) << r.bpb << std::defaultfloat
        << '\n';
    }
    if (oracle_match) o << "oracle_match=" << (*oracle_match ? 1 : 0) << '\n';
  }
  out.close();
  if (!mismatch.empty()) throw DataError(mismatch);
}

struct ExperimentArgs {
  std::string spec_file, out = "-";
  std::vector<std::pair<std::string, std::string>> settings;  // applied after the spec file
};

void cmd_experiment(const ExperimentArgs& a, Streams s) {
  require_distinct({a.spec_file}, {a.out});
  experiment::Spec spec;
  if (!a.spec_file.empty()) {
    Input input(a.spec_file, s.in);
    experiment::load_spec(spec, input.get());
  }
  for (const auto& [key, value] : a.settings) experiment::apply_setting(spec, key, value);
  const auto rows = experiment::run(spec);
  Output out(a.out, s.out);
  experiment::write_csv(out.get(), rows);
  out.close();
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return kExitUsage;
    case ErrorKind::Data: return kExitData;
    case ErrorKind::Io: return kExitIo;
  }
  return kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collection BWT construction, SAP/RLO reordering and compression for sequencing reads",
               "seqbwt"};
  app.require_subcommand(1);
  const Streams streams{in, out, err};

  BwtArgs bwt_args;
  auto* bwt = app.add_subcommand("bwt", "Build the BWT and SAP-array of a FASTA/FASTQ read set");
  bwt->add_option("--in", bwt_args.in, "Reads (FASTA or FASTQ), or -")->required();
  bwt->add_option("--workdir", bwt_args.workdir, "Empty working directory for stage files")->required();
  bwt->add_option("--out", bwt_args.out, "Output .bwt")->required();
  bwt->add_option("--sap", bwt_args.sap, "Output .sap")->required();
  bwt->add_option("--threads", bwt_args.threads, "Segment merges run concurrently")
      ->check(CLI::Range(1u, 64u));
  bwt->add_option("--stats-out", bwt_args.stats_out, "Write key=value build statistics here");
  bwt->add_flag("--keep-workdir", bwt_args.keep, "Keep stage files after the build");

  PermuteArgs permute_args;
  auto* permute = app.add_subcommand("permute", "Reorder symbols inside SAP-intervals");
  permute->add_option("--in", permute_args.in, "Input .bwt, or -")->required();
  permute->add_option("--sap", permute_args.sap, "Input .sap, or -");
  permute->add_option("--out", permute_args.out, "Output .bwt, or -")->required();
  permute->add_option("--strategy", permute_args.strategy, "none, sap-sort or sap-runext")
      ->capture_default_str();

  RloArgs rlo_args;
  auto* rlo = app.add_subcommand("rlo", "Sort reads into reverse lexicographic order");
  rlo->add_option("--in", rlo_args.in, "Reads (FASTA or FASTQ), or -")->required();
  rlo->add_option("--out", rlo_args.out, "Reordered reads in the input format")->capture_default_str();

  CodecArgs compress_args;
  auto* compress = app.add_subcommand("compress", "Compress a .bwt stream into a .btc blob");
  compress->add_option("--in", compress_args.in, "Input .bwt, or -")->required();
  compress->add_option("--out", compress_args.out, "Output .btc, or -")->required();
  compress->add_option("--profile", compress_args.profile, "raw-huff, rle-huff or mtf-rle-huff")
      ->capture_default_str();

  CodecArgs decompress_args;
  auto* decompress = app.add_subcommand("decompress", "Restore a .bwt stream from a .btc blob");
  decompress->add_option("--in", decompress_args.in, "Input .btc, or -")->required();
  decompress->add_option("--out", decompress_args.out, "Output .bwt, or -")->required();

  InvertArgs invert_args;
  auto* inv = app.add_subcommand("invert", "Recover the reads of a collection BWT as FASTA");
  inv->add_option("--in", invert_args.in, "Input .bwt, or -")->required();
  inv->add_option("--out", invert_args.out, "Output FASTA")->capture_default_str();
  inv->add_option("--stride", invert_args.stride, "Occurrence checkpoint spacing")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  TrimArgs trim_args;
  auto* trim = app.add_subcommand("trim", "bwa-style 3' quality trimming of FASTQ reads");
  trim->add_option("--in", trim_args.in, "Input FASTQ, or -")->required();
  trim->add_option("--out", trim_args.out, "Output FASTQ")->capture_default_str();
  trim->add_option("--threshold", trim_args.threshold, "Quality threshold")
      ->check(CLI::Range(0, ingest::kMaxPhred))
      ->capture_default_str();

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Simulate substitution-error reads from a reference");
  auto* ref_opt = simulate->add_option("--reference", sim_args.reference, "Reference FASTA");
  simulate->add_option("--reference-length", sim_args.reference_length, "Random reference length instead")
      ->excludes(ref_opt);
  simulate->add_option("--coverage", sim_args.coverage, "Mean coverage")->required();
  simulate->add_option("--read-length", sim_args.read_length, "Read length")->required();
  simulate->add_option("--error", sim_args.error, "Substitution rate per base")->capture_default_str();
  simulate->add_option("--tail-length", sim_args.tail_length, "Bases at the 3' end with their own error rate");
  simulate->add_option("--tail-error", sim_args.tail_error, "Substitution rate in the tail");
  simulate->add_option("--seed", sim_args.seed, "Generator seed")->capture_default_str();
  simulate->add_option("--format", sim_args.format, "fastq or fasta")->capture_default_str();
  simulate->add_option("--out", sim_args.out, "Output reads")->capture_default_str();

  StatsArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Run statistics and compressed sizes of a BWT");
  stats->add_option("--bwt", stats_args.bwt, "Input .bwt, or -");
  stats->add_option("--sap", stats_args.sap, "Input .sap for per-interval statistics");
  stats->add_option("--reads", stats_args.reads, "Reads for --oracle");
  stats->add_flag("--oracle", stats_args.oracle,
                  "Build the BWT by brute force from --reads (and compare with --bwt when given)");
  stats->add_option("--external", stats_args.external,
                    std::string("Shell command used as an extra compressor (default: $") + kExternalEnv + ")");
  stats->add_option("--format", stats_args.format, "kv or csv")->capture_default_str();
  stats->add_option("--dataset", stats_args.dataset, "Dataset label for csv rows");
  stats->add_option("--out", stats_args.out, "Output")->capture_default_str();

  ExperimentArgs exp_args;
  auto* exp = app.add_subcommand("experiment", "Compression sweep over simulated read sets (CSV)");
  exp->add_option("--spec", exp_args.spec_file, "key=value settings file, applied before flags");
  exp->add_option("--out", exp_args.out, "Output CSV")->capture_default_str();
  struct Setting {
    const char* flag;
    const char* key;
    const char* help;
  };
  static constexpr Setting kSettings[] = {
      {"--coverages", "coverages", "Comma-separated coverages"},
      {"--read-lengths", "read_lengths", "Comma-separated read lengths"},
      {"--read-length", "read_lengths", "Single read length"},
      {"--errors", "errors", "Comma-separated substitution rates"},
      {"--error", "errors", "Single substitution rate"},
      {"--seed", "seed", "Generator seed"},
      {"--reference", "reference", "Reference FASTA"},
      {"--reference-length", "reference_length", "Random reference length"},
      {"--tail-length", "tail_length", "Low-quality tail length"},
      {"--tail-error", "tail_error", "Substitution rate in the tail"},
      {"--trim", "trim", "Trim threshold applied before every pipeline"},
      {"--profile", "profile", "Codec profile"},
      {"--pipelines", "pipelines", "Comma-separated subset of raw,bwt,bwt-sap,bwt-rlo"},
      {"--workdir", "workdir", "Scratch directory"},
      {"--threads", "threads", "Segment merge threads"},
  };
  std::vector<std::string> setting_values(std::size(kSettings));
  std::vector<CLI::Option*> setting_options;
  for (std::size_t i = 0; i < std::size(kSettings); ++i)
    setting_options.push_back(exp->add_option(kSettings[i].flag, setting_values[i], kSettings[i].help));

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.push_back("seqbwt");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (bwt->parsed()) cmd_bwt(bwt_args, streams);
    else if (permute->parsed()) cmd_permute(permute_args, streams);
    else if (rlo->parsed()) cmd_rlo(rlo_args, streams);
    else if (compress->parsed()) cmd_compress(compress_args, streams);
    else if (decompress->parsed()) cmd_decompress(decompress_args, streams);
    else if (inv->parsed()) cmd_invert(invert_args, streams);
    else if (trim->parsed()) cmd_trim(trim_args, streams);
    else if (simulate->parsed()) cmd_simulate(sim_args, streams);
    else if (stats->parsed()) cmd_stats(stats_args, streams);
    else if (exp->parsed()) {
      for (std::size_t i = 0; i < setting_options.size(); ++i)
        if (setting_options[i]->count()) exp_args.settings.emplace_back(kSettings[i].key, setting_values[i]);
      cmd_experiment(exp_args, streams);
    }
  } catch (const Error& e) {
    err << "seqbwt: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "seqbwt: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::bad_alloc&) {
    err << "seqbwt: out of memory\n";
    return kExitIo;
  } catch (const std::logic_error& e) {
    err << "seqbwt: internal error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "seqbwt: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cin, std::cout, std::cerr);
}

}  // namespace seqbwt::cli
