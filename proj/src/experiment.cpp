#include "seqbwt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <sstream>

#include "seqbwt/error.hpp"
#include "seqbwt/ingest.hpp"
#include "seqbwt/reorder.hpp"

namespace seqbwt::experiment {

namespace fs = std::filesystem;

std::string_view pipeline_name(Pipeline pipeline) {
  switch (pipeline) {
    case Pipeline::Raw: return "raw";
    case Pipeline::Bwt: return "bwt";
    case Pipeline::BwtSap: return "bwt-sap";
    case Pipeline::BwtRlo: return "bwt-rlo";
  }
  return "?";
}

Pipeline parse_pipeline(std::string_view name) {
  for (Pipeline p : kPipelines)
    if (pipeline_name(p) == name) return p;
  throw UsageError("unknown pipeline '" + std::string(name) + "' (expected raw, bwt, bwt-sap or bwt-rlo)");
}

namespace {

std::string raw_stream(const ReadCollection& reads) {
  std::string out;
  out.reserve(reads.total_length() + reads.size());
  for (const auto& r : reads) {
    out += r;
    out += alphabet::kSentinel;
  }
  return out;
}

std::pair<BwtString, SapArray> build(const ReadCollection& reads, const fs::path& workdir,
                                     const bcr::Options& options) {
  auto result = bcr::build_bwt_sap(reads, workdir, options);
  std::error_code ec;
  fs::remove_all(workdir, ec);
  return result;
}

// Scratch directory that is removed when it goes out of scope.
class ScratchDir {
 public:
  explicit ScratchDir(const fs::path& requested) {
    const fs::path parent = requested.empty() ? fs::temp_directory_path() : requested;
    fs::create_directories(parent);
    std::string templ = (parent / "seqbwt.XXXXXX").string();
    if (!mkdtemp(templ.data())) throw IoError("cannot create a scratch directory in " + parent.string());
    path_ = templ;
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  fs::path sub(std::string_view name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError("invalid value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

double parse_double(std::string_view key, std::string_view text) {
  // from_chars for double is missing from older standard libraries.
  std::string s(text);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw UsageError("invalid value '" + s + "' for " + std::string(key));
  return v;
}

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = text.find(',', start);
    parts.push_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string pipeline_stream(const ReadCollection& reads, Pipeline pipeline, const fs::path& workdir,
                            const bcr::Options& options) {
  switch (pipeline) {
    case Pipeline::Raw: return raw_stream(reads);
    case Pipeline::Bwt: return build(reads, workdir, options).first.bytes;
    case Pipeline::BwtSap: {
      auto [bwt, sap] = build(reads, workdir, options);
      return reorder::sap_permute(bwt, sap, reorder::Strategy::SortAscending).bytes;
    }
    case Pipeline::BwtRlo: return build(reorder::rlo_sort(reads), workdir, options).first.bytes;
  }
  throw std::logic_error("unhandled pipeline");
}

std::vector<Row> measure(const ReadCollection& reads, std::string_view dataset,
                         std::span<const Pipeline> pipelines, codec::Profile profile,
                         const fs::path& workdir, const bcr::Options& options) {
  ScratchDir scratch(workdir);
  std::optional<std::pair<BwtString, SapArray>> plain;
  std::vector<Row> rows;
  for (Pipeline p : pipelines) {
    std::string stream;
    if (p == Pipeline::Bwt || p == Pipeline::BwtSap) {
      if (!plain) plain = build(reads, scratch.sub("bwt"), options);
      stream = p == Pipeline::Bwt
                   ? plain->first.bytes
                   : reorder::sap_permute(plain->first, plain->second, reorder::Strategy::SortAscending).bytes;
    } else {
      stream = pipeline_stream(reads, p, scratch.sub(pipeline_name(p)), options);
    }
    const std::uint64_t bytes = codec::compress(stream, profile).size();
    const auto metrics = codec::bits_per_base(reads.total_length(), bytes * 8);
    rows.push_back({std::string(dataset), std::string(pipeline_name(p)), metrics.input_bases, bytes, metrics.bpb});
  }
  return rows;
}

void apply_setting(Spec& spec, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "reference") {
    spec.reference_path = std::string(value);
  } else if (key == "reference_length") {
    spec.reference_length = parse_number<std::size_t>(key, value);
  } else if (key == "coverages") {
    spec.coverages.clear();
    for (auto v : split(value)) spec.coverages.push_back(parse_double(key, trim(v)));
  } else if (key == "read_lengths") {
    spec.read_lengths.clear();
    for (auto v : split(value)) spec.read_lengths.push_back(parse_number<std::size_t>(key, trim(v)));
  } else if (key == "errors") {
    spec.error_rates.clear();
    for (auto v : split(value)) spec.error_rates.push_back(parse_double(key, trim(v)));
  } else if (key == "seed") {
    spec.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "tail_length") {
    spec.tail_length = parse_number<std::size_t>(key, value);
  } else if (key == "tail_error") {
    spec.tail_error_rate = parse_double(key, value);
  } else if (key == "trim") {
    if (value == "none" || value.empty()) spec.trim_threshold.reset();
    else spec.trim_threshold = parse_number<int>(key, value);
  } else if (key == "profile") {
    spec.profile = codec::parse_profile(value);
  } else if (key == "pipelines") {
    spec.pipelines.clear();
    for (auto v : split(value)) spec.pipelines.push_back(parse_pipeline(trim(v)));
  } else if (key == "workdir") {
    spec.workdir = std::string(value);
  } else if (key == "threads") {
    spec.bcr.threads = parse_number<unsigned>(key, value);
  } else {
    throw UsageError("unknown experiment setting '" + std::string(key) + "'");
  }
}

void load_spec(Spec& spec, std::istream& in) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    const std::size_t eq = view.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("spec line " + std::to_string(number) + ": expected key=value");
    apply_setting(spec, view.substr(0, eq), view.substr(eq + 1));
  }
  if (in.bad()) throw IoError("cannot read experiment spec");
}

std::string dataset_label(double coverage, std::size_t read_length, double error_rate,
                          const std::optional<int>& trim_threshold) {
  std::string label = "cov" + format_number(coverage) + "_len" + std::to_string(read_length) + "_err" +
                      format_number(error_rate);
  if (trim_threshold) label += "_trim" + std::to_string(*trim_threshold);
  return label;
}

std::vector<Row> run(const Spec& spec) {
  if (spec.coverages.empty() || spec.read_lengths.empty() || spec.error_rates.empty())
    throw UsageError("experiment needs at least one coverage, read length and error rate");
  if (spec.pipelines.empty()) throw UsageError("experiment needs at least one pipeline");
  std::string reference = spec.reference;
  if (reference.empty())
    reference = spec.reference_path.empty() ? ingest::random_reference(spec.reference_length, spec.seed)
                                            : ingest::load_reference(spec.reference_path);

  std::vector<Row> rows;
  for (double coverage : spec.coverages) {
    for (std::size_t length : spec.read_lengths) {
      for (double error : spec.error_rates) {
        ingest::SimulationSpec sim;
        sim.reference = reference;
        sim.coverage = coverage;
        sim.read_length = length;
        sim.error_rate = error;
        sim.seed = spec.seed;
        sim.tail_length = spec.tail_length;
        sim.tail_error_rate = spec.tail_error_rate;
        std::vector<std::string> bases;
        for (auto& read : ingest::simulate_reads(sim)) {
          if (spec.trim_threshold) read = ingest::trim_bwa(read, *spec.trim_threshold);
          if (!read.bases.empty()) bases.push_back(std::move(read.bases));
        }
        if (bases.empty()) throw DataError("every simulated read was trimmed away");
        const ReadCollection reads(std::move(bases));
        auto part = measure(reads, dataset_label(coverage, length, error, spec.trim_threshold), spec.pipelines,
                            spec.profile, spec.workdir, spec.bcr);
        rows.insert(rows.end(), part.begin(), part.end());
      }
    }
  }
  return rows;
}

void write_csv_header(std::ostream& out) { out << "dataset,pipeline,input_bases,compressed_bytes,bpb\n"; }

void write_csv(std::ostream& out, std::span<const Row> rows) {
  write_csv_header(out);
  for (const auto& r : rows)
    out << r.dataset << ',' << r.pipeline << ',' << r.input_bases << ',' << r.compressed_bytes << ','
        << std::fixed << std::setprecision(6) << r.bpb << std::defaultfloat << '\n';
}

}  // namespace seqbwt::experiment
