#pragma once

// Compression sweeps over simulated read sets.
//
// Pipelines, all compressed with the same codec profile:
//   raw      reads in input order, each followed by '$'
//   bwt      collection BWT
//   bwt-sap  BWT with symbols sorted inside SAP-intervals
//   bwt-rlo  BWT of the reads in reverse lexicographic order

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqbwt/bcr.hpp"
#include "seqbwt/codec.hpp"
#include "seqbwt/core.hpp"

namespace seqbwt::experiment {

enum class Pipeline { Raw, Bwt, BwtSap, BwtRlo };

inline constexpr Pipeline kPipelines[] = {Pipeline::Raw, Pipeline::Bwt, Pipeline::BwtSap, Pipeline::BwtRlo};

std::string_view pipeline_name(Pipeline pipeline);
/// Throws UsageError for an unknown name.
Pipeline parse_pipeline(std::string_view name);

/// The byte stream a pipeline hands to the codec.
std::string pipeline_stream(const ReadCollection& reads, Pipeline pipeline,
                            const std::filesystem::path& workdir, const bcr::Options& options = {});

struct Row {
  std::string dataset;
  std::string pipeline;
  std::uint64_t input_bases = 0;
  std::uint64_t compressed_bytes = 0;
  double bpb = 0.0;
};

/// Compresses every requested pipeline stream of one read set.
std::vector<Row> measure(const ReadCollection& reads, std::string_view dataset,
                         std::span<const Pipeline> pipelines, codec::Profile profile,
                         const std::filesystem::path& workdir, const bcr::Options& options = {});

struct Spec {
  std::string reference;                 // bases; when empty, reference_path or a random sequence
  std::filesystem::path reference_path;  // FASTA
  std::size_t reference_length = 100000;
  std::vector<double> coverages = {10, 20, 40, 60};
  std::vector<std::size_t> read_lengths = {100};
  std::vector<double> error_rates = {0.0};
  std::uint64_t seed = 1;
  std::size_t tail_length = 0;
  double tail_error_rate = 0.0;
  std::optional<int> trim_threshold;
  codec::Profile profile = codec::Profile::RleHuff;
  std::vector<Pipeline> pipelines = {std::begin(kPipelines), std::end(kPipelines)};
  /// Scratch space; a fresh temporary directory when empty.
  std::filesystem::path workdir;
  bcr::Options bcr;
};

/// Applies one key=value setting. Keys: reference, reference_length,
/// coverages, read_lengths, errors, seed, tail_length, tail_error, trim,
/// profile, pipelines, workdir, threads. Lists are comma-separated.
/// Throws UsageError for unknown keys or malformed values.
void apply_setting(Spec& spec, std::string_view key, std::string_view value);

/// Reads key=value lines; blank lines and lines starting with '#' are skipped.
void load_spec(Spec& spec, std::istream& in);

/// Dataset label such as "cov10_len100_err0".
std::string dataset_label(double coverage, std::size_t read_length, double error_rate,
                          const std::optional<int>& trim_threshold);

/// Runs every (coverage, read length, error rate) combination through every
/// pipeline. Rows are ordered by dataset, then pipeline.
std::vector<Row> run(const Spec& spec);

void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, std::span<const Row> rows);

}  // namespace seqbwt::experiment
