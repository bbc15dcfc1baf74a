// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance [--only N[,N...]] [--cli PATH] [--reads N]

#include <sys/resource.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqbwt/bcr.hpp"
#include "seqbwt/codec.hpp"
#include "seqbwt/error.hpp"
#include "seqbwt/experiment.hpp"
#include "seqbwt/invert.hpp"
#include "seqbwt/oracle.hpp"
#include "seqbwt/reorder.hpp"
#include "support.hpp"

#ifndef SEQBWT_CLI_PATH
#define SEQBWT_CLI_PATH "seqbwt"
#endif

using namespace seqbwt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream o;
  o.setf(std::ios::fixed);
  o.precision(precision);
  o << v;
  return o.str();
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Runs per SAP-interval counted directly, compared with the distinct symbols.
std::uint64_t bound_violations(const std::string& bwt, const std::vector<bool>& sap) {
  std::uint64_t violations = 0;
  std::size_t i = 0;
  while (i < bwt.size()) {
    std::size_t j = i + 1;
    while (j < bwt.size() && sap[j]) ++j;
    std::set<char> distinct(bwt.begin() + static_cast<std::ptrdiff_t>(i), bwt.begin() + static_cast<std::ptrdiff_t>(j));
    const std::size_t runs = testing::naive_runs(std::string_view(bwt).substr(i, j - i));
    if (runs > distinct.size()) ++violations;
    i = j;
  }
  return violations;
}

bcr::Options small_buffers() {
  bcr::Options o;
  o.io_buffer = 64;
  o.transpose_block = 50;
  return o;
}

// The random suite shared by criteria 2, 3 and 4.
std::vector<std::vector<std::string>> random_suite() {
  testing::Rng rng(20240601);
  std::vector<std::vector<std::string>> suite;
  for (int i = 0; i < 1000; ++i) suite.push_back(testing::random_reads(rng, 1, 40, 1, 16, 0.05));
  return suite;
}

Outcome worked_example() {
  const auto t0 = Clock::now();
  testing::TempDir dir;
  const auto [bwt, sap] = bcr::build_bwt_sap(ReadCollection(testing::kExampleReads), dir / "w");
  const auto permuted = reorder::sap_permute(bwt, sap, reorder::Strategy::SortAscending);
  const double elapsed = seconds_since(t0);
  const bool exact = bwt.bytes == "TTTTTGTGCTGGCAAAACCACAA$$CCCC$A$" &&
                     permuted.bytes == "TTTTTGGTCGTGCAAAAACCCAA$$CCCC$A$";
  return {exact && elapsed < 1.0, "bwt=" + bwt.bytes + " permuted=" + permuted.bytes + " time=" + fmt(elapsed) + "s"};
}

Outcome oracle_equivalence(const std::vector<std::vector<std::string>>& suite) {
  const auto t0 = Clock::now();
  testing::TempDir dir;
  std::size_t mismatches = 0, duplicate_reads = 0, shared_suffixes = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const ReadCollection c(suite[i]);
    const auto got = bcr::build_bwt_sap(c, dir / ("c" + std::to_string(i)), small_buffers());
    const auto [expect_bwt, expect_sap] = testing::brute_force_bwt(suite[i]);
    const auto [oracle_bwt, oracle_sap] = oracle::bwt_sap(c);
    if (got.first.bytes != oracle_bwt.bytes || got.second != oracle_sap || oracle_bwt.bytes != expect_bwt ||
        oracle_sap.bits != expect_sap)
      ++mismatches;
    if (std::set<std::string>(suite[i].begin(), suite[i].end()).size() < suite[i].size()) ++duplicate_reads;
    if (std::count(expect_sap.begin(), expect_sap.end(), true) > 0) ++shared_suffixes;
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 60.0 && duplicate_reads > 0 && shared_suffixes > 0,
          std::to_string(suite.size()) + " collections, " + std::to_string(mismatches) + " mismatches, " +
              std::to_string(duplicate_reads) + " with duplicate reads, " + std::to_string(shared_suffixes) +
              " with repeated suffixes, time=" + fmt(elapsed) + "s"};
}

Outcome losslessness(const std::vector<std::vector<std::string>>& suite) {
  testing::TempDir dir;
  std::size_t failures = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const ReadCollection c(suite[i]);
    const auto [bwt, sap] = bcr::build_bwt_sap(c, dir / ("a" + std::to_string(i)), small_buffers());
    if (invert::invert_bwt(bwt).reads() != suite[i]) ++failures;
    const auto multiset = sorted(suite[i]);
    for (auto strategy : {reorder::Strategy::SortAscending, reorder::Strategy::RunExtension})
      if (sorted(invert::invert_bwt(reorder::sap_permute(bwt, sap, strategy)).reads()) != multiset) ++failures;
    const auto rlo = bcr::build_bwt_sap(reorder::rlo_sort(c), dir / ("r" + std::to_string(i)), small_buffers());
    if (sorted(invert::invert_bwt(rlo.first).reads()) != multiset) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " failed inversions over " + std::to_string(suite.size()) +
                             " collections x 4 transforms"};
}

Outcome run_bound(const std::vector<std::vector<std::string>>& suite) {
  testing::TempDir dir;
  std::uint64_t violations = 0, intervals = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    const ReadCollection c(suite[i]);
    const auto [bwt, sap] = bcr::build_bwt_sap(c, dir / ("b" + std::to_string(i)), small_buffers());
    const auto permuted = reorder::sap_permute(bwt, sap, reorder::Strategy::SortAscending);
    violations += bound_violations(permuted.bytes, sap.bits);
    const auto rlo = bcr::build_bwt_sap(reorder::rlo_sort(c), dir / ("r" + std::to_string(i)), small_buffers());
    violations += bound_violations(rlo.first.bytes, rlo.second.bits);
    intervals += sap_intervals(sap).size() + sap_intervals(rlo.second).size();
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(intervals) + " intervals"};
}

// Compressed bytes by (dataset, pipeline).
std::map<std::pair<std::string, std::string>, experiment::Row> sweep(experiment::Spec spec) {
  spec.reference_length = 100000;
  spec.seed = 1;
  spec.profile = codec::Profile::RleHuff;
  spec.bcr.threads = 4;
  std::map<std::pair<std::string, std::string>, experiment::Row> out;
  for (auto& row : experiment::run(spec)) out[{row.dataset, row.pipeline}] = row;
  return out;
}

std::string row_summary(const experiment::Row& r) {
  return r.pipeline + "=" + std::to_string(r.compressed_bytes) + "B/" + fmt(r.bpb, 4) + "bpb";
}

Outcome coverage_trend() {
  const auto t0 = Clock::now();
  experiment::Spec spec;
  spec.coverages = {10, 20, 40, 60};
  spec.read_lengths = {100};
  spec.error_rates = {0.0};
  spec.pipelines = {experiment::Pipeline::Raw, experiment::Pipeline::Bwt, experiment::Pipeline::BwtSap,
                    experiment::Pipeline::BwtRlo};
  const auto rows = sweep(spec);
  std::string detail;
  for (double cov : spec.coverages) {
    const std::string ds = experiment::dataset_label(cov, 100, 0.0, std::nullopt);
    detail += ds + ": ";
    for (const char* p : {"raw", "bwt", "bwt-sap", "bwt-rlo"}) detail += row_summary(rows.at({ds, p})) + " ";
    detail += "| ";
  }
  const std::string ds60 = experiment::dataset_label(60, 100, 0.0, std::nullopt);
  const double bwt = static_cast<double>(rows.at({ds60, "bwt"}).compressed_bytes);
  const double sap = static_cast<double>(rows.at({ds60, "bwt-sap"}).compressed_bytes);
  const double rlo = static_cast<double>(rows.at({ds60, "bwt-rlo"}).compressed_bytes);
  const double sap_gain = 1.0 - sap / bwt;
  const double rlo_gain = 1.0 - rlo / bwt;
  const double gap = std::abs(sap - rlo) / std::min(sap, rlo);
  const double elapsed = seconds_since(t0);
  detail += "60x: sap " + fmt(100 * sap_gain, 1) + "% smaller, rlo " + fmt(100 * rlo_gain, 1) +
            "% smaller, sap/rlo gap " + fmt(100 * gap, 1) + "%, time=" + fmt(elapsed, 1) + "s";
  return {sap_gain >= 0.25 && rlo_gain >= 0.25 && gap <= 0.15 && elapsed < 600, detail};
}

Outcome error_trend() {
  const auto t0 = Clock::now();
  experiment::Spec spec;
  spec.coverages = {40};
  spec.read_lengths = {100};
  spec.error_rates = {0.0, 0.012};
  spec.pipelines = {experiment::Pipeline::BwtSap};
  const auto rows = sweep(spec);
  const auto clean = rows.at({experiment::dataset_label(40, 100, 0.0, std::nullopt), "bwt-sap"});
  const auto noisy = rows.at({experiment::dataset_label(40, 100, 0.012, std::nullopt), "bwt-sap"});
  const double ratio = static_cast<double>(noisy.compressed_bytes) / static_cast<double>(clean.compressed_bytes);
  const double elapsed = seconds_since(t0);
  return {ratio >= 1.4 && ratio <= 3.0 && elapsed < 600,
          "error-free " + row_summary(clean) + ", 1.2% error " + row_summary(noisy) + ", ratio " + fmt(ratio) +
              ", time=" + fmt(elapsed, 1) + "s"};
}

Outcome length_trend() {
  const auto t0 = Clock::now();
  experiment::Spec spec;
  spec.coverages = {40};
  spec.read_lengths = {50, 100, 200, 400};
  spec.error_rates = {0.0};
  spec.pipelines = {experiment::Pipeline::BwtSap};
  const auto rows = sweep(spec);
  bool monotone = true;
  double previous = INFINITY;
  std::string detail;
  for (std::size_t len : spec.read_lengths) {
    const double bpb = rows.at({experiment::dataset_label(40, len, 0.0, std::nullopt), "bwt-sap"}).bpb;
    detail += "len" + std::to_string(len) + "=" + fmt(bpb, 4) + "bpb ";
    if (bpb > previous) monotone = false;
    previous = bpb;
  }
  const double elapsed = seconds_since(t0);
  return {monotone && elapsed < 900, detail + "time=" + fmt(elapsed, 1) + "s"};
}

Outcome trimming_benefit() {
  // The last 5 of 100 bases have quality 10 and a 40% substitution rate, so
  // 2% of all bases are errors and all of them sit in the low-quality tail.
  experiment::Spec spec;
  spec.coverages = {40};
  spec.read_lengths = {100};
  spec.error_rates = {0.0};
  spec.tail_length = 5;
  spec.tail_error_rate = 0.4;
  spec.pipelines = {experiment::Pipeline::BwtSap};
  const auto untrimmed = sweep(spec);
  spec.trim_threshold = 15;
  const auto trimmed = sweep(spec);
  const auto before = untrimmed.begin()->second;
  const auto after = trimmed.begin()->second;
  const double removed = 1.0 - static_cast<double>(after.input_bases) / static_cast<double>(before.input_bases);
  return {after.compressed_bytes < before.compressed_bytes,
          "untrimmed " + row_summary(before) + ", trimmed " + row_summary(after) + ", bases removed " +
              fmt(100 * removed, 2) + "%"};
}

struct ChildResult {
  int status = -1;
  long maxrss_kb = 0;
};

ChildResult spawn(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  argv.push_back(nullptr);
  const pid_t pid = fork();
  if (pid < 0) throw IoError("fork failed");
  if (pid == 0) {
    execv(argv[0], argv.data());
    _exit(127);
  }
  int status = 0;
  struct rusage usage {};
  if (wait4(pid, &status, 0, &usage) < 0) throw IoError("wait4 failed");
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, usage.ru_maxrss};
}

std::map<std::string, std::string> read_kv(const fs::path& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line))
    if (auto eq = line.find('='); eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  return out;
}

Outcome resource_contract(const std::string& cli, std::size_t reads) {
  const auto t0 = Clock::now();
  testing::TempDir dir;
  const std::string fasta = (dir / "reads.fa").string();
  // 40x over a reference of reads * 2.5 bases gives `reads` reads of 100 bp.
  const auto sim = spawn({cli, "simulate", "--reference-length", std::to_string(reads * 5 / 2), "--coverage", "40",
                          "--read-length", "100", "--seed", "9", "--format", "fasta", "--out", fasta});
  if (sim.status != 0) return {false, "simulate exited with " + std::to_string(sim.status)};
  const auto build = spawn({cli, "bwt", "--in", fasta, "--workdir", (dir / "w").string(), "--out",
                            (dir / "o.bwt").string(), "--sap", (dir / "o.sap").string(), "--stats-out",
                            (dir / "stats.txt").string()});
  if (build.status != 0) return {false, "bwt exited with " + std::to_string(build.status)};
  auto st = read_kv(dir / "stats.txt");
  const double limit_bytes = 64.0 * static_cast<double>(reads) + 256.0 * 1024 * 1024;
  const double rss_bytes = static_cast<double>(build.maxrss_kb) * 1024.0;
  const bool counts_ok = st["reads"] == std::to_string(reads) &&
                         fs::file_size(dir / "o.bwt") == reads * 101;
  const bool sequential = st["access_violations"] == "0" && st["partial_scans"] == "0" &&
                          !st["segment_bytes_read"].empty() &&
                          st["segment_bytes_read"] == st["expected_segment_bytes"];
  const double elapsed = seconds_since(t0);
  return {counts_ok && sequential && rss_bytes <= limit_bytes,
          std::to_string(reads) + " reads, maxrss " + fmt(rss_bytes / 1048576.0, 1) + " MiB (limit " +
              fmt(limit_bytes / 1048576.0, 1) + " MiB), access_violations=" + st["access_violations"] +
              " partial_scans=" + st["partial_scans"] + " segment_bytes_read=" + st["segment_bytes_read"] +
              " expected=" + st["expected_segment_bytes"] + ", time=" + fmt(elapsed, 1) + "s"};
}

Outcome codec_totality() {
  testing::Rng rng(777);
  std::size_t inputs = 0, round_trip_failures = 0, corruptions = 0, unstructured = 0, silent = 0;
  while (inputs < 10000) {
    std::string s;
    switch (rng.below(4)) {
      case 0: s = testing::random_symbols(rng, rng.between(1, 64), 1); break;
      case 1: s = testing::random_symbols(rng, rng.between(1, 4000), rng.between(1, 300)); break;
      case 2: s = std::string(rng.between(1, 70000), "$ACGNT"[rng.below(6)]); break;
      default: {
        const ReadCollection c(testing::random_reads(rng, 1, 30, 1, 40));
        s = oracle::bwt_sap(c).first.bytes;
      }
    }
    ++inputs;
    for (codec::Profile p : codec::kProfiles) {
      std::string blob;
      try {
        blob = codec::compress(s, p);
        if (codec::decompress(blob) != s) ++round_trip_failures;
      } catch (...) {
        ++round_trip_failures;
        continue;
      }
      for (int k = 0; k < 3; ++k) {
        std::string bad = blob;
        switch (rng.below(4)) {
          case 0: bad[rng.below(bad.size())] ^= static_cast<char>(1 << rng.below(8)); break;
          case 1: bad.resize(rng.below(bad.size())); break;
          case 2: bad.insert(rng.below(bad.size() + 1), 1, static_cast<char>(rng.below(256))); break;
          default:
            for (int n = 0; n < 4; ++n) bad[rng.below(bad.size())] = static_cast<char>(rng.below(256));
        }
        if (bad == blob) continue;
        ++corruptions;
        try {
          codec::decompress(bad);
          ++silent;
        } catch (const DataError&) {
        } catch (...) {
          ++unstructured;
        }
      }
    }
  }
  return {round_trip_failures == 0 && silent == 0 && unstructured == 0,
          std::to_string(inputs) + " inputs x 3 profiles, " + std::to_string(round_trip_failures) +
              " round-trip failures; " + std::to_string(corruptions) + " corrupted blobs, " +
              std::to_string(silent) + " accepted, " + std::to_string(unstructured) + " non-DataError"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> only;
  std::string cli = SEQBWT_CLI_PATH;
  std::size_t reads = 1000000;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--cli", cli, "seqbwt executable")->capture_default_str();
  app.add_option("--reads", reads, "Read count for the resource check")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  std::vector<std::vector<std::string>> suite;
  auto get_suite = [&]() -> const std::vector<std::vector<std::string>>& {
    if (suite.empty()) suite = random_suite();
    return suite;
  };

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked example conformance", worked_example},
      {"oracle equivalence", [&] { return oracle_equivalence(get_suite()); }},
      {"losslessness", [&] { return losslessness(get_suite()); }},
      {"RLO/SAP run bound", [&] { return run_bound(get_suite()); }},
      {"coverage trend", coverage_trend},
      {"error trend", error_trend},
      {"read-length trend", length_trend},
      {"trimming benefit", trimming_benefit},
      {"resource contract", [&] { return resource_contract(cli, reads); }},
      {"codec totality", codec_totality},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), number) == only.end()) continue;
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    all = all && outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " criterion " << number << " (" << criteria[i].first
              << "): " << outcome.detail << std::endl;
  }
  return all ? 0 : 1;
}
