#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "seqbwt/cli.hpp"
#include "seqbwt/formats.hpp"
#include "seqbwt/ingest.hpp"
#include "seqbwt/oracle.hpp"
#include "seqbwt/reorder.hpp"
#include "support.hpp"

using namespace seqbwt;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string fasta_of(const std::vector<std::string>& reads) {
  std::string s;
  for (std::size_t i = 0; i < reads.size(); ++i) s += ">r" + std::to_string(i + 1) + "\n" + reads[i] + "\n";
  return s;
}

std::vector<std::string> fasta_reads(const std::string& text) {
  std::istringstream in(text);
  return ingest::parse_fasta(in).reads();
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::string kv(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return "";
}

}  // namespace

TEST_CASE("bwt and permute on the example") {
  testing::TempDir dir;
  spit(dir / "reads.fa", fasta_of(testing::kExampleReads));
  const auto r = run({"bwt", "--in", (dir / "reads.fa").string(), "--workdir", (dir / "w").string(), "--out",
                      (dir / "f.bwt").string(), "--sap", (dir / "f.sap").string(), "--stats-out",
                      (dir / "st.txt").string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "f.bwt") == "TTTTTGTGCTGGCAAAACCACAA$$CCCC$A$");
  CHECK(read_sap_file(dir / "f.sap").to_string() == "0111" "00110010" "000110111" "0100" "0111000");
  const std::string st = slurp(dir / "st.txt");
  CHECK(kv(st, "reads") == "4");
  CHECK(kv(st, "access_violations") == "0");
  CHECK(kv(st, "partial_scans") == "0");
  CHECK(kv(st, "segment_bytes_read") == kv(st, "expected_segment_bytes"));

  const auto p = run({"permute", "--in", (dir / "f.bwt").string(), "--sap", (dir / "f.sap").string(), "--out", "-",
                      "--strategy", "sap-sort"});
  REQUIRE(p.code == 0);
  CHECK(p.out == "TTTTTGGTCGTGCAAAAACCCAA$$CCCC$A$");
  const auto none = run({"permute", "--in", (dir / "f.bwt").string(), "--out", "-", "--strategy", "none"});
  CHECK(none.out == "TTTTTGTGCTGGCAAAACCACAA$$CCCC$A$");
  CHECK(run({"permute", "--in", (dir / "f.bwt").string(), "--sap", (dir / "f.sap").string(), "--out", "-",
             "--strategy", "rlo"})
            .code == cli::kExitUsage);
  CHECK(run({"permute", "--in", (dir / "f.bwt").string(), "--out", "-", "--strategy", "sap-sort"}).code ==
        cli::kExitUsage);
}

TEST_CASE("bwt reads stdin and FASTQ") {
  testing::TempDir dir;
  const std::string fastq = "@a\nTAGACCT\n+\nIIIIIII\n@b\nGATACCT\n+\nIIIIIII\n";
  const auto r = run({"bwt", "--in", "-", "--workdir", (dir / "w").string(), "--out", "-", "--sap",
                      (dir / "s.sap").string()},
                     fastq);
  REQUIRE(r.code == 0);
  CHECK(r.out == oracle::bwt_sap(ReadCollection({"TAGACCT", "GATACCT"})).first.bytes);
}

TEST_CASE("rlo then bwt gives the permuted string") {
  testing::TempDir dir;
  spit(dir / "reads.fa", fasta_of(testing::kExampleReads));
  const auto r = run({"rlo", "--in", (dir / "reads.fa").string()});
  REQUIRE(r.code == 0);
  CHECK(fasta_reads(r.out) == std::vector<std::string>{"TACCACT", "GAGACCT", "TAGACCT", "GATACCT"});
  spit(dir / "rlo.fa", r.out);
  REQUIRE(run({"bwt", "--in", (dir / "rlo.fa").string(), "--workdir", (dir / "w").string(), "--out",
               (dir / "r.bwt").string(), "--sap", (dir / "r.sap").string()})
              .code == 0);
  CHECK(slurp(dir / "r.bwt") == "TTTTTGGTCGTGCAAAAACCCAA$$CCCC$A$");
}

TEST_CASE("compress, decompress and invert round trip for every strategy") {
  testing::TempDir dir;
  testing::Rng rng(71);
  const auto reads = testing::random_reads(rng, 30, 60, 5, 40);
  spit(dir / "reads.fa", fasta_of(reads));
  REQUIRE(run({"bwt", "--in", (dir / "reads.fa").string(), "--workdir", (dir / "w").string(), "--out",
               (dir / "a.bwt").string(), "--sap", (dir / "a.sap").string(), "--threads", "3"})
              .code == 0);
  for (std::string strategy : {"none", "sap-sort", "sap-runext"}) {
    CAPTURE(strategy);
    const auto permuted = (dir / ("p-" + strategy + ".bwt")).string();
    REQUIRE(run({"permute", "--in", (dir / "a.bwt").string(), "--sap", (dir / "a.sap").string(), "--out", permuted,
                 "--strategy", strategy})
                .code == 0);
    for (std::string profile : {"raw-huff", "rle-huff", "mtf-rle-huff"}) {
      const auto blob = (dir / "x.btc").string();
      REQUIRE(run({"compress", "--in", permuted, "--out", blob, "--profile", profile}).code == 0);
      const auto back = run({"decompress", "--in", blob, "--out", "-"});
      REQUIRE(back.code == 0);
      CHECK(back.out == slurp(permuted));
    }
    const auto inv = run({"invert", "--in", permuted, "--stride", "7"});
    REQUIRE(inv.code == 0);
    const auto recovered = fasta_reads(inv.out);
    CHECK(sorted(recovered) == sorted(reads));
    if (strategy == "none") CHECK(recovered == reads);
  }
}

TEST_CASE("streams through stdin and stdout") {
  const std::string bwt = "TTTTTGTGCTGGCAAAACCACAA$$CCCC$A$";
  const auto blob = run({"compress", "--in", "-", "--out", "-"}, bwt);
  REQUIRE(blob.code == 0);
  CHECK(blob.out.substr(0, 4) == "BTC1");
  CHECK(run({"decompress", "--in", "-", "--out", "-"}, blob.out).out == bwt);
  CHECK(fasta_reads(run({"invert", "--in", "-"}, bwt).out) == testing::kExampleReads);
}

TEST_CASE("trim") {
  const std::string fastq = "@a\nACGTA\n+\nIII&&\n@b\nAC\n+\n##\n@c\nGG\n+\nII\n";
  const auto r = run({"trim", "--in", "-"}, fastq);
  REQUIRE(r.code == 0);
  CHECK(r.out == "@a\nACG\n+\nIII\n@c\nGG\n+\nII\n");
  CHECK(!r.err.empty());
  const auto none = run({"trim", "--in", "-", "--threshold", "0"}, fastq);
  CHECK(none.out == fastq);
  CHECK(run({"trim", "--in", "-"}, ">a\nAC\n").code == cli::kExitData);
}

TEST_CASE("simulate") {
  testing::TempDir dir;
  const std::vector<std::string> args = {"simulate", "--reference-length", "1000", "--coverage", "5",
                                         "--read-length", "50", "--error", "0.01", "--seed", "4"};
  const auto a = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == run(args).out);
  std::istringstream in(a.out);
  const auto reads = ingest::parse_fastq(in);
  CHECK(reads.size() == 100);
  spit(dir / "ref.fa", ">ref\n" + ingest::random_reference(300, 1) + "\n");
  const auto f = run({"simulate", "--reference", (dir / "ref.fa").string(), "--coverage", "2", "--read-length",
                      "30", "--format", "fasta"});
  REQUIRE(f.code == 0);
  CHECK(fasta_reads(f.out).size() == 20);
  CHECK(run({"simulate", "--reference-length", "10", "--coverage", "1", "--read-length", "50"}).code ==
        cli::kExitData);
  CHECK(run({"simulate", "--coverage", "1", "--read-length", "50"}).code == cli::kExitUsage);
  CHECK(run({"simulate", "--reference", (dir / "ref.fa").string(), "--reference-length", "10", "--coverage", "1",
             "--read-length", "5"})
            .code == cli::kExitUsage);
}

TEST_CASE("stats") {
  testing::TempDir dir;
  spit(dir / "reads.fa", fasta_of(testing::kExampleReads));
  spit(dir / "f.bwt", "TTTTTGTGCTGGCAAAACCACAA$$CCCC$A$");
  const auto r = run({"stats", "--bwt", (dir / "f.bwt").string(), "--reads", (dir / "reads.fa").string(),
                      "--oracle"});
  REQUIRE(r.code == 0);
  CHECK(kv(r.out, "runs") == "18");
  CHECK(kv(r.out, "input_bases") == "28");
  CHECK(kv(r.out, "sentinels") == "4");
  CHECK(kv(r.out, "oracle_match") == "1");

  spit(dir / "bad.bwt", "TTTTTGGTCGTGCAAAAACCCAA$$CCCC$A$");
  const auto mismatch = run({"stats", "--bwt", (dir / "bad.bwt").string(), "--reads", (dir / "reads.fa").string(),
                             "--oracle"});
  CHECK(mismatch.code == cli::kExitData);
  CHECK(kv(mismatch.out, "oracle_match") == "0");

  const auto oracle_only = run({"stats", "--oracle", "--reads", (dir / "reads.fa").string()});
  REQUIRE(oracle_only.code == 0);
  CHECK(kv(oracle_only.out, "intervals") != "");
  CHECK(kv(oracle_only.out, "bound_violations") != "0");

  const auto csv = run({"stats", "--bwt", (dir / "f.bwt").string(), "--format", "csv", "--external", "cat"});
  REQUIRE(csv.code == 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "dataset,pipeline,input_bases,compressed_bytes,bpb");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].rfind("f,raw-huff,28,", 0) == 0);
  CHECK(rows[3] == "f,external,28,32,9.142857");

  setenv(cli::kExternalEnv, "cat", 1);
  const auto env = run({"stats", "--bwt", (dir / "f.bwt").string()});
  unsetenv(cli::kExternalEnv);
  CHECK(kv(env.out, "compressed_bytes.external") == "32");
  CHECK(run({"stats", "--bwt", (dir / "f.bwt").string(), "--external", "false"}).code == cli::kExitIo);
  CHECK(run({"stats", "--bwt", (dir / "f.bwt").string(), "--format", "xml"}).code == cli::kExitUsage);
}

TEST_CASE("experiment") {
  testing::TempDir dir;
  spit(dir / "spec.txt",
       "# small sweep\nreference_length = 3000\ncoverages = 5,10\nread_lengths = 50\nseed = 3\n");
  const std::vector<std::string> args = {"experiment", "--spec", (dir / "spec.txt").string(), "--workdir",
                                         dir.path().string()};
  const auto r = run(args);
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "dataset,pipeline,input_bases,compressed_bytes,bpb");
  std::vector<std::string> rows;
  while (std::getline(lines, line)) rows.push_back(line);
  CHECK(rows.size() == 2 * 4);
  CHECK(rows[0].rfind("cov5_len50_err0,raw,", 0) == 0);
  CHECK(run(args).out == r.out);

  const auto subset = run({"experiment", "--reference-length", "2000", "--coverages", "4", "--read-length", "40",
                           "--pipelines", "bwt,bwt-sap", "--trim", "15", "--workdir", dir.path().string()});
  REQUIRE(subset.code == 0);
  CHECK(subset.out.find("cov4_len40_err0_trim15,bwt-sap,") != std::string::npos);
  CHECK(subset.out.find(",raw,") == std::string::npos);

  CHECK(run({"experiment", "--pipelines", "gzip"}).code == cli::kExitUsage);
  spit(dir / "bad.txt", "colour = blue\n");
  CHECK(run({"experiment", "--spec", (dir / "bad.txt").string()}).code == cli::kExitUsage);
}

TEST_CASE("exit codes") {
  testing::TempDir dir;
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"bwt", "--in", "x.fa"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"invert", "--in", (dir / "missing.bwt").string()}).code == cli::kExitIo);
  CHECK(run({"invert", "--in", "-"}, "ACGT").code == cli::kExitData);
  CHECK(run({"decompress", "--in", "-", "--out", "-"}, "BTC1garbage").code == cli::kExitData);
  CHECK(run({"bwt", "--in", "-", "--workdir", (dir / "w").string(), "--out", (dir / "o").string(), "--sap",
             (dir / "s").string()},
            ">a\nACXT\n")
            .code == cli::kExitData);

  std::filesystem::create_directories(dir / "busy");
  spit(dir / "busy" / "f", "x");
  spit(dir / "r.fa", ">a\nACGT\n");
  CHECK(run({"bwt", "--in", (dir / "r.fa").string(), "--workdir", (dir / "busy").string(), "--out",
             (dir / "o").string(), "--sap", (dir / "s").string()})
            .code == cli::kExitIo);
}

TEST_CASE("inputs and outputs must be distinct") {
  testing::TempDir dir;
  spit(dir / "f.bwt", "A$");
  CHECK(run({"compress", "--in", (dir / "f.bwt").string(), "--out", (dir / "f.bwt").string()}).code ==
        cli::kExitUsage);
  CHECK(slurp(dir / "f.bwt") == "A$");
  spit(dir / "r.fa", ">a\nACGT\n");
  CHECK(run({"bwt", "--in", (dir / "r.fa").string(), "--workdir", (dir / "w").string(), "--out",
             (dir / "same").string(), "--sap", (dir / "same").string()})
            .code == cli::kExitUsage);
}
