#pragma once

// Shared helpers for the unit tests: seeded generators and a scratch
// directory. Nothing here depends on the library's own algorithms.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Bases drawn from ACGT, with N at the given rate.
inline std::string random_read(Rng& rng, std::size_t length, double n_rate = 0.05) {
  static constexpr char kAcgt[] = {'A', 'C', 'G', 'T'};
  std::string s(length, 'A');
  for (auto& c : s) c = rng.chance(n_rate) ? 'N' : kAcgt[rng.below(4)];
  return s;
}

/// Random read set. Some reads are copies of earlier ones or share their
/// tails, so duplicate reads and duplicate suffixes both occur.
inline std::vector<std::string> random_reads(Rng& rng, std::size_t min_m, std::size_t max_m,
                                             std::size_t min_len, std::size_t max_len, double n_rate = 0.05) {
  const std::size_t m = rng.between(min_m, max_m);
  std::vector<std::string> reads;
  reads.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t len = rng.between(min_len, max_len);
    if (!reads.empty() && rng.chance(0.15)) {
      reads.push_back(reads[rng.below(reads.size())]);
    } else if (!reads.empty() && rng.chance(0.25)) {
      const std::string& donor = reads[rng.below(reads.size())];
      const std::size_t keep = rng.between(1, std::min(donor.size(), len));
      reads.push_back(random_read(rng, len - keep, n_rate) + donor.substr(donor.size() - keep));
    } else {
      reads.push_back(random_read(rng, len, n_rate));
    }
  }
  return reads;
}

/// Random string over $ACGNT.
inline std::string random_symbols(Rng& rng, std::size_t length, std::size_t max_run = 1) {
  static constexpr char kSymbols[] = {'$', 'A', 'C', 'G', 'N', 'T'};
  std::string s;
  while (s.size() < length) s.append(std::min(length - s.size(), rng.between(1, max_run)), kSymbols[rng.below(6)]);
  return s;
}

/// BWT and SAP bits built by sorting integer-coded suffixes: the end marker
/// of read i is coded as i and base b as m + position of b in "ACGNT", so
/// plain lexicographic comparison yields the collection order.
inline std::pair<std::string, std::vector<bool>> brute_force_bwt(const std::vector<std::string>& reads) {
  const int m = static_cast<int>(reads.size());
  struct Suffix {
    std::vector<int> key;
    char preceding;
  };
  std::vector<Suffix> all;
  for (int i = 0; i < m; ++i) {
    const std::string& r = reads[i];
    for (std::size_t start = 0; start <= r.size(); ++start) {
      Suffix s;
      for (std::size_t k = start; k < r.size(); ++k)
        s.key.push_back(m + static_cast<int>(std::string_view("ACGNT").find(r[k])));
      s.key.push_back(i);
      s.preceding = start == 0 ? '$' : r[start - 1];
      all.push_back(std::move(s));
    }
  }
  std::sort(all.begin(), all.end(), [](const Suffix& a, const Suffix& b) { return a.key < b.key; });
  std::string bwt;
  std::vector<bool> sap;
  for (std::size_t i = 0; i < all.size(); ++i) {
    bwt.push_back(all[i].preceding);
    bool same = false;
    if (i > 0) {
      const auto& a = all[i - 1].key;
      const auto& b = all[i].key;
      same = a.size() == b.size() && std::equal(a.begin(), a.end() - 1, b.begin());
    }
    sap.push_back(same);
  }
  return {bwt, sap};
}

inline std::size_t naive_runs(std::string_view s) {
  std::size_t runs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (i == 0 || s[i] != s[i - 1]) ++runs;
  return runs;
}

/// Directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::string templ = (std::filesystem::temp_directory_path() / "seqbwt-test.XXXXXX").string();
    if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
    path_ = templ;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline const std::vector<std::string> kExampleReads = {"TAGACCT", "GATACCT", "TACCACT", "GAGACCT"};

}  // namespace testing
