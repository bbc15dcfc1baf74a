#include "seqbwt/invert.hpp"

#include <algorithm>

#include "seqbwt/error.hpp"

namespace seqbwt::invert {

OccTable::OccTable(const BwtString& bwt, std::size_t stride)
    : bwt_(bwt.bytes), stride_(std::max<std::size_t>(stride, 1)) {
  checkpoints_.reserve(bwt_.size() / stride_ + 1);
  std::array<std::uint64_t, alphabet::kSize> running{};
  for (std::size_t i = 0; i < bwt_.size(); ++i) {
    if (i % stride_ == 0) checkpoints_.push_back(running);
    const int r = alphabet::rank(bwt_[i]);
    if (r < 0) throw DataError("byte outside the alphabet at BWT offset " + std::to_string(i));
    ++running[r];
  }
  if (bwt_.size() % stride_ == 0) checkpoints_.push_back(running);
  totals_ = running;
  std::uint64_t sum = 0;
  for (std::size_t r = 0; r < alphabet::kSize; ++r) {
    smaller_[r] = sum;
    sum += totals_[r];
  }
}

std::uint64_t OccTable::occ(std::size_t r, std::size_t i) const {
  if (i > bwt_.size()) throw DataError("occ position " + std::to_string(i) + " out of range");
  const std::size_t block = i / stride_;
  std::uint64_t count = checkpoints_[block][r];
  const char c = alphabet::symbol(r);
  for (std::size_t k = block * stride_; k < i; ++k) count += bwt_[k] == c;
  return count;
}

std::size_t OccTable::lf(std::size_t i) const {
  if (i >= bwt_.size())
    throw DataError("LF position " + std::to_string(i) + " out of range (n=" +
                    std::to_string(bwt_.size()) + ")");
  const auto r = static_cast<std::size_t>(alphabet::rank(bwt_[i]));
  return smaller_[r] + occ(r, i);
}

std::size_t lf_map(const BwtString& bwt, std::size_t i) { return OccTable(bwt).lf(i); }

ReadCollection invert_bwt(const BwtString& bwt, const Options& options) {
  const OccTable table(bwt, options.checkpoint_stride);
  const std::uint64_t n = bwt.size();
  const std::uint64_t m = table.total(0);
  if (m == 0) throw DataError("BWT contains no end markers");

  struct Walk {
    std::uint64_t row;
    std::uint32_t read;
  };
  std::vector<Walk> live(m);
  for (std::uint64_t t = 0; t < m; ++t) live[t] = {t, static_cast<std::uint32_t>(t)};
  std::vector<std::string> reversed(m);
  std::uint64_t recovered = 0;

  for (std::uint64_t step = 0; !live.empty(); ++step) {
    if (step > n - m)
      throw DataError("walk for read " + std::to_string(live.front().read + 1) +
                      " did not terminate within " + std::to_string(n) + " steps");
    std::sort(live.begin(), live.end(), [](const Walk& a, const Walk& b) { return a.row < b.row; });

    // Running counts from the nearest checkpoint at or after the previous row.
    std::array<std::uint64_t, alphabet::kSize> counts{};
    std::size_t scanned = 0;
    std::size_t kept = 0;
    for (const Walk& w : live) {
      const std::size_t row = w.row;
      const std::size_t block_start = row / table.stride() * table.stride();
      if (block_start > scanned) {
        for (std::size_t r = 0; r < alphabet::kSize; ++r) counts[r] = table.occ(r, block_start);
        scanned = block_start;
      }
      for (; scanned < row; ++scanned) ++counts[alphabet::rank(bwt.bytes[scanned])];
      const char c = bwt.bytes[row];
      if (c == alphabet::kSentinel) {
        if (step == 0) throw DataError("read " + std::to_string(w.read + 1) + " is empty");
        continue;
      }
      const auto r = static_cast<std::size_t>(alphabet::rank(c));
      reversed[w.read].push_back(c);
      ++recovered;
      live[kept++] = Walk{table.smaller(r) + counts[r], w.read};
    }
    live.resize(kept);
  }

  if (recovered != n - m)
    throw DataError("walks recovered " + std::to_string(recovered) + " of " + std::to_string(n - m) +
                    " bases; input is not a collection BWT");
  for (auto& read : reversed) std::reverse(read.begin(), read.end());
  return ReadCollection(std::move(reversed));
}

void write_fasta(std::ostream& out, const ReadCollection& reads) {
  for (std::size_t i = 0; i < reads.size(); ++i) out << ">read_" << (i + 1) << '\n' << reads[i] << '\n';
}

}  // namespace seqbwt::invert
