#include "seqbwt/oracle.hpp"

#include <algorithm>
#include <numeric>

namespace seqbwt::oracle {

bool suffix_less(const SuffixRecord& a, const SuffixRecord& b) noexcept {
  if (const int c = a.key.compare(b.key); c != 0) return c < 0;
  return a.read_index < b.read_index;
}

std::vector<SuffixRecord> sorted_suffixes(const ReadCollection& collection) {
  std::vector<SuffixRecord> records;
  records.reserve(collection.total_length() + collection.size());
  for (std::size_t r = 0; r < collection.size(); ++r) {
    const std::string_view read = collection[r];
    for (std::size_t start = 0; start <= read.size(); ++start) {
      const char preceding = start == 0 ? alphabet::kSentinel : read[start - 1];
      records.push_back({r + 1, start, read.substr(start), preceding});
    }
  }
  std::sort(records.begin(), records.end(), suffix_less);
  return records;
}

namespace {

std::pair<BwtString, SapArray> assemble(const std::vector<SuffixRecord>& records,
                                        std::size_t max_length) {
  BwtString bwt;
  SapArray sap;
  const SuffixRecord* previous = nullptr;
  for (const auto& rec : records) {
    if (rec.key.size() > max_length) continue;
    bwt.bytes.push_back(rec.preceding);
    sap.bits.push_back(previous != nullptr && previous->key == rec.key);
    previous = &rec;
  }
  return {std::move(bwt), std::move(sap)};
}

}  // namespace

std::pair<BwtString, SapArray> bwt_sap(const ReadCollection& collection) {
  return assemble(sorted_suffixes(collection), collection.max_length());
}

std::pair<BwtString, SapArray> partial_bwt_sap(const ReadCollection& collection,
                                               std::size_t max_length) {
  return assemble(sorted_suffixes(collection), max_length);
}

std::vector<std::size_t> rlo_permutation(const ReadCollection& collection) {
  std::vector<std::size_t> order(collection.size());
  std::iota(order.begin(), order.end(), std::size_t{1});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const std::string& ra = collection[a - 1];
    const std::string& rb = collection[b - 1];
    return std::lexicographical_compare(ra.rbegin(), ra.rend(), rb.rbegin(), rb.rend());
  });
  return order;
}

}  // namespace seqbwt::oracle
