#include "seqbwt/reorder.hpp"

#include <algorithm>
#include <numeric>

#include "seqbwt/error.hpp"
#include "seqbwt/formats.hpp"

namespace seqbwt::reorder {

namespace detail {
void bad_symbol(std::uint64_t position) {
  throw DataError("byte outside the alphabet at BWT offset " + std::to_string(position));
}
void bad_first_bit() { throw DataError("malformed SAP-array: bit 0 is set"); }
}  // namespace detail

BwtString sap_permute(const BwtString& bwt, const SapArray& sap, Strategy strategy) {
  if (bwt.size() != sap.size())
    throw DataError("BWT has " + std::to_string(bwt.size()) + " symbols but SAP-array has " +
                    std::to_string(sap.size()) + " bits");
  BwtString out;
  out.bytes.reserve(bwt.size());
  SapPermuter permuter(strategy, [&](char c) { out.bytes.push_back(c); });
  for (std::size_t i = 0; i < bwt.size(); ++i) permuter.push(bwt.bytes[i], sap.bits[i]);
  permuter.finish();
  return out;
}

void sap_permute_files(const std::filesystem::path& bwt_in, const std::filesystem::path& sap_in,
                       const std::filesystem::path& bwt_out, Strategy strategy) {
  ByteReader bwt(bwt_in);
  SapReader sap(sap_in);
  if (bwt.size() != sap.count())
    throw DataError("BWT has " + std::to_string(bwt.size()) + " symbols but SAP-array has " +
                    std::to_string(sap.count()) + " bits");
  ByteWriter out(bwt_out);
  SapPermuter permuter(strategy, [&](char c) { out.put(c); });
  char c;
  bool bit;
  while (bwt.next(c)) {
    if (!sap.next(bit)) throw DataError("SAP stream ended early");
    permuter.push(c, bit);
  }
  permuter.finish();
  out.close();
}

std::vector<std::size_t> rlo_order(const std::vector<std::string>& reads) {
  std::vector<std::size_t> order(reads.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(reads[a].rbegin(), reads[a].rend(), reads[b].rbegin(),
                                        reads[b].rend());
  });
  return order;
}

ReadCollection rlo_sort(const ReadCollection& collection) {
  std::vector<std::string> sorted;
  sorted.reserve(collection.size());
  for (std::size_t i : rlo_order(collection.reads())) sorted.push_back(collection[i]);
  return ReadCollection(std::move(sorted));
}

RunStats run_stats(const BwtString& bwt, const SapArray* sap) {
  RunStats stats;
  stats.length = bwt.size();
  stats.runs = count_runs(bwt.bytes);
  stats.mean_run_length = stats.runs ? static_cast<double>(stats.length) / static_cast<double>(stats.runs) : 0.0;
  if (sap == nullptr) return stats;

  if (sap->size() != bwt.size())
    throw DataError("BWT and SAP-array lengths differ");
  stats.has_intervals = true;
  for (const Interval& iv : sap_intervals(*sap)) {
    std::uint32_t runs = 0;
    bool seen[256] = {};
    std::uint8_t phi = 0;
    for (std::size_t i = iv.start; i < iv.end; ++i) {
      const char c = bwt.bytes[i];
      if (i == iv.start || c != bwt.bytes[i - 1]) ++runs;
      auto& s = seen[static_cast<unsigned char>(c)];
      if (!s) {
        s = true;
        ++phi;
      }
    }
    ++stats.intervals;
    stats.mixed_intervals += phi > 1;
    stats.interval_runs_total += runs;
    stats.phi_total += phi;
    stats.bound_violations += runs > phi;
    stats.interval_runs.push_back(runs);
    stats.interval_phi.push_back(phi);
  }
  return stats;
}

}  // namespace seqbwt::reorder
