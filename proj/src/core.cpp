#include "seqbwt/core.hpp"

#include <algorithm>

#include "seqbwt/error.hpp"

namespace seqbwt {

std::optional<std::size_t> normalize_bases(std::string& bases) {
  for (std::size_t i = 0; i < bases.size(); ++i) {
    char& c = bases[i];
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    if (!alphabet::is_base(c)) return i;
  }
  return std::nullopt;
}

ReadCollection::ReadCollection(std::vector<std::string> reads) : reads_(std::move(reads)) {
  for (std::size_t r = 0; r < reads_.size(); ++r) {
    const std::string& read = reads_[r];
    if (read.empty()) throw DataError("read " + std::to_string(r + 1) + " is empty");
    for (std::size_t i = 0; i < read.size(); ++i) {
      if (!alphabet::is_base(read[i]))
        throw DataError("read " + std::to_string(r + 1) + ": invalid base at offset " +
                        std::to_string(i));
    }
    total_length_ += read.size();
    max_length_ = std::max(max_length_, read.size());
  }
}

std::size_t BwtString::sentinel_count() const noexcept {
  return static_cast<std::size_t>(std::count(bytes.begin(), bytes.end(), alphabet::kSentinel));
}

SapArray SapArray::from_string(std::string_view digits) {
  SapArray sap;
  for (char c : digits) {
    if (c == '0') sap.bits.push_back(false);
    else if (c == '1') sap.bits.push_back(true);
  }
  return sap;
}

std::string SapArray::to_string() const {
  std::string out;
  out.reserve(bits.size());
  for (bool b : bits) out.push_back(b ? '1' : '0');
  return out;
}

RunList runs(std::string_view bytes) {
  RunList out;
  for (char c : bytes) {
    if (!out.empty() && out.back().symbol == c) ++out.back().length;
    else out.push_back({c, 1});
  }
  return out;
}

std::size_t count_runs(std::string_view bytes) noexcept {
  if (bytes.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t i = 1; i < bytes.size(); ++i) n += bytes[i] != bytes[i - 1];
  return n;
}

std::vector<Interval> sap_intervals(const SapArray& sap) {
  std::vector<Interval> out;
  if (sap.bits.empty()) return out;
  if (sap.bits[0]) throw DataError("malformed SAP-array: bit 0 is set");
  std::size_t start = 0;
  for (std::size_t i = 1; i < sap.bits.size(); ++i) {
    if (!sap.bits[i]) {
      out.push_back({start, i});
      start = i;
    }
  }
  out.push_back({start, sap.bits.size()});
  return out;
}

ValidationReport validate(const BwtString& bwt, std::size_t m) {
  std::size_t sentinels = 0;
  for (std::size_t i = 0; i < bwt.bytes.size(); ++i) {
    const char c = bwt.bytes[i];
    if (!alphabet::is_symbol(c))
      return {false, i, "byte outside the alphabet at offset " + std::to_string(i)};
    if (c == alphabet::kSentinel && ++sentinels > m)
      return {false, i, "more than " + std::to_string(m) + " end markers (offset " +
                            std::to_string(i) + ")"};
  }
  if (sentinels != m)
    return {false, bwt.bytes.size(),
            "expected " + std::to_string(m) + " end markers, found " + std::to_string(sentinels)};
  return {};
}

}  // namespace seqbwt
