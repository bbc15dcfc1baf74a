#include "seqbwt/codec.hpp"

#include <sys/wait.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <queue>

#include "seqbwt/core.hpp"
#include "seqbwt/error.hpp"

namespace seqbwt::codec {

Profile parse_profile(std::string_view name) {
  for (Profile p : kProfiles)
    if (profile_name(p) == name) return p;
  throw UsageError("unknown codec profile '" + std::string(name) + "'");
}

std::string_view profile_name(Profile profile) {
  switch (profile) {
    case Profile::RawHuff: return "raw-huff";
    case Profile::RleHuff: return "rle-huff";
    case Profile::MtfRleHuff: return "mtf-rle-huff";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Varints and runs

void put_varint(std::vector<std::uint8_t>& out, std::uint64_t value) {
  while (value >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(value | 0x80));
    value >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(value));
}

std::uint64_t get_varint(std::span<const std::uint8_t> in, std::size_t& pos) {
  std::uint64_t value = 0;
  for (unsigned shift = 0; shift < 64; shift += 7) {
    if (pos >= in.size()) throw DataError("truncated varint");
    const std::uint8_t byte = in[pos++];
    if (shift == 63 && byte > 1) throw DataError("varint overflows 64 bits");
    value |= static_cast<std::uint64_t>(byte & 0x7f) << shift;
    if ((byte & 0x80) == 0) return value;
  }
  throw DataError("varint longer than 10 bytes");
}

std::vector<std::uint8_t> rle_encode(std::string_view bytes) {
  std::vector<std::uint8_t> out;
  for (const Run& run : runs(bytes)) {
    out.push_back(static_cast<std::uint8_t>(run.symbol));
    put_varint(out, run.length);
  }
  return out;
}

namespace {

template <typename OnRun>
void for_each_run(std::span<const std::uint8_t> tokens, OnRun&& on_run) {
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    const auto symbol = static_cast<char>(tokens[pos++]);
    const std::uint64_t length = get_varint(tokens, pos);
    if (length == 0) throw DataError("zero-length run in token stream");
    on_run(symbol, length);
  }
}

}  // namespace

std::string rle_decode(std::span<const std::uint8_t> tokens) {
  std::string out;
  for_each_run(tokens, [&](char symbol, std::uint64_t length) { out.append(length, symbol); });
  return out;
}

std::size_t rle_token_count(std::span<const std::uint8_t> tokens) {
  std::size_t n = 0;
  for_each_run(tokens, [&](char, std::uint64_t) { ++n; });
  return n;
}

// ---------------------------------------------------------------------------
// Move-to-front

std::vector<std::uint8_t> mtf_encode(std::string_view bytes) {
  std::array<char, alphabet::kSize> list = alphabet::kSymbols;
  std::vector<std::uint8_t> out;
  out.reserve(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const char c = bytes[i];
    const auto it = std::find(list.begin(), list.end(), c);
    if (it == list.end()) throw DataError("byte outside the alphabet at offset " + std::to_string(i));
    const auto index = static_cast<std::size_t>(it - list.begin());
    out.push_back(static_cast<std::uint8_t>(index));
    std::rotate(list.begin(), it, it + 1);
  }
  return out;
}

std::string mtf_decode(std::span<const std::uint8_t> indices) {
  std::array<char, alphabet::kSize> list = alphabet::kSymbols;
  std::string out;
  out.reserve(indices.size());
  for (std::uint8_t index : indices) {
    if (index >= list.size()) throw DataError("move-to-front index out of range");
    const auto it = list.begin() + index;
    out.push_back(*it);
    std::rotate(list.begin(), it, it + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Huffman

namespace {

std::vector<std::uint8_t> unlimited_lengths(std::span<const std::uint64_t> freq) {
  struct Node {
    std::uint64_t weight;
    std::uint32_t id;
  };
  auto heavier = [](const Node& a, const Node& b) {
    return a.weight != b.weight ? a.weight > b.weight : a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(heavier)> heap(heavier);
  std::vector<std::uint32_t> parent;
  for (std::uint32_t s = 0; s < freq.size(); ++s) {
    parent.push_back(0);
    if (freq[s] > 0) heap.push({freq[s], s});
  }
  std::vector<std::uint8_t> lengths(freq.size(), 0);
  if (heap.empty()) return lengths;
  if (heap.size() == 1) {
    lengths[heap.top().id] = 1;
    return lengths;
  }
  while (heap.size() > 1) {
    const Node a = heap.top();
    heap.pop();
    const Node b = heap.top();
    heap.pop();
    const auto id = static_cast<std::uint32_t>(parent.size());
    parent.push_back(0);
    parent[a.id] = id;
    parent[b.id] = id;
    heap.push({a.weight + b.weight, id});
  }
  const std::uint32_t root = heap.top().id;
  std::vector<std::uint32_t> depth(parent.size(), 0);
  for (std::uint32_t id = root; id-- > 0;) depth[id] = depth[parent[id]] + 1;
  for (std::uint32_t s = 0; s < freq.size(); ++s)
    if (freq[s] > 0) lengths[s] = static_cast<std::uint8_t>(std::min<std::uint32_t>(depth[s], 255));
  return lengths;
}

}  // namespace

std::vector<std::uint8_t> huffman_code_lengths(std::span<const std::uint64_t> frequencies,
                                               unsigned max_length) {
  std::vector<std::uint64_t> freq(frequencies.begin(), frequencies.end());
  for (;;) {
    auto lengths = unlimited_lengths(freq);
    const unsigned longest = lengths.empty() ? 0 : *std::max_element(lengths.begin(), lengths.end());
    if (longest <= max_length) return lengths;
    // Flatten the distribution and retry; present symbols stay present.
    for (auto& f : freq)
      if (f > 0) f = std::max<std::uint64_t>(1, f >> 1);
  }
}

void BitWriter::put(std::uint64_t value, unsigned count) {
  for (unsigned i = count; i-- > 0;) {
    acc_ = (acc_ << 1) | ((value >> i) & 1u);
    if (++pending_ == 8) {
      bytes_.push_back(static_cast<char>(acc_));
      acc_ = 0;
      pending_ = 0;
    }
  }
  bits_ += count;
}

std::string BitWriter::finish() {
  if (pending_ > 0) {
    bytes_.push_back(static_cast<char>(acc_ << (8 - pending_)));
    acc_ = 0;
    pending_ = 0;
  }
  return std::move(bytes_);
}

unsigned BitReader::bit() {
  if (pos_ >= bytes_.size() * 8) throw DataError("payload underrun");
  const unsigned b = (static_cast<unsigned char>(bytes_[pos_ / 8]) >> (7 - pos_ % 8)) & 1u;
  ++pos_;
  return b;
}

std::uint64_t BitReader::bits(unsigned count) {
  if (count > remaining()) throw DataError("payload underrun");
  std::uint64_t v = 0;
  for (unsigned i = 0; i < count; ++i) v = (v << 1) | bit();
  return v;
}

bool BitReader::at_padding() const noexcept {
  if (remaining() >= 8) return false;
  for (std::uint64_t p = pos_; p < bytes_.size() * 8; ++p)
    if ((static_cast<unsigned char>(bytes_[p / 8]) >> (7 - p % 8)) & 1u) return false;
  return true;
}

HuffmanEncoder::HuffmanEncoder(std::span<const std::uint8_t> lengths)
    : lengths_(lengths.begin(), lengths.end()), codes_(lengths.size(), 0) {
  std::vector<std::uint32_t> order;
  for (std::uint32_t s = 0; s < lengths_.size(); ++s)
    if (lengths_[s] > 0) order.push_back(s);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return lengths_[a] < lengths_[b]; });
  std::uint32_t code = 0;
  unsigned previous = 0;
  for (std::uint32_t s : order) {
    code <<= (lengths_[s] - previous);
    previous = lengths_[s];
    codes_[s] = code++;
  }
}

void HuffmanEncoder::encode(std::uint32_t symbol, BitWriter& out) const {
  out.put(codes_[symbol], lengths_[symbol]);
}

HuffmanDecoder::HuffmanDecoder(std::span<const std::uint8_t> lengths) : count_(kMaxCodeLength + 1, 0) {
  std::size_t present = 0;
  for (std::uint8_t len : lengths) {
    if (len > kMaxCodeLength) throw DataError("code length exceeds " + std::to_string(kMaxCodeLength));
    if (len > 0) {
      ++count_[len];
      ++present;
    }
  }
  if (present == 0) throw DataError("code table has no symbols");
  std::int64_t left = 1;
  for (unsigned len = 1; len <= kMaxCodeLength; ++len) {
    left = (left << 1) - count_[len];
    if (left < 0) throw DataError("over-subscribed code table");
  }
  if (left > 0 && !(present == 1 && count_[1] == 1)) throw DataError("incomplete code table");
  for (unsigned len = 1; len <= kMaxCodeLength; ++len)
    for (std::uint32_t s = 0; s < lengths.size(); ++s)
      if (lengths[s] == len) symbols_.push_back(s);
}

std::uint32_t HuffmanDecoder::decode(BitReader& in) const {
  std::int64_t code = 0;
  std::int64_t first = 0;
  std::int64_t index = 0;
  for (unsigned len = 1; len <= kMaxCodeLength; ++len) {
    code |= in.bit();
    const std::int64_t count = count_[len];
    if (code - first < count) return symbols_[static_cast<std::size_t>(index + code - first)];
    index += count;
    first = (first + count) << 1;
    code <<= 1;
  }
  throw DataError("invalid Huffman code in payload");
}

namespace {

std::vector<std::uint8_t> trimmed(std::vector<std::uint8_t> lengths) {
  while (!lengths.empty() && lengths.back() == 0) lengths.pop_back();
  return lengths;
}

}  // namespace

HuffmanBlock huffman_encode(std::span<const std::uint32_t> tokens, std::size_t alphabet_size) {
  if (tokens.empty()) throw DataError("cannot Huffman-code an empty token stream");
  std::vector<std::uint64_t> freq(alphabet_size, 0);
  for (auto t : tokens) {
    if (t >= alphabet_size) throw DataError("token outside the code alphabet");
    ++freq[t];
  }
  HuffmanBlock block;
  block.lengths = trimmed(huffman_code_lengths(freq));
  const HuffmanEncoder encoder(block.lengths);
  BitWriter out;
  for (auto t : tokens) encoder.encode(t, out);
  block.payload_bits = out.bit_count();
  block.payload = out.finish();
  return block;
}

std::vector<std::uint32_t> huffman_decode(const HuffmanBlock& block, std::size_t count) {
  const HuffmanDecoder decoder(block.lengths);
  BitReader in(block.payload);
  if (count > in.remaining()) throw DataError("payload underrun");
  std::vector<std::uint32_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(decoder.decode(in));
  return out;
}

// ---------------------------------------------------------------------------
// Container

namespace {

constexpr std::size_t kSymbolSlots = alphabet::kSize;
constexpr std::size_t kBuckets = 65;
constexpr std::size_t kRunTokens = kBuckets * kSymbolSlots;

std::size_t bucket_of(std::uint64_t length) {
  if (length <= 3) return static_cast<std::size_t>(length - 1);
  return static_cast<std::size_t>(std::bit_width(length));  // floor(log2) + 1
}

unsigned extra_bits(std::size_t bucket) { return bucket < 3 ? 0 : static_cast<unsigned>(bucket - 1); }

std::uint64_t bucket_base(std::size_t bucket) {
  return bucket < 3 ? bucket + 1 : std::uint64_t{1} << (bucket - 1);
}

void store_le(std::string& out, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t load_le(std::string_view in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[pos + i]);
  return v;
}

struct RunToken {
  std::uint32_t token;
  std::uint64_t length;
};

std::string encode_tokens(std::span<const std::uint32_t> tokens, std::size_t alphabet_size,
                          std::span<const RunToken> runs, std::uint64_t original_length, Profile profile) {
  std::vector<std::uint64_t> freq(alphabet_size, 0);
  for (auto t : tokens) ++freq[t];
  const std::vector<std::uint8_t> lengths = trimmed(huffman_code_lengths(freq));
  const HuffmanEncoder encoder(lengths);
  BitWriter payload;
  if (runs.empty()) {
    for (auto t : tokens) encoder.encode(t, payload);
  } else {
    for (const RunToken& r : runs) {
      encoder.encode(r.token, payload);
      const std::size_t bucket = r.token / kSymbolSlots;
      payload.put(r.length - bucket_base(bucket), extra_bits(bucket));
    }
  }
  std::string blob(kBlobMagic, 4);
  blob.push_back(static_cast<char>(profile));
  store_le(blob, original_length, 8);
  store_le(blob, lengths.size(), 2);
  blob.append(lengths.begin(), lengths.end());
  blob += payload.finish();
  store_le(blob, crc32(blob), 4);
  return blob;
}

}  // namespace

std::uint32_t crc32(std::string_view bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  while (!bytes.empty()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size(), 1u << 30));
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), chunk);
    bytes.remove_prefix(chunk);
  }
  return static_cast<std::uint32_t>(crc);
}

std::string compress(std::string_view bytes, Profile profile) {
  if (bytes.empty()) throw DataError("cannot compress an empty stream");
  for (std::size_t i = 0; i < bytes.size(); ++i)
    if (!alphabet::is_symbol(bytes[i]))
      throw DataError("byte outside the alphabet at offset " + std::to_string(i));

  if (profile == Profile::RawHuff) {
    std::vector<std::uint32_t> tokens(bytes.size());
    for (std::size_t i = 0; i < bytes.size(); ++i) tokens[i] = static_cast<std::uint32_t>(alphabet::rank(bytes[i]));
    return encode_tokens(tokens, kSymbolSlots, {}, bytes.size(), profile);
  }
  if (profile != Profile::RleHuff && profile != Profile::MtfRleHuff)
    throw UsageError("unknown codec profile");

  std::vector<std::uint8_t> rle;
  if (profile == Profile::RleHuff) {
    rle = rle_encode(bytes);
  } else {
    const std::vector<std::uint8_t> mtf = mtf_encode(bytes);
    rle = rle_encode(std::string_view(reinterpret_cast<const char*>(mtf.data()), mtf.size()));
  }
  std::vector<RunToken> runs;
  std::vector<std::uint32_t> tokens;
  for_each_run(rle, [&](char symbol, std::uint64_t length) {
    const std::size_t slot = profile == Profile::RleHuff
                                 ? static_cast<std::size_t>(alphabet::rank(symbol))
                                 : static_cast<std::size_t>(static_cast<unsigned char>(symbol));
    const auto token = static_cast<std::uint32_t>(bucket_of(length) * kSymbolSlots + slot);
    runs.push_back({token, length});
    tokens.push_back(token);
  });
  return encode_tokens(tokens, kRunTokens, runs, bytes.size(), profile);
}

Profile blob_profile(std::string_view blob) {
  if (blob.size() < kBlobHeaderSize + kBlobTrailerSize) throw DataError("truncated blob header");
  if (std::memcmp(blob.data(), kBlobMagic, 4) != 0) throw DataError("bad blob magic");
  const auto p = static_cast<std::uint8_t>(blob[4]);
  if (p < 1 || p > 3) throw DataError("unknown profile byte " + std::to_string(p));
  return static_cast<Profile>(p);
}

std::string decompress(std::string_view blob) {
  const Profile profile = blob_profile(blob);
  // Checked first so a damaged header cannot drive a huge allocation.
  const auto checksum = static_cast<std::uint32_t>(load_le(blob, blob.size() - kBlobTrailerSize, 4));
  if (crc32(blob.substr(0, blob.size() - kBlobTrailerSize)) != checksum) throw DataError("checksum mismatch");
  const std::uint64_t original_length = load_le(blob, 5, 8);
  const std::size_t entries = load_le(blob, 13, 2);
  const std::size_t max_entries = profile == Profile::RawHuff ? kSymbolSlots : kRunTokens;
  if (entries == 0 || entries > max_entries)
    throw DataError("code table has " + std::to_string(entries) + " entries");
  if (blob.size() < kBlobHeaderSize + entries + kBlobTrailerSize) throw DataError("truncated code table");
  if (original_length == 0) throw DataError("blob declares an empty stream");
  const std::span<const std::uint8_t> lengths(reinterpret_cast<const std::uint8_t*>(blob.data()) + kBlobHeaderSize,
                                              entries);
  const HuffmanDecoder decoder(lengths);
  const std::string_view payload =
      blob.substr(kBlobHeaderSize + entries, blob.size() - kBlobHeaderSize - entries - kBlobTrailerSize);
  BitReader in(payload);

  std::string out;
  if (profile == Profile::RawHuff) {
    if (original_length > in.remaining()) throw DataError("payload underrun");
    out.reserve(original_length);
    for (std::uint64_t i = 0; i < original_length; ++i) out.push_back(alphabet::symbol(decoder.decode(in)));
  } else {
    std::vector<std::uint8_t> indices;
    std::uint64_t produced = 0;
    while (produced < original_length) {
      const std::uint32_t token = decoder.decode(in);
      const std::size_t slot = token % kSymbolSlots;
      const std::size_t bucket = token / kSymbolSlots;
      const std::uint64_t length = bucket_base(bucket) + in.bits(extra_bits(bucket));
      if (length > original_length - produced) throw DataError("run overruns the declared length");
      if (profile == Profile::RleHuff) out.append(length, alphabet::symbol(slot));
      else indices.insert(indices.end(), length, static_cast<std::uint8_t>(slot));
      produced += length;
    }
    if (profile == Profile::MtfRleHuff) out = mtf_decode(indices);
  }
  if (!in.at_padding()) throw DataError("trailing data after the payload");
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

std::uint64_t external_compress(std::string_view bytes, const std::string& command) {
  namespace fs = std::filesystem;
  std::string tmpl = (fs::temp_directory_path() / "seqbwt-ext-XXXXXX").string();
  const int fd = ::mkstemp(tmpl.data());
  if (fd < 0) throw IoError("cannot create a temporary file for the external compressor");
  struct Cleanup {
    std::string path;
    ~Cleanup() { std::remove(path.c_str()); }
  } cleanup{tmpl};
  std::size_t written = 0;
  while (written < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + written, bytes.size() - written);
    if (n <= 0) {
      ::close(fd);
      throw IoError("cannot write input for the external compressor");
    }
    written += static_cast<std::size_t>(n);
  }
  ::close(fd);

  const std::string shell = command + " < '" + tmpl + "'";
  std::FILE* pipe = ::popen(shell.c_str(), "r");
  if (!pipe) throw IoError("cannot start external compressor '" + command + "'");
  std::uint64_t size = 0;
  char buffer[1 << 16];
  std::size_t got;
  while ((got = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) size += got;
  const int status = ::pclose(pipe);
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    const int code = (status != -1 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    throw IoError("external compressor '" + command + "' failed (exit status " + std::to_string(code) +
                  (code == 127 ? ", program not found)" : ")"));
  }
  return size;
}

Metrics bits_per_base(std::uint64_t input_bases, std::uint64_t compressed_bits) {
  if (input_bases == 0) throw DataError("bits per base needs at least one input base");
  return {input_bases, compressed_bits,
          static_cast<double>(compressed_bits) / static_cast<double>(input_bases)};
}

}  // namespace seqbwt::codec
