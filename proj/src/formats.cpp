#include "seqbwt/formats.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <iterator>

#include "seqbwt/error.hpp"

namespace seqbwt {

namespace fs = std::filesystem;

AccessCounters& AccessCounters::operator+=(const AccessCounters& o) {
  files_opened += o.files_opened;
  bytes_read += o.bytes_read;
  bytes_written += o.bytes_written;
  bits_read += o.bits_read;
  bits_written += o.bits_written;
  partial_scans += o.partial_scans;
  return *this;
}

namespace detail {
FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  return f;
}
}  // namespace detail

// ---------------------------------------------------------------------------

ByteReader::ByteReader(const fs::path& path, AccessCounters* counters, std::size_t buffer_size)
    : path_(path),
      file_(detail::open_file(path, "rb")),
      counters_(counters) {
  std::error_code ec;
  size_ = fs::file_size(path, ec);
  if (ec) size_ = 0;
  buffer_.resize(std::max<std::uint64_t>(1, std::min<std::uint64_t>(buffer_size, size_)));
  if (counters_) ++counters_->files_opened;
}

ByteReader::~ByteReader() {
  if (counters_ && consumed_ < size_) ++counters_->partial_scans;
}

bool ByteReader::refill() {
  const std::size_t got = std::fread(buffer_.data(), 1, buffer_.size(), file_.get());
  if (got == 0 && std::ferror(file_.get()))
    throw IoError("read failed on " + path_.string() + ": " + std::strerror(errno));
  pos_ = 0;
  end_ = got;
  if (counters_) counters_->bytes_read += got;
  return got > 0;
}

// ---------------------------------------------------------------------------

ByteWriter::ByteWriter(const fs::path& path, AccessCounters* counters, std::size_t buffer_size)
    : path_(path),
      file_(detail::open_file(path, "wb")),
      counters_(counters),
      capacity_(buffer_size == 0 ? 1 : buffer_size),
      buffer_(new char[capacity_]) {
  if (counters_) ++counters_->files_opened;
}

ByteWriter::~ByteWriter() {
  try {
    close();
  } catch (...) {
  }
}

void ByteWriter::write(std::string_view bytes) {
  for (char c : bytes) put(c);
}

void ByteWriter::flush() {
  if (pos_ == 0) return;
  if (std::fwrite(buffer_.get(), 1, pos_, file_.get()) != pos_)
    throw IoError("write failed on " + path_.string() + ": " + std::strerror(errno));
  if (counters_) counters_->bytes_written += pos_;
  written_ += pos_;
  pos_ = 0;
}

void ByteWriter::close() {
  if (!file_) return;
  flush();
  std::FILE* f = file_.release();
  if (std::fclose(f) != 0)
    throw IoError("close failed on " + path_.string() + ": " + std::strerror(errno));
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t load_u64le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void store_u64le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

SapReader::SapReader(const fs::path& path, AccessCounters* counters, std::size_t buffer_size)
    : path_(path), bytes_(path, counters, buffer_size), counters_(counters) {
  unsigned char header[kSapHeaderSize];
  for (auto& h : header) {
    char c;
    if (!bytes_.next(c)) throw DataError(path.string() + ": truncated SAP header");
    h = static_cast<unsigned char>(c);
  }
  if (std::memcmp(header, kSapMagic, 4) != 0) throw DataError(path.string() + ": bad SAP magic");
  count_ = load_u64le(header + 4);
  if (bytes_.size() != kSapHeaderSize + (count_ + 7) / 8)
    throw DataError(path.string() + ": SAP file size does not match its bit count");
}

void SapReader::throw_truncated() const { throw DataError(path_.string() + ": truncated SAP bits"); }

SapWriter::SapWriter(const fs::path& path, std::uint64_t count, AccessCounters* counters,
                     std::size_t buffer_size)
    : path_(path), bytes_(path, counters, buffer_size), counters_(counters), count_(count) {
  std::string header(kSapMagic, 4);
  store_u64le(header, count);
  bytes_.write(header);
}

void SapWriter::close() {
  if (closed_) return;
  closed_ = true;
  if (written_ != count_)
    throw DataError(path_.string() + ": wrote " + std::to_string(written_) + " SAP bits, header says " +
                    std::to_string(count_));
  if (written_ & 7) bytes_.put(static_cast<char>(current_));
  bytes_.close();
  if (counters_) counters_->bits_written += written_;
}

// ---------------------------------------------------------------------------

std::string read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed on " + path.string());
  return data;
}

void write_file_bytes(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on " + path.string());
}

BwtString read_bwt_file(const fs::path& path) { return BwtString{read_file_bytes(path)}; }

void write_bwt_file(const fs::path& path, const BwtString& bwt) { write_file_bytes(path, bwt.bytes); }

std::string encode_sap(const SapArray& sap) {
  std::string out(kSapMagic, 4);
  store_u64le(out, sap.bits.size());
  unsigned current = 0;
  for (std::size_t i = 0; i < sap.bits.size(); ++i) {
    if (sap.bits[i]) current |= 1u << (i & 7);
    if ((i & 7) == 7) {
      out.push_back(static_cast<char>(current));
      current = 0;
    }
  }
  if (sap.bits.size() & 7) out.push_back(static_cast<char>(current));
  return out;
}

SapArray decode_sap(std::string_view bytes) {
  if (bytes.size() < kSapHeaderSize) throw DataError("truncated SAP header");
  if (std::memcmp(bytes.data(), kSapMagic, 4) != 0) throw DataError("bad SAP magic");
  const std::uint64_t count = load_u64le(reinterpret_cast<const unsigned char*>(bytes.data() + 4));
  if (count > (bytes.size() - kSapHeaderSize) * 8 ||
      bytes.size() - kSapHeaderSize != (count + 7) / 8)
    throw DataError("SAP payload length does not match its bit count");
  SapArray sap;
  sap.bits.resize(count);
  for (std::uint64_t i = 0; i < count; ++i)
    sap.bits[i] = (static_cast<unsigned char>(bytes[kSapHeaderSize + i / 8]) >> (i & 7)) & 1u;
  return sap;
}

SapArray read_sap_file(const fs::path& path) { return decode_sap(read_file_bytes(path)); }

void write_sap_file(const fs::path& path, const SapArray& sap) {
  write_file_bytes(path, encode_sap(sap));
}

}  // namespace seqbwt
