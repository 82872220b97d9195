#include "sbc/bd_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>

namespace sbc {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[4] = {'S', 'B', 'C', '1'};
constexpr char kJournalMagic[4] = {'S', 'B', 'C', 'U'};
constexpr std::size_t kJournalEntryBytes = 4 + 4 + 8 + 8;

template <typename T>
void put_le(unsigned char* out, T value, std::size_t width = sizeof(T)) {
  auto v = static_cast<std::uint64_t>(value);
  for (std::size_t i = 0; i < width; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline std::uint64_t get_le(const unsigned char* in, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{in[i]} << (8 * i);
  return v;
}

// Little-endian hosts only.
template <typename Narrow>
void widen_column(const unsigned char* in, std::vector<PathCount>& out) {
  for (std::size_t v = 0; v < out.size(); ++v) {
    Narrow x;
    std::memcpy(&x, in + v * sizeof(Narrow), sizeof(Narrow));
    out[v] = x;
  }
}

[[noreturn]] void io_error(const std::string& what, const std::string& path) {
  throw Error(what + " " + path + ": " + std::strerror(errno));
}

void full_pread(int fd, void* buf, std::size_t len, std::uint64_t offset, const std::string& path) {
  auto* p = static_cast<unsigned char*>(buf);
  while (len > 0) {
    ssize_t got = ::pread(fd, p, len, static_cast<off_t>(offset));
    if (got < 0) {
      if (errno == EINTR) continue;
      io_error("read failed on", path);
    }
    if (got == 0) throw FormatError("truncated store file " + path);
    p += got;
    len -= static_cast<std::size_t>(got);
    offset += static_cast<std::uint64_t>(got);
  }
}

void full_pwrite(int fd, const void* buf, std::size_t len, std::uint64_t offset,
                 const std::string& path) {
  const auto* p = static_cast<const unsigned char*>(buf);
  while (len > 0) {
    ssize_t put = ::pwrite(fd, p, len, static_cast<off_t>(offset));
    if (put < 0) {
      if (errno == EINTR) continue;
      io_error("write failed on", path);
    }
    p += put;
    len -= static_cast<std::size_t>(put);
    offset += static_cast<std::uint64_t>(put);
  }
}

void full_write(int fd, const void* buf, std::size_t len, const std::string& path) {
  const auto* p = static_cast<const unsigned char*>(buf);
  while (len > 0) {
    ssize_t put = ::write(fd, p, len);
    if (put < 0) {
      if (errno == EINTR) continue;
      io_error("write failed on", path);
    }
    p += put;
    len -= static_cast<std::size_t>(put);
  }
}

int open_or_throw(const std::string& path, int flags) {
  int fd = ::open(path.c_str(), flags | O_CLOEXEC, 0644);
  if (fd < 0) io_error("cannot open", path);
  return fd;
}

std::uint64_t sigma_limit(std::uint8_t width) {
  return width >= 8 ? ~std::uint64_t{0} : (std::uint64_t{1} << (8 * width)) - 1;
}

void validate(const StoreHeader& h) {
  if (h.sigma_width != 2 && h.sigma_width != 4 && h.sigma_width != 8) {
    throw FormatError("sigma width must be 2, 4 or 8, got " + std::to_string(h.sigma_width));
  }
  if (!(h.lo < h.hi && h.hi <= h.n)) {
    throw FormatError("bad source range [" + std::to_string(h.lo) + "," + std::to_string(h.hi) +
                      ") for n=" + std::to_string(h.n));
  }
}

}  // namespace

void encode_header(const StoreHeader& h, unsigned char* out) {
  std::memcpy(out, kMagic, 4);
  put_le(out + 4, h.version);
  out[6] = h.sigma_width;
  out[7] = 0;
  put_le(out + 8, h.n);
  put_le(out + 16, h.lo);
  put_le(out + 24, h.hi);
}

StoreHeader decode_header(const unsigned char* bytes, std::size_t len) {
  if (len < StoreHeader::kSize) throw FormatError("store header truncated");
  if (std::memcmp(bytes, kMagic, 4) != 0) throw FormatError("bad store magic");
  StoreHeader h;
  h.version = static_cast<std::uint16_t>(get_le(bytes + 4, 2));
  if (h.version != StoreHeader::kVersion) {
    throw FormatError("unsupported store version " + std::to_string(h.version));
  }
  h.sigma_width = bytes[6];
  h.n = get_le(bytes + 8, 8);
  h.lo = get_le(bytes + 16, 8);
  h.hi = get_le(bytes + 24, 8);
  validate(h);
  return h;
}

// ---------------------------------------------------------------------------

BdStore::BdStore(std::string path, int fd, StoreHeader header)
    : path_(std::move(path)), fd_(fd), header_(header) {}

BdStore::BdStore(BdStore&& other) noexcept { *this = std::move(other); }

BdStore& BdStore::operator=(BdStore&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    if (journal_fd_ >= 0) ::close(journal_fd_);
    path_ = std::move(other.path_);
    fd_ = std::exchange(other.fd_, -1);
    header_ = other.header_;
    buffer_ = std::move(other.buffer_);
    distance_buffer_ = std::move(other.distance_buffer_);
    block_source_ = std::exchange(other.block_source_, std::nullopt);
    io_ = other.io_;
    journal_fd_ = std::exchange(other.journal_fd_, -1);
    journal_buffer_ = std::move(other.journal_buffer_);
  }
  return *this;
}

BdStore::~BdStore() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
  if (fd_ >= 0) ::close(fd_);
}

BdStore BdStore::create(const std::string& path, std::uint64_t n, std::uint64_t lo,
                        std::uint64_t hi, std::uint8_t sigma_width, const BlockSource& fill) {
  StoreHeader h;
  h.sigma_width = sigma_width;
  h.n = n;
  h.lo = lo;
  h.hi = hi;
  validate(h);

  // Build under a temporary name so a failed create leaves nothing behind.
  const std::string tmp = path + ".tmp";
  int fd = open_or_throw(tmp, O_RDWR | O_CREAT | O_TRUNC);
  BdStore store(tmp, fd, h);
  try {
    unsigned char raw[StoreHeader::kSize];
    encode_header(h, raw);
    store.write_at(0, raw, sizeof raw);
    SourceData data;
    for (std::uint64_t s = lo; s < hi; ++s) {
      fill(VertexId(s), data);
      store.write_source_in_place(VertexId(s), data);
    }
    if (::ftruncate(fd, static_cast<off_t>(h.file_size())) != 0) io_error("cannot size", tmp);
  } catch (...) {
    ::unlink(tmp.c_str());
    throw;
  }
  fs::rename(tmp, path);
  store.path_ = path;
  return store;
}

BdStore BdStore::open(const std::string& path) {
  int fd = open_or_throw(path, O_RDWR);
  unsigned char raw[StoreHeader::kSize];
  ssize_t got = ::pread(fd, raw, sizeof raw, 0);
  if (got < 0) {
    ::close(fd);
    io_error("cannot read", path);
  }
  StoreHeader h;
  try {
    h = decode_header(raw, static_cast<std::size_t>(got));
    const auto size = static_cast<std::uint64_t>(::lseek(fd, 0, SEEK_END));
    if (size < h.file_size()) {
      throw FormatError("truncated store file " + path + ": " + std::to_string(size) + " < " +
                        std::to_string(h.file_size()) + " bytes");
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  return BdStore(path, fd, h);
}

void BdStore::check_source(VertexId s) const {
  if (s < header_.lo || s >= header_.hi) {
    throw InvalidArgument("source " + std::to_string(s) + " outside store range [" +
                          std::to_string(header_.lo) + "," + std::to_string(header_.hi) + ")");
  }
}

void BdStore::read_at(std::uint64_t offset, void* buf, std::size_t len) {
  full_pread(fd_, buf, len, offset, path_);
  io_.bytes_read += len;
}

void BdStore::write_at(std::uint64_t offset, const void* buf, std::size_t len) {
  full_pwrite(fd_, buf, len, offset, path_);
  io_.bytes_written += len;
}

void BdStore::read_distances(VertexId s, std::vector<Distance>& out) {
  check_source(s);
  const std::size_t n = header_.n;
  distance_buffer_.resize(n);
  read_at(header_.offset(s), distance_buffer_.data(), n);
  ++io_.distance_reads;
  out.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    out[v] = distance_buffer_[v] == kUnreachableByte ? kUnreachable : distance_buffer_[v];
  }
}

std::vector<Distance> BdStore::read_distances(VertexId s) {
  std::vector<Distance> out;
  read_distances(s, out);
  return out;
}

void BdStore::load_source(VertexId s, SourceData& out) {
  check_source(s);
  buffer_.resize(header_.block_bytes());
  block_source_.reset();
  read_at(header_.offset(s), buffer_.data(), buffer_.size());
  ++io_.block_reads;
  block_source_ = s;
  decode(out);
}

SourceData BdStore::load_source(VertexId s) {
  SourceData out;
  load_source(s, out);
  return out;
}

void BdStore::decode(SourceData& out) const {
  const std::size_t n = header_.n;
  const std::size_t w = header_.sigma_width;
  out.d.resize(n);
  out.sigma.resize(n);
  out.delta.resize(n);
  const unsigned char* dcol = buffer_.data();
  const unsigned char* scol = dcol + n;
  const unsigned char* xcol = scol + n * w;
  for (std::size_t v = 0; v < n; ++v) {
    out.d[v] = dcol[v] == kUnreachableByte ? kUnreachable : dcol[v];
  }
  if constexpr (std::endian::native == std::endian::little) {
    switch (w) {
      case 2: widen_column<std::uint16_t>(scol, out.sigma); break;
      case 4: widen_column<std::uint32_t>(scol, out.sigma); break;
      default: std::memcpy(out.sigma.data(), scol, n * 8); break;
    }
    std::memcpy(out.delta.data(), xcol, n * 8);
  } else {
    for (std::size_t v = 0; v < n; ++v) {
      out.sigma[v] = get_le(scol + v * w, w);
      out.delta[v] = std::bit_cast<double>(get_le(xcol + v * 8, 8));
    }
  }
}

void BdStore::encode_cell(VertexId s, const SourceData& data, std::size_t v) {
  const std::size_t n = header_.n;
  const std::size_t w = header_.sigma_width;
  unsigned char* dcol = buffer_.data();
  unsigned char* scol = dcol + n;
  unsigned char* xcol = scol + n * w;
  const Distance d = data.d[v];
  if (d == kUnreachable) {
    dcol[v] = kUnreachableByte;
  } else if (d > kMaxStoredDistance) {
    throw FormatError("distance " + std::to_string(d) + " from source " + std::to_string(s) +
                      " to vertex " + std::to_string(v) + " exceeds the 1-byte limit of " +
                      std::to_string(kMaxStoredDistance));
  } else {
    dcol[v] = static_cast<unsigned char>(d);
  }
  if (data.sigma[v] > sigma_limit(header_.sigma_width)) {
    throw FormatError("path count " + std::to_string(data.sigma[v]) + " from source " +
                      std::to_string(s) + " to vertex " + std::to_string(v) +
                      " overflows sigma width " + std::to_string(w));
  }
  put_le(scol + v * w, data.sigma[v], w);
  put_le(xcol + v * 8, std::bit_cast<std::uint64_t>(data.delta[v]));
}

void BdStore::encode(VertexId s, const SourceData& data) {
  const std::size_t n = header_.n;
  if (data.size() != n) {
    throw InvalidArgument("source " + std::to_string(s) + " has " + std::to_string(data.size()) +
                          " entries, store expects " + std::to_string(n));
  }
  block_source_.reset();
  buffer_.resize(header_.block_bytes());
  for (std::size_t v = 0; v < n; ++v) encode_cell(s, data, v);
  block_source_ = s;
}

void BdStore::write_source_in_place(VertexId s, const SourceData& data) {
  check_source(s);
  encode(s, data);
  write_at(header_.offset(s), buffer_.data(), buffer_.size());
  ++io_.block_writes;
}

// ---------------------------------------------------------------------------
// Journal

std::string BdStore::journal_path() const {
  if (const char* dir = std::getenv("SBC_STAGING_DIR"); dir && *dir) {
    return (fs::path(dir) / (fs::path(path_).filename().string() + ".undo")).string();
  }
  return path_ + ".undo";
}

void BdStore::begin_transaction(std::uint64_t sequence) {
  if (in_transaction()) throw Error("store " + path_ + " already has an open transaction");
  const std::string jp = journal_path();
  journal_fd_ = open_or_throw(jp, O_WRONLY | O_CREAT | O_TRUNC);
  unsigned char head[12];
  std::memcpy(head, kJournalMagic, 4);
  put_le(head + 4, sequence);
  full_write(journal_fd_, head, sizeof head, jp);
}

void BdStore::write_source_logged(VertexId s, const SourceData& data, const SourceUndo& undo) {
  if (!in_transaction()) throw Error("write_source_logged outside a transaction");
  check_source(s);
  if (data.size() != header_.n) {
    throw InvalidArgument("source " + std::to_string(s) + " has " + std::to_string(data.size()) +
                          " entries, store expects " + std::to_string(header_.n));
  }
  // When the buffer still holds this block only the journaled cells change,
  // so they are patched and written as one span per column. Encoding first
  // means a layout violation leaves both journal and block alone.
  const bool patch = block_source_ == s;
  VertexId first = VertexId(header_.n), last = 0;
  if (patch) {
    for (const auto& e : undo.entries) {
      encode_cell(s, data, e.vertex);
      first = std::min(first, e.vertex);
      last = std::max(last, e.vertex);
    }
  } else {
    encode(s, data);
  }
  journal_buffer_.resize(8 + undo.entries.size() * kJournalEntryBytes);
  unsigned char* p = journal_buffer_.data();
  put_le(p, s, 4);
  put_le(p + 4, static_cast<std::uint32_t>(undo.entries.size()), 4);
  p += 8;
  for (const auto& e : undo.entries) {
    put_le(p, e.vertex, 4);
    put_le(p + 4, e.d, 4);
    put_le(p + 8, e.sigma);
    put_le(p + 16, std::bit_cast<std::uint64_t>(e.delta));
    p += kJournalEntryBytes;
  }
  full_write(journal_fd_, journal_buffer_.data(), journal_buffer_.size(), journal_path());
  const std::uint64_t base = header_.offset(s);
  if (!patch) {
    write_at(base, buffer_.data(), buffer_.size());
  } else if (!undo.entries.empty()) {
    const std::uint64_t n = header_.n;
    const std::uint64_t w = header_.sigma_width;
    const std::uint64_t count = last - first + 1;
    write_at(base + first, buffer_.data() + first, count);
    write_at(base + n + first * w, buffer_.data() + n + first * w, count * w);
    write_at(base + n * (1 + w) + first * 8, buffer_.data() + n * (1 + w) + first * 8, count * 8);
  }
  ++io_.block_writes;
}

void BdStore::close_journal() {
  if (journal_fd_ >= 0) ::close(journal_fd_);
  journal_fd_ = -1;
  ::unlink(journal_path().c_str());
}

void BdStore::commit() {
  if (!in_transaction()) return;
  close_journal();
}

void BdStore::rollback() {
  if (!in_transaction()) return;
  ::close(journal_fd_);
  journal_fd_ = -1;
  int fd = open_or_throw(journal_path(), O_RDONLY);
  try {
    replay_journal(fd);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  ::unlink(journal_path().c_str());
}

std::optional<std::uint64_t> BdStore::pending_journal() const {
  const std::string jp = journal_path();
  int fd = ::open(jp.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) return std::nullopt;
  unsigned char head[12];
  ssize_t got = ::pread(fd, head, sizeof head, 0);
  ::close(fd);
  if (got != sizeof head || std::memcmp(head, kJournalMagic, 4) != 0) return std::nullopt;
  return get_le(head + 4, 8);
}

void BdStore::recover(bool committed) {
  if (in_transaction()) throw Error("recover() with an open transaction");
  const std::string jp = journal_path();
  if (!fs::exists(jp)) return;
  if (!committed) {
    int fd = open_or_throw(jp, O_RDONLY);
    try {
      replay_journal(fd);
    } catch (...) {
      ::close(fd);
      throw;
    }
    ::close(fd);
  }
  ::unlink(jp.c_str());
}

void BdStore::replay_journal(int fd) {
  std::vector<unsigned char> bytes;
  {
    const auto size = ::lseek(fd, 0, SEEK_END);
    if (size < 0) io_error("cannot size", journal_path());
    bytes.resize(static_cast<std::size_t>(size));
    if (!bytes.empty()) full_pread(fd, bytes.data(), bytes.size(), 0, journal_path());
  }
  if (bytes.size() < 12 || std::memcmp(bytes.data(), kJournalMagic, 4) != 0) return;

  struct Record {
    VertexId source;
    SourceUndo undo;
  };
  std::vector<Record> records;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto source = static_cast<VertexId>(get_le(&bytes[pos], 4));
    const auto count = static_cast<std::size_t>(get_le(&bytes[pos + 4], 4));
    if (pos + 8 + count * kJournalEntryBytes > bytes.size()) break;  // torn tail: block untouched
    pos += 8;
    Record rec{source, {}};
    rec.undo.entries.reserve(count);
    for (std::size_t i = 0; i < count; ++i, pos += kJournalEntryBytes) {
      const unsigned char* p = &bytes[pos];
      rec.undo.entries.push_back({static_cast<VertexId>(get_le(p, 4)),
                                  static_cast<Distance>(get_le(p + 4, 4)), get_le(p + 8, 8),
                                  std::bit_cast<double>(get_le(p + 16, 8))});
    }
    records.push_back(std::move(rec));
  }

  SourceData data;
  for (auto it = records.rbegin(); it != records.rend(); ++it) {
    load_source(it->source, data);
    it->undo.restore(data);
    write_source_in_place(it->source, data);
  }
}

// ---------------------------------------------------------------------------

void BdStore::grow(std::uint64_t new_n, bool append_source) {
  if (in_transaction()) throw Error("cannot grow store " + path_ + " inside a transaction");
  if (new_n < header_.n) throw InvalidArgument("store capacity cannot shrink");
  StoreHeader next = header_;
  next.n = new_n;
  if (append_source) {
    if (header_.hi >= new_n) throw InvalidArgument("no vertex left for a new source");
    ++next.hi;
  }
  const std::uint64_t old_hi = header_.hi;

  SourceData data;
  const std::string final_path = path_;
  BdStore grown = create(final_path + ".grow", next.n, next.lo, next.hi, next.sigma_width,
                         [&](VertexId s, SourceData& out) {
                           if (s < old_hi) {
                             load_source(s, out);
                             while (out.size() < new_n) out.append_unreached_vertex();
                           } else {
                             out = SourceData::isolated(new_n, s);
                           }
                         });
  const IoCounters carried = io_;
  ::close(grown.fd_);
  grown.fd_ = -1;
  ::close(fd_);
  fd_ = -1;
  fs::rename(final_path + ".grow", final_path);
  *this = open(final_path);
  io_ = carried;
}

}  // namespace sbc
