#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sbc/incremental.hpp"
#include "sbc/source_data.hpp"

namespace sbc {

/// Fixed 32-byte little-endian file header:
///
///   offset  size  field
///        0     4  magic "SBC1"
///        4     2  version (1)
///        6     1  sigma_width (2, 4 or 8)
///        7     1  reserved (0)
///        8     8  n, vertices per block
///       16     8  lo, first source
///       24     8  hi, one past the last source
///
/// followed by hi - lo blocks in ascending source order. A block holds three
/// columns of n cells each: distance (1 byte, 0xFF = unreachable), path count
/// (sigma_width bytes, unsigned) and dependency (8 bytes, IEEE-754 double).
struct StoreHeader {
  static constexpr std::uint16_t kVersion = 1;
  static constexpr std::size_t kSize = 32;

  std::uint16_t version = kVersion;
  std::uint8_t sigma_width = 2;
  std::uint64_t n = 0;
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  std::uint64_t block_bytes() const { return n * (9 + std::uint64_t{sigma_width}); }
  std::uint64_t offset(std::uint64_t source) const { return kSize + (source - lo) * block_bytes(); }
  std::uint64_t file_size() const { return kSize + (hi - lo) * block_bytes(); }
};

inline constexpr std::uint8_t kUnreachableByte = 0xFF;
inline constexpr Distance kMaxStoredDistance = 254;

struct IoCounters {
  std::uint64_t bytes_read = 0;
  std::uint64_t bytes_written = 0;
  std::uint64_t distance_reads = 0;
  std::uint64_t block_reads = 0;
  std::uint64_t block_writes = 0;
};

/// One partition's per-source data on disk.
///
/// Updates can be grouped in a transaction: before a block is rewritten the
/// previous values of the cells that change are appended to a side journal
/// (`<path>.undo`, or a file in $SBC_STAGING_DIR when set). commit() drops the
/// journal, rollback() writes the old cells back. A journal left behind by a
/// crash is resolved by recover().
///
/// Not thread-safe; one writer per file.
class BdStore {
 public:
  using BlockSource = std::function<void(VertexId source, SourceData& out)>;

  /// Writes a new store, asking `fill` for every source in ascending order.
  static BdStore create(const std::string& path, std::uint64_t n, std::uint64_t lo,
                        std::uint64_t hi, std::uint8_t sigma_width, const BlockSource& fill);
  static BdStore open(const std::string& path);

  BdStore(BdStore&& other) noexcept;
  BdStore& operator=(BdStore&& other) noexcept;
  BdStore(const BdStore&) = delete;
  BdStore& operator=(const BdStore&) = delete;
  ~BdStore();

  const StoreHeader& header() const { return header_; }
  const std::string& path() const { return path_; }
  std::uint64_t lo() const { return header_.lo; }
  std::uint64_t hi() const { return header_.hi; }
  std::uint64_t n() const { return header_.n; }

  /// Reads only the distance column of `s`.
  void read_distances(VertexId s, std::vector<Distance>& out);
  std::vector<Distance> read_distances(VertexId s);

  void load_source(VertexId s, SourceData& out);
  SourceData load_source(VertexId s);

  /// Rewrites the block of `s` with one positioned write.
  void write_source_in_place(VertexId s, const SourceData& data);

  void begin_transaction(std::uint64_t sequence);
  /// Journals the entries of `undo` for source `s`, then rewrites its block.
  void write_source_logged(VertexId s, const SourceData& data, const SourceUndo& undo);
  void commit();
  void rollback();
  bool in_transaction() const { return journal_fd_ >= 0; }

  /// Sequence number of a journal left on disk, if any.
  std::optional<std::uint64_t> pending_journal() const;
  /// Resolves a leftover journal: keep the new blocks when `committed`,
  /// restore the journaled cells otherwise.
  void recover(bool committed);

  /// Rewrites the file with room for `new_n` vertices per block (new cells
  /// unreachable). With `append_source`, also adds an isolated block for the
  /// source `hi` and bumps hi.
  void grow(std::uint64_t new_n, bool append_source);

  const IoCounters& io() const { return io_; }
  void reset_io() { io_ = {}; }

 private:
  BdStore(std::string path, int fd, StoreHeader header);

  void check_source(VertexId s) const;
  void read_at(std::uint64_t offset, void* buf, std::size_t len);
  void write_at(std::uint64_t offset, const void* buf, std::size_t len);
  void encode(VertexId s, const SourceData& data);
  void encode_cell(VertexId s, const SourceData& data, std::size_t v);
  void decode(SourceData& out) const;
  std::string journal_path() const;
  void replay_journal(int fd);
  void close_journal();

  std::string path_;
  int fd_ = -1;
  StoreHeader header_;
  std::vector<unsigned char> buffer_;
  std::optional<VertexId> block_source_;  // source whose bytes buffer_ holds
  std::vector<unsigned char> distance_buffer_;
  IoCounters io_;
  int journal_fd_ = -1;
  std::vector<unsigned char> journal_buffer_;
};

/// Parses and validates a header; throws FormatError on mismatch.
StoreHeader decode_header(const unsigned char* bytes, std::size_t len);
void encode_header(const StoreHeader& h, unsigned char* out);

}  // namespace sbc
