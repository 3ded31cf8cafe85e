#ifndef SHARDBUS_WAL_HPP
#define SHARDBUS_WAL_HPP

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "shardbus/result.hpp"
#include "shardbus/types.hpp"

namespace shardbus {

using Digest = std::array<unsigned char, 32>;

/// SHA-256 of the committed content.
Digest content_digest(std::string_view content);
std::string digest_hex(const Digest& d);

struct WalRecord {
  std::uint64_t sequence = 0;  // contiguous from 1
  std::string key;
  Version new_version = 0;
  std::string agent;
  Digest digest{};
  std::string content;  // populated only when the WAL stores full content

  friend bool operator==(const WalRecord&, const WalRecord&) = default;
};

/// Append sink for committed writes. append() runs inside the commit
/// critical section; a record must be durable before the commit is
/// acknowledged.
class Wal {
 public:
  virtual ~Wal() = default;
  virtual std::uint64_t append(const std::string& key, Version new_version,
                               const std::string& agent,
                               const std::string& content) = 0;
  /// Drops all records and restarts the sequence at 1 (fresh segment).
  virtual void reset() = 0;
  virtual std::uint64_t next_sequence() const = 0;
};

class MemWal final : public Wal {
 public:
  std::uint64_t append(const std::string& key, Version new_version,
                       const std::string& agent,
                       const std::string& content) override;
  void reset() override;
  std::uint64_t next_sequence() const override;
  std::vector<WalRecord> records() const;

 private:
  mutable std::mutex mu_;
  std::vector<WalRecord> records_;
};

struct FileWalOptions {
  bool sync_each_record = true;  // fdatasync after every append
  bool store_content = false;    // append content after the digest field
};

/// Length-prefixed binary log, one record per committed write:
///   u32 payload length, then payload =
///   u64 sequence, u32 key len + key bytes, u64 new_version,
///   u32 agent len + agent bytes, 32-byte content digest,
///   [u32 content len + content bytes when store_content is on].
/// All integers little-endian.
class FileWal final : public Wal {
 public:
  explicit FileWal(std::string path, FileWalOptions opts = {});
  ~FileWal() override;

  FileWal(const FileWal&) = delete;
  FileWal& operator=(const FileWal&) = delete;

  std::uint64_t append(const std::string& key, Version new_version,
                       const std::string& agent,
                       const std::string& content) override;
  void reset() override;
  std::uint64_t next_sequence() const override;
  const std::string& path() const { return path_; }

 private:
  void open_append();

  mutable std::mutex mu_;
  std::string path_;
  FileWalOptions opts_;
  int fd_ = -1;
  std::uint64_t next_seq_ = 1;
};

/// Result of scanning a WAL file. A torn final record (partial write at the
/// tail) is reported via `torn_tail`; the records before it are intact.
struct WalScan {
  std::vector<WalRecord> records;
  bool torn_tail = false;
};

Result<WalScan> read_wal_file(const std::string& path);

struct ReplayedShard {
  Version version = 0;
  Digest digest{};
  std::string content;  // only when records carried content
};

/// Replays a contiguous record sequence into per-key terminal state.
/// CorruptWal on a sequence gap or out-of-order record.
Result<std::map<std::string, ReplayedShard>> replay_wal(
    const std::vector<WalRecord>& records);

/// Strict variant: any torn tail or sequence fault is CorruptWal.
Result<std::map<std::string, ReplayedShard>> replay_wal_file(
    const std::string& path);

}  // namespace shardbus

#endif  // SHARDBUS_WAL_HPP
