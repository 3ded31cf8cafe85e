#include "shardbus/wal.hpp"

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace shardbus {

Digest content_digest(std::string_view content) {
  Digest out{};
  unsigned int len = 0;
  EVP_Digest(content.data(), content.size(), out.data(), &len, EVP_sha256(),
             nullptr);
  return out;
}

std::string digest_hex(const Digest& d) {
  static const char* hex = "0123456789abcdef";
  std::string s;
  s.reserve(64);
  for (unsigned char b : d) {
    s.push_back(hex[b >> 4]);
    s.push_back(hex[b & 0xf]);
  }
  return s;
}

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

bool get_u32(const std::string& buf, std::size_t& off, std::uint32_t& v) {
  if (off + 4 > buf.size()) return false;
  v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
  off += 4;
  return true;
}

bool get_u64(const std::string& buf, std::size_t& off, std::uint64_t& v) {
  if (off + 8 > buf.size()) return false;
  v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
  off += 8;
  return true;
}

std::string encode_payload(const WalRecord& rec, bool with_content) {
  std::string payload;
  put_u64(payload, rec.sequence);
  put_u32(payload, static_cast<std::uint32_t>(rec.key.size()));
  payload.append(rec.key);
  put_u64(payload, rec.new_version);
  put_u32(payload, static_cast<std::uint32_t>(rec.agent.size()));
  payload.append(rec.agent);
  payload.append(reinterpret_cast<const char*>(rec.digest.data()),
                 rec.digest.size());
  if (with_content) {
    put_u32(payload, static_cast<std::uint32_t>(rec.content.size()));
    payload.append(rec.content);
  }
  return payload;
}

}  // namespace

std::uint64_t MemWal::append(const std::string& key, Version new_version,
                             const std::string& agent,
                             const std::string& content) {
  std::lock_guard lk(mu_);
  WalRecord rec;
  rec.sequence = records_.size() + 1;
  rec.key = key;
  rec.new_version = new_version;
  rec.agent = agent;
  rec.digest = content_digest(content);
  records_.push_back(std::move(rec));
  return records_.back().sequence;
}

void MemWal::reset() {
  std::lock_guard lk(mu_);
  records_.clear();
}

std::uint64_t MemWal::next_sequence() const {
  std::lock_guard lk(mu_);
  return records_.size() + 1;
}

std::vector<WalRecord> MemWal::records() const {
  std::lock_guard lk(mu_);
  return records_;
}

FileWal::FileWal(std::string path, FileWalOptions opts)
    : path_(std::move(path)), opts_(opts) {
  open_append();
  // Resume the sequence from whatever is already on disk.
  auto scan = read_wal_file(path_);
  if (scan.ok() && !scan->records.empty())
    next_seq_ = scan->records.back().sequence + 1;
}

FileWal::~FileWal() {
  if (fd_ >= 0) ::close(fd_);
}

void FileWal::open_append() {
  fd_ = ::open(path_.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
  if (fd_ < 0)
    throw std::runtime_error("wal: cannot open " + path_ + ": " +
                             std::strerror(errno));
}

std::uint64_t FileWal::append(const std::string& key, Version new_version,
                              const std::string& agent,
                              const std::string& content) {
  std::lock_guard lk(mu_);
  WalRecord rec;
  rec.sequence = next_seq_;
  rec.key = key;
  rec.new_version = new_version;
  rec.agent = agent;
  rec.digest = content_digest(content);
  rec.content = content;

  std::string payload = encode_payload(rec, opts_.store_content);
  std::string frame;
  frame.reserve(payload.size() + 4);
  put_u32(frame, static_cast<std::uint32_t>(payload.size()));
  frame.append(payload);

  const char* p = frame.data();
  std::size_t left = frame.size();
  while (left > 0) {
    ssize_t n = ::write(fd_, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error("wal: write failed: " +
                               std::string(std::strerror(errno)));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (opts_.sync_each_record) ::fdatasync(fd_);
  return next_seq_++;
}

void FileWal::reset() {
  std::lock_guard lk(mu_);
  if (fd_ >= 0) ::close(fd_);
  fd_ = ::open(path_.c_str(), O_CREAT | O_WRONLY | O_TRUNC, 0644);
  if (fd_ < 0)
    throw std::runtime_error("wal: cannot truncate " + path_);
  next_seq_ = 1;
}

std::uint64_t FileWal::next_sequence() const {
  std::lock_guard lk(mu_);
  return next_seq_;
}

Result<WalScan> read_wal_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return Error::CorruptWal;
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());

  WalScan scan;
  std::size_t off = 0;
  while (off < buf.size()) {
    std::size_t frame_start = off;
    std::uint32_t len = 0;
    if (!get_u32(buf, off, len) || off + len > buf.size()) {
      scan.torn_tail = true;
      break;
    }
    const std::size_t end = off + len;
    WalRecord rec;
    std::uint32_t klen = 0, alen = 0;
    bool ok = get_u64(buf, off, rec.sequence) && get_u32(buf, off, klen) &&
              off + klen <= end;
    if (ok) {
      rec.key = buf.substr(off, klen);
      off += klen;
      ok = get_u64(buf, off, rec.new_version) && get_u32(buf, off, alen) &&
           off + alen <= end;
    }
    if (ok) {
      rec.agent = buf.substr(off, alen);
      off += alen;
      ok = off + rec.digest.size() <= end;
    }
    if (ok) {
      std::memcpy(rec.digest.data(), buf.data() + off, rec.digest.size());
      off += rec.digest.size();
      if (off < end) {  // optional content field
        std::uint32_t clen = 0;
        ok = get_u32(buf, off, clen) && off + clen == end;
        if (ok) {
          rec.content = buf.substr(off, clen);
          off += clen;
        }
      } else {
        ok = off == end;
      }
    }
    if (!ok) {
      scan.torn_tail = true;
      off = frame_start;
      break;
    }
    scan.records.push_back(std::move(rec));
  }
  return scan;
}

Result<std::map<std::string, ReplayedShard>> replay_wal(
    const std::vector<WalRecord>& records) {
  std::map<std::string, ReplayedShard> state;
  std::uint64_t expect = 1;
  for (const auto& rec : records) {
    if (rec.sequence != expect) return Error::CorruptWal;
    ++expect;
    auto& shard = state[rec.key];
    shard.version = rec.new_version;
    shard.digest = rec.digest;
    shard.content = rec.content;
  }
  return state;
}

Result<std::map<std::string, ReplayedShard>> replay_wal_file(
    const std::string& path) {
  auto scan = read_wal_file(path);
  if (!scan.ok()) return scan.error();
  if (scan->torn_tail) return Error::CorruptWal;
  return replay_wal(scan->records);
}

}  // namespace shardbus
