#ifndef SHARDBUS_DELIVERY_LOG_HPP
#define SHARDBUS_DELIVERY_LOG_HPP

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "shardbus/result.hpp"
#include "shardbus/types.hpp"

namespace shardbus {

struct DeliveryLogEntry {
  std::string key;
  Version version = 0;
  std::uint64_t observed_at_ms = 0;
};

struct EffectiveReadSet {
  ReadSet reads;
};

/// Per-agent append-only logs of observed reads. One session per agent;
/// the first recorded read from an unknown (or expired) agent opens a
/// fresh session. A session whose age exceeds the TTL yields
/// SessionExpired until a new read re-opens it. TTL 0 means never expire.
///
/// Callers serialize per-agent writes by holding the registry guard; the
/// internal mutex only protects the map structure itself.
class DeliveryLog {
 public:
  explicit DeliveryLog(std::uint64_t ttl_ms = 0) : ttl_ms_(ttl_ms) {}

  void set_ttl_ms(std::uint64_t ttl_ms);
  std::uint64_t ttl_ms() const;

  /// Appends one observed read. Never overwrites: the log is a log.
  void record(const std::string& agent, const std::string& key, Version version,
              std::uint64_t now_ms);

  /// Union of the explicit declaration and the session log. Explicit
  /// entries win on shared keys; within the log the most recent entry per
  /// key wins. The commit key may appear; the commit validator skips it.
  /// An agent with no session yields just the explicit entries.
  Result<EffectiveReadSet> effective_read_set(const std::string& agent,
                                              const std::string& commit_key,
                                              const ReadSet* explicit_set,
                                              std::uint64_t now_ms) const;

  /// Drops sessions past their TTL. A dropped agent stays expired (its
  /// next effective_read_set call fails) until a fresh read re-opens it.
  std::size_t expire_sessions(std::uint64_t now_ms);

  void clear();

  struct SessionView {
    std::uint64_t created_at_ms = 0;
    bool expired = false;
    std::vector<DeliveryLogEntry> entries;
  };
  std::map<std::string, SessionView> sessions() const;

 private:
  struct Session {
    std::uint64_t created_at_ms = 0;
    bool expired = false;  // tombstone left behind by expire_sessions
    std::vector<DeliveryLogEntry> entries;
  };

  bool past_ttl(const Session& s, std::uint64_t now_ms) const {
    return ttl_ms_ != 0 && now_ms - s.created_at_ms > ttl_ms_;
  }

  mutable std::mutex mu_;
  std::uint64_t ttl_ms_;
  std::map<std::string, Session> sessions_;
};

}  // namespace shardbus

#endif  // SHARDBUS_DELIVERY_LOG_HPP
