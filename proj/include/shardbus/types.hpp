#ifndef SHARDBUS_TYPES_HPP
#define SHARDBUS_TYPES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace shardbus {

using Version = std::uint64_t;

/// key -> version, ordered so every scan over it is deterministic.
using ReadSet = std::map<std::string, Version>;

struct ReadResult {
  std::string content;
  Version version = 0;
};

struct ShardState {
  Version version = 0;
  std::string content;

  friend bool operator==(const ShardState&, const ShardState&) = default;
};

/// Monotone event counters, reset only by an explicit registry reset.
struct Counters {
  std::uint64_t gets = 0;
  std::uint64_t commits = 0;
  std::uint64_t rejects = 0;
  std::uint64_t view_checked_commits = 0;
  std::uint64_t view_divergent_commits = 0;

  friend bool operator==(const Counters&, const Counters&) = default;
};

struct RegistrySnapshot {
  std::map<std::string, ShardState> entries;
  std::map<std::string, std::string> token_owners;
  Counters counters;
};

enum class CommitStatus {
  Ok,
  CrossShardStale,
  VersionMismatch,
  SessionExpired,
  OwnershipViolation,
};

constexpr const char* to_string(CommitStatus s) {
  switch (s) {
    case CommitStatus::Ok: return "Ok";
    case CommitStatus::CrossShardStale: return "CrossShardStale";
    case CommitStatus::VersionMismatch: return "VersionMismatch";
    case CommitStatus::SessionExpired: return "SessionExpired";
    case CommitStatus::OwnershipViolation: return "OwnershipViolation";
  }
  return "Unknown";
}

struct CommitRequest {
  std::string key;
  Version expected_version = 0;
  std::string delta;  // full replacement content
  std::string agent;
  std::optional<ReadSet> explicit_read_set;
};

struct CommitOutcome {
  CommitStatus status = CommitStatus::Ok;
  Version new_version = 0;   // meaningful iff status == Ok
  std::string stale_key;     // set iff status == CrossShardStale

  bool ok() const { return status == CommitStatus::Ok; }
};

}  // namespace shardbus

#endif  // SHARDBUS_TYPES_HPP
