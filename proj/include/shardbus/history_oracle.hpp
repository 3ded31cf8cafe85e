#ifndef SHARDBUS_HISTORY_ORACLE_HPP
#define SHARDBUS_HISTORY_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "shardbus/history.hpp"
#include "shardbus/result.hpp"

namespace shardbus {

struct Violation {
  enum class Kind { WriteWriteUnserialized, CrossShardStaleAccepted, SrcPresent };
  Kind kind;
  /// seq numbers of the events that jointly witness the violated clause.
  std::vector<std::uint64_t> evidence;
};

constexpr const char* to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::WriteWriteUnserialized: return "WriteWriteUnserialized";
    case Violation::Kind::CrossShardStaleAccepted: return "CrossShardStaleAccepted";
    case Violation::Kind::SrcPresent: return "SrcPresent";
  }
  return "?";
}

struct LegalityReport {
  bool legal = true;
  std::vector<Violation> violations;
};

/// Decides history legality:
///  - committed versions per key must be strictly increasing in seq order;
///  - no accepted commit may carry a sibling read superseded by a commit
///    between its recording Get and the accepting commit.
/// MalformedHistory on a non-contiguous seq or an accepted commit whose
/// read-set references a read that never happened.
Result<LegalityReport> is_ori_legal(const std::vector<HistoryEvent>& history);

struct SrcWitness {
  bool present = false;
  /// Whether the second racing attempt was accepted rather than rejected.
  bool second_committed = false;
  /// [first get, second get, first commit, second attempt] when present.
  std::vector<std::uint64_t> evidence;
};

/// Detects the double-commit race on one key: two agents read it at the
/// same version, one commits, and the other attempts a commit at that
/// expected version without re-reading in between.
Result<SrcWitness> contains_src(const std::vector<HistoryEvent>& history,
                                const std::string& key);

enum class Topology { Dedicated, Shared };

struct EnumerationConfig {
  int agents = 2;
  int shards = 2;
  int steps = 2;
  bool ori_enabled = true;
  Topology topology = Topology::Dedicated;
  std::uint64_t interleaving_cap = 5'000'000;
};

struct EnumerationReport {
  std::uint64_t interleavings = 0;
  std::uint64_t events_executed = 0;
  std::uint64_t ori_violations = 0;   // interleavings with an illegal history
  std::uint64_t src_present = 0;      // interleavings containing the race pattern
  std::uint64_t src_committed = 0;    // ... where the second attempt succeeded
  std::uint64_t soundness_failures = 0;  // recorded read ahead of a committed version
  std::vector<Violation> sample;      // first few violations, for reporting
};

/// Drives the real registry/commit modules through every interleaving of
/// the agents' fixed scripts (per step: read every shard, then commit the
/// own or shared target) and checks every resulting history. Whole
/// operations are atomic interleaving units, which matches the
/// implementation holding its guard across each operation.
Result<EnumerationReport> enumerate_schedules(const EnumerationConfig& cfg);

}  // namespace shardbus

#endif  // SHARDBUS_HISTORY_ORACLE_HPP
