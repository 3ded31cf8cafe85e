#ifndef SHARDBUS_ACP_HPP
#define SHARDBUS_ACP_HPP

#include <cstdint>

#include "shardbus/delivery_log.hpp"
#include "shardbus/registry.hpp"
#include "shardbus/result.hpp"
#include "shardbus/types.hpp"
#include "shardbus/wal.hpp"

namespace shardbus {

struct AcpConfig {
  /// When false the server runs last-writer-wins: staleness and version
  /// checks are skipped, divergence is still counted.
  bool ori_enabled = true;
  /// When true a commit to a key whose token is held by another agent is
  /// rejected. The token table is populated either way.
  bool ownership_enforced = false;
};

/// The atomic commit path. The whole body of commit()/commit_lww() runs
/// under one exclusive acquisition of the registry guard; concurrent
/// callers serialize there.
class Committer {
 public:
  Committer(Registry& registry, Wal& wal, AcpConfig config = {})
      : registry_(registry), wal_(wal), config_(config) {}

  const AcpConfig& config() const { return config_; }

  /// Validated commit:
  ///   1. build the effective read-set;
  ///   2. reject CrossShardStale if any sibling read is no longer current
  ///      (siblings scanned in lexicographic key order, first hit named);
  ///   3. reject VersionMismatch unless expected_version is current;
  ///   4. claim the ownership token (insert-if-absent), enforcing it only
  ///      when configured;
  ///   5. replace content, bump the version, append the WAL record, then
  ///      acknowledge. Rejections mutate nothing.
  Result<CommitOutcome> commit(const CommitRequest& req, std::uint64_t now_ms);

  /// Last-writer-wins: skips steps 2 and 3 but still counts divergence,
  /// bumps the version, and appends to the WAL. Always succeeds for a
  /// known key.
  Result<CommitOutcome> commit_lww(const CommitRequest& req,
                                   std::uint64_t now_ms);

  /// Dispatch by configured mode.
  Result<CommitOutcome> submit(const CommitRequest& req, std::uint64_t now_ms) {
    return config_.ori_enabled ? commit(req, now_ms) : commit_lww(req, now_ms);
  }

 private:
  Registry& registry_;
  Wal& wal_;
  AcpConfig config_;
};

/// Least K with 1 - scr^K >= target, i.e. ceil(log(1-target)/log(scr));
/// scr = 0 maps to 1. DomainError unless 0 <= scr < 1 and 0 < target < 1.
Result<std::uint64_t> required_retry_budget(double scr, double target);

}  // namespace shardbus

#endif  // SHARDBUS_ACP_HPP
