#ifndef SHARDBUS_NODE_HPP
#define SHARDBUS_NODE_HPP

#include <memory>
#include <string>

#include "shardbus/acp.hpp"
#include "shardbus/clock.hpp"
#include "shardbus/delivery_log.hpp"
#include "shardbus/history.hpp"
#include "shardbus/registry.hpp"
#include "shardbus/result.hpp"
#include "shardbus/types.hpp"
#include "shardbus/wal.hpp"

namespace shardbus {

struct NodeConfig {
  bool ori_enabled = true;
  bool ownership_enforced = false;
  std::uint64_t session_ttl_ms = 0;  // 0 = sessions never expire
  std::string wal_path;              // empty = in-memory WAL
  bool wal_sync = true;
  bool record_history = true;
};

/// Wires one coordination node together: delivery log, registry, WAL,
/// commit path, history trace, clock.
class Node {
 public:
  explicit Node(NodeConfig cfg = {}, Clock* clock = nullptr)
      : cfg_(cfg),
        owned_clock_(clock == nullptr ? std::make_unique<SteadyClock>()
                                      : nullptr),
        clock_(clock == nullptr ? owned_clock_.get() : clock),
        log_(cfg.session_ttl_ms),
        registry_(log_, cfg.record_history ? &recorder_ : nullptr),
        wal_(cfg.wal_path.empty()
                 ? std::unique_ptr<Wal>(std::make_unique<MemWal>())
                 : std::unique_ptr<Wal>(std::make_unique<FileWal>(
                       cfg.wal_path,
                       FileWalOptions{cfg.wal_sync, /*store_content=*/false}))),
        committer_(registry_, *wal_,
                   AcpConfig{cfg.ori_enabled, cfg.ownership_enforced}) {}

  const NodeConfig& config() const { return cfg_; }
  Clock& clock() { return *clock_; }
  DeliveryLog& delivery_log() { return log_; }
  Registry& registry() { return registry_; }
  Wal& wal() { return *wal_; }
  Committer& committer() { return committer_; }
  HistoryRecorder& recorder() { return recorder_; }

  Result<Version> admin_create(const std::string& key,
                               const std::string& content) {
    return registry_.create_shard(key, content);
  }

  /// Clears shards, tokens, sessions, counters, the history trace, and
  /// starts a fresh WAL segment.
  void admin_reset() {
    registry_.reset();
    wal_->reset();
    recorder_.clear();
  }

  Result<ReadResult> get_shard(const std::string& key,
                               const std::string& agent) {
    return registry_.read_shard(key, agent, clock_->now_ms());
  }

  /// Commits through the configured mode (validated or last-writer-wins).
  Result<CommitOutcome> commit(const CommitRequest& req) {
    return committer_.submit(req, clock_->now_ms());
  }

 private:
  NodeConfig cfg_;
  std::unique_ptr<Clock> owned_clock_;
  Clock* clock_;
  DeliveryLog log_;
  HistoryRecorder recorder_;
  Registry registry_;
  std::unique_ptr<Wal> wal_;
  Committer committer_;
};

}  // namespace shardbus

#endif  // SHARDBUS_NODE_HPP
