#ifndef SHARDBUS_REGISTRY_HPP
#define SHARDBUS_REGISTRY_HPP

#include <atomic>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "shardbus/delivery_log.hpp"
#include "shardbus/history.hpp"
#include "shardbus/result.hpp"
#include "shardbus/types.hpp"

namespace shardbus {

/// Versioned shard store plus the ownership-token table.
///
/// Two guards: a registry-wide shared_mutex (many readers, one writer) and
/// a separate mutex over the token table. Acquisition order is strictly
/// registry guard -> token guard; no operation takes them in the other
/// direction, so the order graph has a single edge and no cycle.
///
/// Every read appends the observed (key, version) to the agent's delivery
/// log before the result leaves the critical section, so the logged
/// version always equals the returned version.
class Registry {
 public:
  explicit Registry(DeliveryLog& log, HistorySink* history = nullptr)
      : log_(log), history_(history) {}

  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  /// Creates a shard at version 1. No delivery-log entry is made.
  Result<Version> create_shard(const std::string& key,
                               const std::string& initial_content);

  Result<ReadResult> read_shard(const std::string& key,
                                const std::string& agent,
                                std::uint64_t now_ms);

  /// Consistent point-in-time copy taken under the shared guard.
  RegistrySnapshot snapshot() const;

  std::optional<Version> current_version(const std::string& key) const;

  /// Clears shards, tokens, session logs, and counters.
  void reset();

  /// Exclusive handle over the store for the commit path. Construction
  /// takes the registry guard for writing; destruction releases it.
  class WriteTxn {
   public:
    explicit WriteTxn(Registry& r) : r_(r), lock_(r.guard_) {}

    bool has(const std::string& key) const {
      return r_.shards_.count(key) != 0;
    }
    std::optional<Version> version_of(const std::string& key) const {
      auto it = r_.shards_.find(key);
      if (it == r_.shards_.end()) return std::nullopt;
      return it->second.version;
    }
    /// Replaces content and bumps the version by one; returns the new version.
    Version apply_commit(const std::string& key, const std::string& content) {
      auto& shard = r_.shards_.at(key);
      shard.content = content;
      return ++shard.version;
    }
    /// insert-if-absent under the token guard; returns the owner afterwards.
    std::string claim_token(const std::string& key, const std::string& agent) {
      std::lock_guard tk(r_.token_mu_);
      return r_.tokens_.try_emplace(key, agent).first->second;
    }

    Registry& registry() { return r_; }

   private:
    Registry& r_;
    std::unique_lock<std::shared_mutex> lock_;
  };

  WriteTxn begin_write() { return WriteTxn(*this); }

  DeliveryLog& delivery_log() { return log_; }
  HistorySink* history() { return history_; }

  void count_reject() { rejects_.fetch_add(1, std::memory_order_relaxed); }
  void count_commit() { commits_.fetch_add(1, std::memory_order_relaxed); }
  void count_view_checked() {
    view_checked_.fetch_add(1, std::memory_order_relaxed);
  }
  void count_view_divergent() {
    view_divergent_.fetch_add(1, std::memory_order_relaxed);
  }

 private:
  friend class WriteTxn;

  mutable std::shared_mutex guard_;  // registry guard
  mutable std::mutex token_mu_;      // token guard, taken after the registry guard
  std::map<std::string, ShardState> shards_;
  std::map<std::string, std::string> tokens_;

  std::atomic<std::uint64_t> gets_{0};
  std::atomic<std::uint64_t> commits_{0};
  std::atomic<std::uint64_t> rejects_{0};
  std::atomic<std::uint64_t> view_checked_{0};
  std::atomic<std::uint64_t> view_divergent_{0};

  DeliveryLog& log_;
  HistorySink* history_;
};

}  // namespace shardbus

#endif  // SHARDBUS_REGISTRY_HPP
