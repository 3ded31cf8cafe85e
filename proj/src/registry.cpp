#include "shardbus/registry.hpp"

namespace shardbus {

Result<Version> Registry::create_shard(const std::string& key,
                                       const std::string& initial_content) {
  std::unique_lock lk(guard_);
  auto [it, inserted] = shards_.try_emplace(key, ShardState{1, initial_content});
  if (!inserted) return Error::KeyExists;
  return it->second.version;
}

Result<ReadResult> Registry::read_shard(const std::string& key,
                                        const std::string& agent,
                                        std::uint64_t now_ms) {
  std::shared_lock lk(guard_);
  auto it = shards_.find(key);
  if (it == shards_.end()) return Error::UnknownKey;
  ReadResult out{it->second.content, it->second.version};
  // A1: the log entry lands before the result leaves the critical section.
  log_.record(agent, key, out.version, now_ms);
  gets_.fetch_add(1, std::memory_order_relaxed);
  if (history_ != nullptr)
    history_->append(EventKind::Get, agent, key, out.version, nullptr);
  return out;
}

std::optional<Version> Registry::current_version(const std::string& key) const {
  std::shared_lock lk(guard_);
  auto it = shards_.find(key);
  if (it == shards_.end()) return std::nullopt;
  return it->second.version;
}

RegistrySnapshot Registry::snapshot() const {
  std::shared_lock lk(guard_);
  RegistrySnapshot snap;
  snap.entries = shards_;
  {
    std::lock_guard tk(token_mu_);
    snap.token_owners = tokens_;
  }
  snap.counters.gets = gets_.load(std::memory_order_relaxed);
  snap.counters.commits = commits_.load(std::memory_order_relaxed);
  snap.counters.rejects = rejects_.load(std::memory_order_relaxed);
  snap.counters.view_checked_commits =
      view_checked_.load(std::memory_order_relaxed);
  snap.counters.view_divergent_commits =
      view_divergent_.load(std::memory_order_relaxed);
  return snap;
}

void Registry::reset() {
  std::unique_lock lk(guard_);
  shards_.clear();
  {
    std::lock_guard tk(token_mu_);
    tokens_.clear();
  }
  log_.clear();
  gets_.store(0, std::memory_order_relaxed);
  commits_.store(0, std::memory_order_relaxed);
  rejects_.store(0, std::memory_order_relaxed);
  view_checked_.store(0, std::memory_order_relaxed);
  view_divergent_.store(0, std::memory_order_relaxed);
}

}  // namespace shardbus
