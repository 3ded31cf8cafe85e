#include "shardbus/delivery_log.hpp"

namespace shardbus {

void DeliveryLog::set_ttl_ms(std::uint64_t ttl_ms) {
  std::lock_guard lk(mu_);
  ttl_ms_ = ttl_ms;
}

std::uint64_t DeliveryLog::ttl_ms() const {
  std::lock_guard lk(mu_);
  return ttl_ms_;
}

void DeliveryLog::record(const std::string& agent, const std::string& key,
                         Version version, std::uint64_t now_ms) {
  std::lock_guard lk(mu_);
  auto [it, inserted] = sessions_.try_emplace(agent);
  Session& s = it->second;
  if (inserted || s.expired || past_ttl(s, now_ms)) {
    s = Session{};
    s.created_at_ms = now_ms;
  }
  s.entries.push_back(DeliveryLogEntry{key, version, now_ms});
}

Result<EffectiveReadSet> DeliveryLog::effective_read_set(
    const std::string& agent, const std::string& /*commit_key*/,
    const ReadSet* explicit_set, std::uint64_t now_ms) const {
  std::lock_guard lk(mu_);
  EffectiveReadSet out;
  auto it = sessions_.find(agent);
  if (it != sessions_.end()) {
    const Session& s = it->second;
    if (s.expired || past_ttl(s, now_ms)) return Error::SessionExpired;
    for (const auto& e : s.entries) out.reads[e.key] = e.version;
  }
  if (explicit_set != nullptr)
    for (const auto& [k, v] : *explicit_set) out.reads[k] = v;
  return out;
}

std::size_t DeliveryLog::expire_sessions(std::uint64_t now_ms) {
  std::lock_guard lk(mu_);
  std::size_t dropped = 0;
  for (auto& [agent, s] : sessions_) {
    if (!s.expired && past_ttl(s, now_ms)) {
      s.entries.clear();
      s.expired = true;
      ++dropped;
    }
  }
  return dropped;
}

void DeliveryLog::clear() {
  std::lock_guard lk(mu_);
  sessions_.clear();
}

std::map<std::string, DeliveryLog::SessionView> DeliveryLog::sessions() const {
  std::lock_guard lk(mu_);
  std::map<std::string, SessionView> out;
  for (const auto& [agent, s] : sessions_)
    out.emplace(agent, SessionView{s.created_at_ms, s.expired, s.entries});
  return out;
}

}  // namespace shardbus
