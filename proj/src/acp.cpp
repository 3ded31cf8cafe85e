#include "shardbus/acp.hpp"

#include <cmath>

namespace shardbus {

namespace {

void record_reject(Registry& r, const CommitRequest& req,
                   const ReadSet* read_set) {
  r.count_reject();
  if (r.history() != nullptr)
    r.history()->append(EventKind::CommitReject, req.agent, req.key,
                        req.expected_version, read_set);
}

}  // namespace

Result<CommitOutcome> Committer::commit(const CommitRequest& req,
                                        std::uint64_t now_ms) {
  auto txn = registry_.begin_write();
  if (!txn.has(req.key)) return Error::UnknownKey;

  const ReadSet* explicit_set =
      req.explicit_read_set ? &*req.explicit_read_set : nullptr;
  auto eff = registry_.delivery_log().effective_read_set(
      req.agent, req.key, explicit_set, now_ms);
  if (!eff.ok()) {
    record_reject(registry_, req, nullptr);
    return CommitOutcome{CommitStatus::SessionExpired, 0, {}};
  }

  // Cross-shard freshness over the effective read-set, commit key skipped.
  registry_.count_view_checked();
  std::string stale_key;
  for (const auto& [sibling, seen] : eff->reads) {
    if (sibling == req.key) continue;
    auto current = txn.version_of(sibling);
    if (!current.has_value() || *current != seen) {
      stale_key = sibling;
      break;  // reads is ordered, so this is the lexicographically first
    }
  }
  if (!stale_key.empty()) {
    registry_.count_view_divergent();
    record_reject(registry_, req, &eff->reads);
    return CommitOutcome{CommitStatus::CrossShardStale, 0, stale_key};
  }

  if (*txn.version_of(req.key) != req.expected_version) {
    record_reject(registry_, req, &eff->reads);
    return CommitOutcome{CommitStatus::VersionMismatch, 0, {}};
  }

  const std::string owner = txn.claim_token(req.key, req.agent);
  if (config_.ownership_enforced && owner != req.agent) {
    record_reject(registry_, req, &eff->reads);
    return CommitOutcome{CommitStatus::OwnershipViolation, 0, {}};
  }

  const Version new_version = txn.apply_commit(req.key, req.delta);
  wal_.append(req.key, new_version, req.agent, req.delta);
  registry_.count_commit();
  if (registry_.history() != nullptr)
    registry_.history()->append(EventKind::CommitOk, req.agent, req.key,
                                new_version, &eff->reads);
  return CommitOutcome{CommitStatus::Ok, new_version, {}};
}

Result<CommitOutcome> Committer::commit_lww(const CommitRequest& req,
                                            std::uint64_t now_ms) {
  auto txn = registry_.begin_write();
  if (!txn.has(req.key)) return Error::UnknownKey;

  const ReadSet* explicit_set =
      req.explicit_read_set ? &*req.explicit_read_set : nullptr;
  auto eff = registry_.delivery_log().effective_read_set(
      req.agent, req.key, explicit_set, now_ms);
  ReadSet reads;
  if (eff.ok()) {
    reads = std::move(eff->reads);
    // Divergence instrumentation fires regardless of mode; only the
    // rejection is skipped here.
    registry_.count_view_checked();
    for (const auto& [sibling, seen] : reads) {
      if (sibling == req.key) continue;
      auto current = txn.version_of(sibling);
      if (!current.has_value() || *current != seen) {
        registry_.count_view_divergent();
        break;
      }
    }
  }

  txn.claim_token(req.key, req.agent);
  const Version new_version = txn.apply_commit(req.key, req.delta);
  wal_.append(req.key, new_version, req.agent, req.delta);
  registry_.count_commit();
  if (registry_.history() != nullptr)
    registry_.history()->append(EventKind::CommitOk, req.agent, req.key,
                                new_version, &reads);
  return CommitOutcome{CommitStatus::Ok, new_version, {}};
}

Result<std::uint64_t> required_retry_budget(double scr, double target) {
  if (!(scr >= 0.0) || scr >= 1.0) return Error::DomainError;
  if (!(target > 0.0) || !(target < 1.0)) return Error::DomainError;
  if (scr == 0.0) return std::uint64_t{1};

  double raw = std::log(1.0 - target) / std::log(scr);
  auto k = static_cast<std::uint64_t>(std::ceil(raw));
  if (k == 0) k = 1;
  // Pin down the exact least K against floating-point edge error.
  auto reaches = [&](std::uint64_t kk) {
    return 1.0 - std::pow(scr, static_cast<double>(kk)) >= target;
  };
  while (!reaches(k)) ++k;
  while (k > 1 && reaches(k - 1)) --k;
  return k;
}

}  // namespace shardbus
