#include "shardbus/history_oracle.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "shardbus/acp.hpp"
#include "shardbus/delivery_log.hpp"
#include "shardbus/registry.hpp"
#include "shardbus/wal.hpp"

namespace shardbus {

namespace {

Version expected_of(const HistoryEvent& e) {
  return e.kind == EventKind::CommitOk ? e.version - 1 : e.version;
}

}  // namespace

Result<LegalityReport> is_ori_legal(const std::vector<HistoryEvent>& history) {
  for (std::size_t i = 0; i < history.size(); ++i)
    if (history[i].seq != i + 1) return Error::MalformedHistory;

  // Every read-set entry of an accepted commit must trace back to a read
  // that actually happened for that agent.
  std::set<std::tuple<std::string, std::string, Version>> seen_gets;
  for (const auto& e : history) {
    if (e.kind == EventKind::Get) {
      seen_gets.insert({e.agent, e.key, e.version});
    } else if (e.kind == EventKind::CommitOk) {
      for (const auto& [k, v] : e.read_set)
        if (seen_gets.count({e.agent, k, v}) == 0)
          return Error::MalformedHistory;
    }
  }

  LegalityReport report;

  // Clause 1: committed versions per key strictly increase in seq order.
  std::map<std::string, const HistoryEvent*> last_commit;
  for (const auto& e : history) {
    if (e.kind != EventKind::CommitOk) continue;
    auto it = last_commit.find(e.key);
    if (it != last_commit.end() && e.version <= it->second->version)
      report.violations.push_back(
          Violation{Violation::Kind::WriteWriteUnserialized,
                    {it->second->seq, e.seq}});
    last_commit[e.key] = &e;
  }

  // Clause 2: walk the serialisation order tracking current versions; an
  // accepted commit whose sibling entry is not current was superseded
  // between the recording read and the commit.
  std::map<std::string, Version> current;
  for (const auto& e : history) {
    if (e.kind == EventKind::Get) {
      current[e.key] = e.version;
      continue;
    }
    if (e.kind != EventKind::CommitOk) continue;
    for (const auto& [sibling, seen] : e.read_set) {
      if (sibling == e.key) continue;
      auto cur = current.find(sibling);
      if (cur != current.end() && cur->second != seen) {
        // Evidence: the recording read, the superseding commit, this commit.
        std::uint64_t get_seq = 0, super_seq = 0;
        for (const auto& w : history) {
          if (w.seq >= e.seq) break;
          if (w.kind == EventKind::Get && w.agent == e.agent &&
              w.key == sibling && w.version == seen)
            get_seq = w.seq;
        }
        for (const auto& w : history) {
          if (w.seq >= e.seq) break;
          if (w.seq > get_seq && w.kind == EventKind::CommitOk &&
              w.key == sibling) {
            super_seq = w.seq;
            break;
          }
        }
        report.violations.push_back(
            Violation{Violation::Kind::CrossShardStaleAccepted,
                      {get_seq, super_seq, e.seq}});
      }
    }
    current[e.key] = e.version;
  }

  report.legal = report.violations.empty();
  return report;
}

Result<SrcWitness> contains_src(const std::vector<HistoryEvent>& history,
                                const std::string& key) {
  for (std::size_t i = 0; i < history.size(); ++i)
    if (history[i].seq != i + 1) return Error::MalformedHistory;

  SrcWitness witness;
  // Candidate first commits, in serialisation order.
  for (const auto& c1 : history) {
    if (c1.kind != EventKind::CommitOk || c1.key != key) continue;
    const Version v = expected_of(c1);

    // The first committer must have read (key, v) before committing.
    std::uint64_t g1 = 0;
    for (const auto& g : history) {
      if (g.seq >= c1.seq) break;
      if (g.kind == EventKind::Get && g.agent == c1.agent && g.key == key &&
          g.version == v)
        g1 = g.seq;
    }
    if (g1 == 0) continue;

    // A second agent that also read (key, v) and later attempts expected v
    // with no re-read of key between the first commit and its attempt.
    for (const auto& c2 : history) {
      if (c2.seq <= c1.seq || c2.key != key || c2.agent == c1.agent) continue;
      if (c2.kind == EventKind::Get) continue;
      if (expected_of(c2) != v) continue;

      std::uint64_t g2 = 0;
      bool reread_between = false;
      for (const auto& g : history) {
        if (g.seq >= c2.seq) break;
        if (g.kind != EventKind::Get || g.agent != c2.agent || g.key != key)
          continue;
        if (g.version == v && g.seq < c2.seq) g2 = g.seq;
        if (g.seq > c1.seq) reread_between = true;
      }
      if (g2 == 0 || reread_between) continue;

      witness.present = true;
      witness.second_committed = c2.kind == EventKind::CommitOk;
      witness.evidence = {g1, g2, c1.seq, c2.seq};
      return witness;
    }
  }
  return witness;
}

namespace {

struct ScriptedAgent {
  std::string name;
  std::map<std::string, Version> seen;  // latest observed version per key
};

/// One whole-operation step of an agent's fixed script.
struct Op {
  enum class Kind { Get, Commit } kind;
  int step = 0;
  std::string key;
};

std::uint64_t interleaving_count(int agents, std::uint64_t ops_per_agent,
                                 std::uint64_t cap) {
  // multinomial(total; ops, ops, ...) computed as a product of binomials.
  auto binom = [cap](std::uint64_t n, std::uint64_t k) -> std::uint64_t {
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
      r = r * (n - k + i) / i;
      if (r > static_cast<unsigned __int128>(cap) * 1000) return cap + 1;
    }
    return static_cast<std::uint64_t>(r);
  };
  unsigned __int128 total = 1;
  for (int a = 1; a <= agents; ++a) {
    std::uint64_t b = binom(ops_per_agent * a, ops_per_agent);
    total *= b;
    if (total > static_cast<unsigned __int128>(cap)) return cap + 1;
  }
  return static_cast<std::uint64_t>(total);
}

}  // namespace

Result<EnumerationReport> enumerate_schedules(const EnumerationConfig& cfg) {
  const int ops_per_agent = cfg.steps * (cfg.shards + 1);
  const std::uint64_t count = interleaving_count(
      cfg.agents, static_cast<std::uint64_t>(ops_per_agent),
      cfg.interleaving_cap);
  if (count > cfg.interleaving_cap) return Error::BudgetExceeded;

  std::vector<std::string> shard_keys;
  for (int s = 0; s < cfg.shards; ++s)
    shard_keys.push_back("s" + std::to_string(s));

  // Fixed per-agent script: each step reads every shard then commits the
  // topology target.
  std::vector<std::vector<Op>> scripts(cfg.agents);
  for (int a = 0; a < cfg.agents; ++a) {
    const std::string target = cfg.topology == Topology::Shared
                                   ? shard_keys[0]
                                   : shard_keys[a % cfg.shards];
    for (int step = 0; step < cfg.steps; ++step) {
      for (const auto& k : shard_keys)
        scripts[a].push_back(Op{Op::Kind::Get, step, k});
      scripts[a].push_back(Op{Op::Kind::Commit, step, target});
    }
  }

  EnumerationReport report;
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(cfg.agents) * ops_per_agent);

  // Executes one complete interleaving against fresh modules and audits
  // the resulting history.
  auto run_leaf = [&](const std::vector<int>& schedule) {
    DeliveryLog log;
    HistoryRecorder recorder;
    Registry registry(log, &recorder);
    MemWal wal;
    Committer committer(registry, wal,
                        AcpConfig{cfg.ori_enabled, /*ownership=*/false});
    for (const auto& k : shard_keys) registry.create_shard(k, "base");

    std::vector<ScriptedAgent> agents(cfg.agents);
    std::vector<std::size_t> pc(cfg.agents, 0);
    for (int a = 0; a < cfg.agents; ++a)
      agents[a].name = "a" + std::to_string(a);

    bool sound = true;
    for (int a : schedule) {
      const Op& op = scripts[a][pc[a]++];
      auto& agent = agents[a];
      if (op.kind == Op::Kind::Get) {
        auto r = registry.read_shard(op.key, agent.name, 0);
        agent.seen[op.key] = r->version;
      } else {
        CommitRequest req;
        req.key = op.key;
        req.expected_version = agent.seen[op.key];
        req.delta = agent.name + ".s" + std::to_string(op.step);
        req.agent = agent.name;
        committer.submit(req, 0);
      }
      ++report.events_executed;
      // ReadSetSoundness after every operation: no recorded read may be
      // ahead of the committed version.
      for (const auto& [agent_name, session] : log.sessions()) {
        (void)agent_name;
        for (const auto& entry : session.entries) {
          auto cur = registry.current_version(entry.key);
          if (!cur.has_value() || entry.version > *cur) sound = false;
        }
      }
    }
    if (!sound) ++report.soundness_failures;

    const auto history = recorder.events();
    auto legality = is_ori_legal(history);
    bool violated = false;
    if (!legality.ok() || !legality->legal) {
      violated = true;
      if (legality.ok() && report.sample.size() < 8)
        report.sample.insert(report.sample.end(),
                             legality->violations.begin(),
                             legality->violations.end());
    }
    bool present = false, committed = false;
    for (const auto& k : shard_keys) {
      auto src = contains_src(history, k);
      if (src.ok() && src->present) {
        present = true;
        if (src->second_committed) {
          committed = true;
          if (report.sample.size() < 8)
            report.sample.push_back(
                Violation{Violation::Kind::SrcPresent, src->evidence});
        }
      }
    }
    if (present) ++report.src_present;
    if (committed) ++report.src_committed;
    if (violated) ++report.ori_violations;
    ++report.interleavings;
  };

  // Depth-first enumeration of all merge orders of the agent scripts.
  std::vector<std::size_t> remaining(cfg.agents,
                                     static_cast<std::size_t>(ops_per_agent));
  auto dfs = [&](auto&& self) -> void {
    bool any = false;
    for (int a = 0; a < cfg.agents; ++a) {
      if (remaining[a] == 0) continue;
      any = true;
      --remaining[a];
      order.push_back(a);
      self(self);
      order.pop_back();
      ++remaining[a];
    }
    if (!any) run_leaf(order);
  };
  dfs(dfs);

  return report;
}

}  // namespace shardbus
