#ifndef SHARDBUS_HARNESS_EXPERIMENTS_HPP
#define SHARDBUS_HARNESS_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "shardbus/harness/api.hpp"
#include "shardbus/history.hpp"
#include "shardbus/history_oracle.hpp"

namespace shardbus::harness {

enum class Experiment {
  StaleInjection,
  ContentionSweep,
  OriIsolation,
  DoseResponse,
  DivergenceCounters,
};

struct ExperimentConfig {
  Experiment experiment = Experiment::StaleInjection;
  int n_agents = 4;
  int steps = 10;
  Topology topology = Topology::Shared;
  bool ori_enabled = true;
  std::uint64_t retry_budget = 0;  // 0 = unbounded
  int stale_agents_k = 0;          // dose-response only
  std::uint64_t seed = 1;
  int trials = 1;
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t commit_attempts = 0;
  std::uint64_t commits_ok = 0;
  std::uint64_t rejects_409 = 0;
  double scr = 0.0;  // rejects among shared-shard attempts
  std::uint64_t k95_empirical = 0;
  std::uint64_t type1_corruptions = 0;
  std::uint64_t contributions_preserved = 0;
  std::uint64_t contributions_intended = 0;
  std::uint64_t view_checked = 0;
  std::uint64_t view_divergent = 0;
  std::uint64_t divergent_accepted = 0;  // audited from the trace
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double rule_of_three_ub = 0.0;

  // experiment-specific extras
  std::uint64_t injected_stale = 0;
  std::uint64_t fresh_commits = 0;
  double commit_rate = 0.0;
  double predicted_rate = 0.0;
  double liveness_fraction = 0.0;  // fraction of transactions within budget K
  std::uint64_t liveness_budget = 0;

  bool invariants_ok = true;
  std::vector<std::string> invariant_failures;

  void fail(std::string why) {
    invariants_ok = false;
    invariant_failures.push_back(std::move(why));
  }

  /// Stable line format, one `name=value` per line.
  std::string to_lines() const;
  /// Small human-readable table.
  std::string to_table() const;
};

/// Commits accepted despite a stale sibling read at acceptance time,
/// counted from the recorded trace by the legality oracle rather than
/// from server counters.
std::uint64_t count_type1_corruptions(const std::vector<HistoryEvent>& history);

/// Alternates engineered-stale and fresh commits; every stale attempt must
/// be rejected and every fresh attempt accepted. cfg.steps = number of
/// stale injections (an equal number of fresh commits is interleaved).
ExperimentReport run_stale_injection(Driver drv, const ExperimentConfig& cfg);

/// N worker threads contend on one shared key (shared topology) or write
/// their own keys (dedicated). cfg.steps = successful commits per agent.
ExperimentReport run_contention_sweep(Driver drv, const ExperimentConfig& cfg);

/// Marker-appending agents on one shared key; with validation every
/// contribution survives, under last-writer-wins exactly one per step does.
/// The driver must point at a server running in the mode named by
/// cfg.ori_enabled.
ExperimentReport run_ori_isolation(Driver drv, const ExperimentConfig& cfg);

/// k of n agents freeze their sibling reads after step 5 and keep
/// committing; commit rate must equal 1 - (k/n)((steps-5)/steps).
/// Requires a validating (ORI-ON) server.
ExperimentReport run_dose_response(Driver drv, const ExperimentConfig& cfg);

/// Each agent owns one shard and reads all of them each step; the
/// schedule forces sibling advancement between read and commit.
ExperimentReport run_divergence_counters(Driver drv,
                                         const ExperimentConfig& cfg);

}  // namespace shardbus::harness

#endif  // SHARDBUS_HARNESS_EXPERIMENTS_HPP
