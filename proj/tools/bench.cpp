// Deterministic synthetic-agent driver: reproduces the structural
// experiments against the in-process modules or a live server.

#include <CLI11.hpp>

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "shardbus/acp.hpp"
#include "shardbus/clock.hpp"
#include "shardbus/harness/experiments.hpp"
#include "shardbus/history_oracle.hpp"
#include "shardbus/node.hpp"
#include "shardbus/stats.hpp"

namespace hb = shardbus::harness;

namespace {

struct Target {
  std::unique_ptr<shardbus::ManualClock> clock;
  std::unique_ptr<shardbus::Node> node;
  std::unique_ptr<hb::InProcApi> inproc;
  std::unique_ptr<hb::HttpApi> http;

  hb::Driver driver() {
    if (http) return hb::Driver{*http, nullptr};
    return hb::Driver{*inproc, &node->recorder()};
  }
};

Target make_target(const std::string& server, bool ori_enabled) {
  Target t;
  if (!server.empty()) {
    t.http = std::make_unique<hb::HttpApi>(server);
    return t;
  }
  t.clock = std::make_unique<shardbus::ManualClock>();
  shardbus::NodeConfig cfg;
  cfg.ori_enabled = ori_enabled;
  t.node = std::make_unique<shardbus::Node>(cfg, t.clock.get());
  t.inproc = std::make_unique<hb::InProcApi>(*t.node);
  return t;
}

int finish(const hb::ExperimentReport& report, bool lines) {
  std::fputs(lines ? report.to_lines().c_str() : report.to_table().c_str(),
             stdout);
  return report.invariants_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shardbus-bench: structural experiment harness"};
  app.require_subcommand(1);

  std::string server;
  bool lines = false;
  app.add_option("--server", server,
                 "base URL of a live server (default: in-process)");
  app.add_flag("--lines", lines, "machine-readable line output");

  hb::ExperimentConfig cfg;
  std::string topology = "shared";
  std::string mode = "on";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--agents", cfg.n_agents, "number of agents");
    sub->add_option("--steps", cfg.steps, "steps (meaning is per experiment)");
    sub->add_option("--topology", topology, "shared|dedicated");
    sub->add_option("--mode", mode, "on (validate) | off (last-writer-wins)");
    sub->add_option("--retry-budget", cfg.retry_budget, "0 = unbounded");
    sub->add_option("--stale-k", cfg.stale_agents_k, "frozen agents (dose)");
    sub->add_option("--seed", cfg.seed, "rng seed");
    sub->add_option("--trials", cfg.trials, "repeated trials");
  };

  auto* sub_si = app.add_subcommand("stale-injection",
                                    "engineered stale vs fresh commits");
  auto* sub_cs = app.add_subcommand("contention-sweep",
                                    "N writers on one shared key");
  std::vector<int> sweep_agents{4, 8, 16};
  sub_cs->add_option("--agents-list", sweep_agents, "N values to sweep");
  auto* sub_oi = app.add_subcommand("ori-isolation",
                                    "contribution preservation, paired modes");
  auto* sub_dr = app.add_subcommand("dose-response",
                                    "frozen-read-set commit-rate curve");
  auto* sub_dc = app.add_subcommand("divergence-counters",
                                    "view divergence instrumentation");
  auto* sub_en = app.add_subcommand("enumerate",
                                    "exhaustive schedule enumeration oracle");
  int en_shards = 2;
  std::uint64_t en_cap = 5'000'000;
  sub_en->add_option("--shards", en_shards, "shard count");
  sub_en->add_option("--cap", en_cap, "interleaving budget");
  auto* sub_st = app.add_subcommand("stats", "statistic utilities");
  std::vector<std::uint64_t> wilson_args;
  std::uint64_t rule3_n = 0;
  std::vector<double> budget_args;
  sub_st->add_option("--wilson", wilson_args, "successes n");
  sub_st->add_option("--rule-of-three", rule3_n, "n (zero events observed)");
  sub_st->add_option("--retry-budget-for", budget_args, "scr target");

  for (auto* sub : {sub_si, sub_cs, sub_oi, sub_dr, sub_dc, sub_en})
    add_common(sub);

  CLI11_PARSE(app, argc, argv);

  cfg.topology = topology == "dedicated" ? shardbus::Topology::Dedicated
                                         : shardbus::Topology::Shared;
  cfg.ori_enabled = mode != "off";

  if (sub_si->parsed()) {
    if (sub_si->count("--steps") == 0) cfg.steps = 200;
    auto target = make_target(server, true);
    return finish(hb::run_stale_injection(target.driver(), cfg), lines);
  }

  if (sub_cs->parsed()) {
    if (sub_cs->count("--steps") == 0) cfg.steps = 100;
    int rc = 0;
    for (int n : sweep_agents) {
      hb::ExperimentConfig c = cfg;
      c.n_agents = n;
      auto target = make_target(server, cfg.ori_enabled);
      auto report = hb::run_contention_sweep(target.driver(), c);
      std::printf("# N=%d\n", n);
      rc |= finish(report, lines);
    }
    return rc;
  }

  if (sub_oi->parsed()) {
    if (!server.empty()) {
      auto target = make_target(server, cfg.ori_enabled);
      return finish(hb::run_ori_isolation(target.driver(), cfg), lines);
    }
    auto on = make_target("", true);
    auto off = make_target("", false);
    hb::ExperimentConfig c_on = cfg, c_off = cfg;
    c_on.ori_enabled = true;
    c_off.ori_enabled = false;
    int rc = finish(hb::run_ori_isolation(on.driver(), c_on), lines);
    rc |= finish(hb::run_ori_isolation(off.driver(), c_off), lines);
    return rc;
  }

  if (sub_dr->parsed()) {
    if (sub_dr->count("--steps") == 0) cfg.steps = 20;
    auto target = make_target(server, true);
    return finish(hb::run_dose_response(target.driver(), cfg), lines);
  }

  if (sub_dc->parsed()) {
    if (!server.empty()) {
      auto target = make_target(server, cfg.ori_enabled);
      return finish(hb::run_divergence_counters(target.driver(), cfg), lines);
    }
    auto on = make_target("", true);
    auto off = make_target("", false);
    hb::ExperimentConfig c_on = cfg, c_off = cfg;
    c_on.ori_enabled = true;
    c_off.ori_enabled = false;
    int rc = finish(hb::run_divergence_counters(on.driver(), c_on), lines);
    rc |= finish(hb::run_divergence_counters(off.driver(), c_off), lines);
    return rc;
  }

  if (sub_en->parsed()) {
    shardbus::EnumerationConfig ec;
    ec.agents = cfg.n_agents;
    ec.shards = en_shards;
    ec.steps = cfg.steps;
    ec.ori_enabled = cfg.ori_enabled;
    ec.topology = cfg.topology;
    ec.interleaving_cap = en_cap;
    auto report = shardbus::enumerate_schedules(ec);
    if (!report.ok()) {
      std::printf("error=%s\n", shardbus::to_string(report.error()));
      return 2;
    }
    std::printf(
        "interleavings=%llu\nevents=%llu\nori_violations=%llu\n"
        "src_present=%llu\nsrc_committed=%llu\nsoundness_failures=%llu\n",
        static_cast<unsigned long long>(report->interleavings),
        static_cast<unsigned long long>(report->events_executed),
        static_cast<unsigned long long>(report->ori_violations),
        static_cast<unsigned long long>(report->src_present),
        static_cast<unsigned long long>(report->src_committed),
        static_cast<unsigned long long>(report->soundness_failures));
    const bool expects_violation =
        !cfg.ori_enabled && cfg.topology == shardbus::Topology::Shared;
    const bool clean = report->ori_violations == 0 &&
                       report->src_committed == 0 &&
                       report->soundness_failures == 0;
    return expects_violation ? (clean ? 1 : 0) : (clean ? 0 : 1);
  }

  if (sub_st->parsed()) {
    if (wilson_args.size() == 2) {
      auto w = shardbus::stats::wilson_ci(wilson_args[0], wilson_args[1]);
      if (w.ok()) std::printf("wilson_ci_95=%.6f,%.6f\n", w->lo, w->hi);
    }
    if (rule3_n > 0) {
      auto r = shardbus::stats::rule_of_three(rule3_n);
      if (r.ok()) std::printf("rule_of_three_ub=%.8g\n", *r);
    }
    if (budget_args.size() == 2) {
      auto k = shardbus::required_retry_budget(budget_args[0], budget_args[1]);
      if (k.ok())
        std::printf("required_retry_budget=%llu\n",
                    static_cast<unsigned long long>(*k));
      else
        std::printf("required_retry_budget=error:%s\n",
                    shardbus::to_string(k.error()));
    }
    return 0;
  }

  return 0;
}
