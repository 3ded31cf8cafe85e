#include <doctest.h>

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "shardbus/clock.hpp"
#include "shardbus/http_service.hpp"
#include "shardbus/node.hpp"

using namespace shardbus;
using nlohmann::json;

namespace {

struct ServerRig {
  ManualClock clock;
  Node node;
  HttpService service;
  httplib::Client client;

  explicit ServerRig(NodeConfig cfg = {})
      : node(cfg, &clock),
        service(node),
        client("127.0.0.1", [&] {
          REQUIRE(service.start("127.0.0.1", 0));
          return service.port();
        }()) {}

  json post_json(const std::string& path, const json& body, int expect) {
    auto r = client.Post(path, body.dump(), "application/json");
    REQUIRE(r);
    CHECK(r->status == expect);
    return r->body.empty() ? json() : json::parse(r->body);
  }
};

}  // namespace

TEST_CASE("read endpoint round-trips and records the session entry") {
  ServerRig rig;
  rig.post_json("/admin/shard", {{"key", "db_schema"}, {"content", "v1 dialect"}},
                201);

  auto r = rig.client.Get("/shard/db_schema?agent_id=a2");
  REQUIRE(r);
  CHECK(r->status == 200);
  auto body = json::parse(r->body);
  CHECK(body["key"] == "db_schema");
  CHECK(body["version"] == 1);
  CHECK(body["content"] == "v1 dialect");

  auto stats = rig.client.Get("/stats");
  auto sessions = json::parse(stats->body)["sessions"];
  REQUIRE(sessions.contains("a2"));
  CHECK(sessions["a2"]["entries"][0]["key"] == "db_schema");
  CHECK(sessions["a2"]["entries"][0]["version"] == 1);
}

TEST_CASE("missing agent_id is rejected, not silently permitted") {
  ServerRig rig;
  rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c"}}, 201);
  auto r = rig.client.Get("/shard/k");
  REQUIRE(r);
  CHECK(r->status == 422);
  CHECK(json::parse(r->body)["code"] == "BadRequest");
}

TEST_CASE("unknown keys are 404 on read and commit") {
  ServerRig rig;
  auto r = rig.client.Get("/shard/missing?agent_id=a1");
  REQUIRE(r);
  CHECK(r->status == 404);
  CHECK(json::parse(r->body)["code"] == "UnknownKey");

  rig.post_json("/commit/v2",
                {{"key", "missing"},
                 {"expected_version", 1},
                 {"delta", "x"},
                 {"agent_id", "a1"}},
                404);
}

TEST_CASE("commit flow over the wire") {
  ServerRig rig;
  rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c0"}}, 201);
  rig.post_json("/admin/shard", {{"key", "sib"}, {"content", "s0"}}, 201);

  // Read both, then a second agent advances the sibling.
  CHECK(rig.client.Get("/shard/k?agent_id=a1")->status == 200);
  CHECK(rig.client.Get("/shard/sib?agent_id=a1")->status == 200);
  CHECK(rig.client.Get("/shard/sib?agent_id=adv")->status == 200);
  rig.post_json("/commit/v2",
                {{"key", "sib"},
                 {"expected_version", 1},
                 {"delta", "s1"},
                 {"agent_id", "adv"}},
                200);

  auto stale = rig.post_json("/commit/v2",
                             {{"key", "k"},
                              {"expected_version", 1},
                              {"delta", "c1"},
                              {"agent_id", "a1"}},
                             409);
  CHECK(stale["code"] == "CrossShardStale");
  CHECK(stale["detail"] == "sib");

  // Recover, commit, then replay the same request.
  CHECK(rig.client.Get("/shard/sib?agent_id=a1")->status == 200);
  auto ok = rig.post_json("/commit/v2",
                          {{"key", "k"},
                           {"expected_version", 1},
                           {"delta", "c1"},
                           {"agent_id", "a1"}},
                          200);
  CHECK(ok["new_version"] == 2);

  auto replay = rig.post_json("/commit/v2",
                              {{"key", "k"},
                               {"expected_version", 1},
                               {"delta", "c1"},
                               {"agent_id", "a1"}},
                              409);
  CHECK(replay["code"] == "VersionMismatch");
}

TEST_CASE("explicit read-set declarations ride the commit body") {
  ServerRig rig;
  rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c0"}}, 201);
  rig.post_json("/admin/shard", {{"key", "sib"}, {"content", "s0"}}, 201);
  CHECK(rig.client.Get("/shard/k?agent_id=a1")->status == 200);

  auto out = rig.post_json("/commit/v2",
                           {{"key", "k"},
                            {"expected_version", 1},
                            {"delta", "c1"},
                            {"agent_id", "a1"},
                            {"read_set", json::array({json{{"key", "sib"},
                                                           {"version", 9}}})}},
                           409);
  CHECK(out["code"] == "CrossShardStale");
  CHECK(out["detail"] == "sib");
}

TEST_CASE("session expiry surfaces as 410") {
  NodeConfig cfg;
  cfg.session_ttl_ms = 100;
  ServerRig rig(cfg);
  rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c0"}}, 201);
  CHECK(rig.client.Get("/shard/k?agent_id=a1")->status == 200);
  rig.clock.advance_ms(200);
  auto out = rig.post_json("/commit/v2",
                           {{"key", "k"},
                            {"expected_version", 1},
                            {"delta", "c1"},
                            {"agent_id", "a1"}},
                           410);
  CHECK(out["code"] == "SessionExpired");

  // Re-issuing the read re-opens the session.
  CHECK(rig.client.Get("/shard/k?agent_id=a1")->status == 200);
  rig.post_json("/commit/v2",
                {{"key", "k"},
                 {"expected_version", 1},
                 {"delta", "c1"},
                 {"agent_id", "a1"}},
                200);
}

TEST_CASE("ownership violations map to 409") {
  NodeConfig cfg;
  cfg.ownership_enforced = true;
  ServerRig rig(cfg);
  rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c0"}}, 201);
  CHECK(rig.client.Get("/shard/k?agent_id=alice")->status == 200);
  rig.post_json("/commit/v2",
                {{"key", "k"},
                 {"expected_version", 1},
                 {"delta", "a"},
                 {"agent_id", "alice"}},
                200);
  CHECK(rig.client.Get("/shard/k?agent_id=bob")->status == 200);
  auto out = rig.post_json("/commit/v2",
                           {{"key", "k"},
                            {"expected_version", 2},
                            {"delta", "b"},
                            {"agent_id", "bob"}},
                           409);
  CHECK(out["code"] == "OwnershipViolation");
}

TEST_CASE("malformed bodies are 422") {
  ServerRig rig;
  auto r = rig.client.Post("/commit/v2", "{not json", "application/json");
  REQUIRE(r);
  CHECK(r->status == 422);

  rig.post_json("/commit/v2", {{"key", "k"}}, 422);
  rig.post_json("/commit/v2",
                {{"key", "k"},
                 {"expected_version", "one"},
                 {"delta", "d"},
                 {"agent_id", "a"}},
                422);
  rig.post_json("/admin/shard", {{"key", "k"}}, 422);
  rig.post_json("/commit/v2",
                {{"key", "k"},
                 {"expected_version", 1},
                 {"delta", "d"},
                 {"agent_id", "a"},
                 {"read_set", "nope"}},
                422);
}

TEST_CASE("admin surface: duplicate creation, reset, stats, health") {
  ServerRig rig;
  auto health = rig.client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto stats0 = json::parse(rig.client.Get("/stats")->body);
  CHECK(stats0["counters"]["gets"] == 0);
  CHECK(stats0["counters"]["commits"] == 0);

  rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c"}}, 201);
  auto dup = rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c"}}, 409);
  CHECK(dup["code"] == "KeyExists");

  CHECK(rig.client.Get("/shard/k?agent_id=a")->status == 200);
  rig.post_json("/commit/v2",
                {{"key", "k"},
                 {"expected_version", 1},
                 {"delta", "c1"},
                 {"agent_id", "a"}},
                200);
  auto stats1 = json::parse(rig.client.Get("/stats")->body);
  CHECK(stats1["counters"]["commits"] == 1);
  CHECK(stats1["counters"]["gets"] == 1);
  CHECK(stats1["counters"]["view_checked_commits"] == 1);
  CHECK(stats1["shards"]["k"]["version"] == 2);
  CHECK(stats1["token_owners"]["k"] == "a");

  auto reset = rig.client.Post("/admin/reset", "", "application/json");
  REQUIRE(reset);
  CHECK(reset->status == 204);
  CHECK(rig.client.Get("/shard/k?agent_id=a")->status == 404);
  auto stats2 = json::parse(rig.client.Get("/stats")->body);
  CHECK(stats2["counters"]["gets"] == 0);
  CHECK(stats2["sessions"].empty());
}

TEST_CASE("protocol upgrades are refused") {
  ServerRig rig;
  httplib::Headers headers{{"Upgrade", "h2c"}, {"Connection", "Upgrade"}};
  auto r = rig.client.Get("/health", headers);
  REQUIRE(r);
  CHECK(r->status == 422);
}

TEST_CASE("server mode flag toggles exactly the validation steps") {
  NodeConfig cfg;
  cfg.ori_enabled = false;
  ServerRig rig(cfg);
  rig.post_json("/admin/shard", {{"key", "k"}, {"content", "c0"}}, 201);
  rig.post_json("/admin/shard", {{"key", "sib"}, {"content", "s0"}}, 201);
  CHECK(rig.client.Get("/shard/k?agent_id=a1")->status == 200);
  CHECK(rig.client.Get("/shard/sib?agent_id=a1")->status == 200);
  CHECK(rig.client.Get("/shard/sib?agent_id=adv")->status == 200);
  rig.post_json("/commit/v2",
                {{"key", "sib"},
                 {"expected_version", 1},
                 {"delta", "s1"},
                 {"agent_id", "adv"}},
                200);

  // Stale sibling and wrong expected version, still accepted; the
  // divergence is counted.
  auto out = rig.post_json("/commit/v2",
                           {{"key", "k"},
                            {"expected_version", 42},
                            {"delta", "c1"},
                            {"agent_id", "a1"}},
                           200);
  CHECK(out["new_version"] == 2);
  auto stats = json::parse(rig.client.Get("/stats")->body);
  CHECK(stats["counters"]["view_divergent_commits"] == 1);
  CHECK(stats["counters"]["rejects"] == 0);
}
