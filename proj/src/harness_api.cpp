#include "shardbus/harness/api.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace shardbus::harness {

using nlohmann::json;

namespace {

json parse_body(const httplib::Result& r) {
  if (!r) return json();
  return json::parse(r->body, nullptr, false);
}

}  // namespace

Result<Version> HttpApi::admin_create(const std::string& key,
                                      const std::string& content) {
  httplib::Client cli(base_);
  auto r = cli.Post("/admin/shard", json{{"key", key}, {"content", content}}.dump(),
                    "application/json");
  if (!r || r->status == 409) return Error::KeyExists;
  auto body = parse_body(r);
  return body.value("version", Version{0});
}

bool HttpApi::admin_reset() {
  httplib::Client cli(base_);
  auto r = cli.Post("/admin/reset", "", "application/json");
  return r && r->status == 204;
}

Result<ReadResult> HttpApi::get_shard(const std::string& key,
                                      const std::string& agent) {
  httplib::Client cli(base_);
  auto r = cli.Get("/shard/" + key + "?agent_id=" + agent);
  if (!r || r->status != 200) return Error::UnknownKey;
  auto body = parse_body(r);
  return ReadResult{body.value("content", std::string{}),
                    body.value("version", Version{0})};
}

Result<CommitOutcome> HttpApi::commit(const CommitRequest& req) {
  json body{{"key", req.key},
            {"expected_version", req.expected_version},
            {"delta", req.delta},
            {"agent_id", req.agent}};
  if (req.explicit_read_set) {
    json rs = json::array();
    for (const auto& [k, v] : *req.explicit_read_set)
      rs.push_back(json{{"key", k}, {"version", v}});
    body["read_set"] = std::move(rs);
  }
  httplib::Client cli(base_);
  auto r = cli.Post("/commit/v2", body.dump(), "application/json");
  if (!r) return Error::UnknownKey;
  auto rb = parse_body(r);
  if (r->status == 200)
    return CommitOutcome{CommitStatus::Ok, rb.value("new_version", Version{0}), {}};
  if (r->status == 404) return Error::UnknownKey;
  const std::string code = rb.value("code", std::string{});
  if (code == "CrossShardStale")
    return CommitOutcome{CommitStatus::CrossShardStale, 0,
                         rb.value("detail", std::string{})};
  if (code == "VersionMismatch")
    return CommitOutcome{CommitStatus::VersionMismatch, 0, {}};
  if (code == "OwnershipViolation")
    return CommitOutcome{CommitStatus::OwnershipViolation, 0, {}};
  if (code == "SessionExpired")
    return CommitOutcome{CommitStatus::SessionExpired, 0, {}};
  return Error::UnknownKey;
}

Counters HttpApi::counters() {
  httplib::Client cli(base_);
  auto r = cli.Get("/stats");
  Counters c;
  if (!r || r->status != 200) return c;
  auto body = parse_body(r);
  auto cj = body.value("counters", json::object());
  c.gets = cj.value("gets", std::uint64_t{0});
  c.commits = cj.value("commits", std::uint64_t{0});
  c.rejects = cj.value("rejects", std::uint64_t{0});
  c.view_checked_commits = cj.value("view_checked_commits", std::uint64_t{0});
  c.view_divergent_commits =
      cj.value("view_divergent_commits", std::uint64_t{0});
  return c;
}

}  // namespace shardbus::harness
