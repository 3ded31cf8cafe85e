#include "shardbus/http_service.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace shardbus {

using nlohmann::json;

namespace {

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code,
                 const std::string& detail = "") {
  json body{{"code", code}};
  if (!detail.empty()) body["detail"] = detail;
  reply_json(res, status, body);
}

void reply_commit_outcome(httplib::Response& res, const CommitOutcome& out) {
  switch (out.status) {
    case CommitStatus::Ok:
      reply_json(res, 200, json{{"new_version", out.new_version}});
      return;
    case CommitStatus::CrossShardStale:
      reply_error(res, 409, "CrossShardStale", out.stale_key);
      return;
    case CommitStatus::VersionMismatch:
      reply_error(res, 409, "VersionMismatch");
      return;
    case CommitStatus::OwnershipViolation:
      reply_error(res, 409, "OwnershipViolation");
      return;
    case CommitStatus::SessionExpired:
      reply_error(res, 410, "SessionExpired");
      return;
  }
}

}  // namespace

HttpService::HttpService(Node& node)
    : node_(node), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpService::~HttpService() { stop(); }

void HttpService::install_routes() {
  auto& svr = *server_;

  // A1 holds for HTTP/1.1 pipelines only; refuse upgrade attempts.
  svr.set_pre_routing_handler(
      [](const httplib::Request& req, httplib::Response& res) {
        if (req.has_header("Upgrade")) {
          reply_error(res, 422, "BadRequest", "protocol upgrade not supported");
          return httplib::Server::HandlerResponse::Handled;
        }
        return httplib::Server::HandlerResponse::Unhandled;
      });

  svr.Get(R"(/shard/([^/]+))", [this](const httplib::Request& req,
                                      httplib::Response& res) {
    if (!req.has_param("agent_id") || req.get_param_value("agent_id").empty()) {
      reply_error(res, 422, "BadRequest", "agent_id is required");
      return;
    }
    const std::string key = req.matches[1];
    const std::string agent = req.get_param_value("agent_id");
    // The recorded version is captured in the returned value inside the
    // registry critical section, per the read contract.
    auto r = node_.get_shard(key, agent);
    if (!r.ok()) {
      reply_error(res, 404, "UnknownKey", key);
      return;
    }
    reply_json(res, 200,
               json{{"key", key}, {"version", r->version}, {"content", r->content}});
  });

  svr.Post("/commit/v2", [this](const httplib::Request& req,
                                httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      reply_error(res, 422, "BadRequest", "body must be a JSON object");
      return;
    }
    if (!body.contains("key") || !body["key"].is_string() ||
        !body.contains("expected_version") ||
        !body["expected_version"].is_number_unsigned() ||
        !body.contains("delta") || !body["delta"].is_string() ||
        !body.contains("agent_id") || !body["agent_id"].is_string()) {
      reply_error(res, 422, "BadRequest",
                  "required: key, expected_version, delta, agent_id");
      return;
    }
    CommitRequest creq;
    creq.key = body["key"].get<std::string>();
    creq.expected_version = body["expected_version"].get<std::uint64_t>();
    creq.delta = body["delta"].get<std::string>();
    creq.agent = body["agent_id"].get<std::string>();
    if (body.contains("read_set")) {
      if (!body["read_set"].is_array()) {
        reply_error(res, 422, "BadRequest", "read_set must be an array");
        return;
      }
      ReadSet rs;
      for (const auto& item : body["read_set"]) {
        if (!item.is_object() || !item.contains("key") ||
            !item["key"].is_string() || !item.contains("version") ||
            !item["version"].is_number_unsigned()) {
          reply_error(res, 422, "BadRequest",
                      "read_set entries are {key, version}");
          return;
        }
        rs[item["key"].get<std::string>()] = item["version"].get<std::uint64_t>();
      }
      creq.explicit_read_set = std::move(rs);
    }
    auto out = node_.commit(creq);
    if (!out.ok()) {
      reply_error(res, 404, "UnknownKey", creq.key);
      return;
    }
    reply_commit_outcome(res, *out);
  });

  svr.Post("/admin/shard", [this](const httplib::Request& req,
                                  httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("key") ||
        !body["key"].is_string() || !body.contains("content") ||
        !body["content"].is_string()) {
      reply_error(res, 422, "BadRequest", "required: key, content");
      return;
    }
    auto r = node_.admin_create(body["key"].get<std::string>(),
                                body["content"].get<std::string>());
    if (!r.ok()) {
      reply_error(res, 409, "KeyExists", body["key"].get<std::string>());
      return;
    }
    reply_json(res, 201, json{{"key", body["key"]}, {"version", *r}});
  });

  svr.Post("/admin/reset",
           [this](const httplib::Request&, httplib::Response& res) {
             node_.admin_reset();
             res.status = 204;
           });

  svr.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
    const auto snap = node_.registry().snapshot();
    json shards = json::object();
    for (const auto& [key, state] : snap.entries)
      shards[key] = json{{"version", state.version}, {"content", state.content}};
    json owners = json::object();
    for (const auto& [key, owner] : snap.token_owners) owners[key] = owner;
    json sessions = json::object();
    for (const auto& [agent, view] : node_.delivery_log().sessions()) {
      json entries = json::array();
      for (const auto& e : view.entries)
        entries.push_back(json{{"key", e.key},
                               {"version", e.version},
                               {"observed_at_ms", e.observed_at_ms}});
      sessions[agent] = json{{"created_at_ms", view.created_at_ms},
                             {"expired", view.expired},
                             {"entries", std::move(entries)}};
    }
    reply_json(res, 200,
               json{{"counters",
                     json{{"gets", snap.counters.gets},
                          {"commits", snap.counters.commits},
                          {"rejects", snap.counters.rejects},
                          {"view_checked_commits",
                           snap.counters.view_checked_commits},
                          {"view_divergent_commits",
                           snap.counters.view_divergent_commits}}},
                    {"shards", std::move(shards)},
                    {"token_owners", std::move(owners)},
                    {"sessions", std::move(sessions)}});
  });

  svr.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    reply_json(res, 200, json{{"status", "ok"}});
  });
}

bool HttpService::start(const std::string& bind_addr, int port) {
  auto& svr = *server_;
  if (port == 0) {
    port_ = svr.bind_to_any_port(bind_addr);
    if (port_ < 0) return false;
  } else {
    if (!svr.bind_to_port(bind_addr, port)) return false;
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  svr.wait_until_ready();
  return true;
}

bool HttpService::run(const std::string& bind_addr, int port) {
  port_ = port;
  return server_->listen(bind_addr, port);
}

void HttpService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace shardbus
