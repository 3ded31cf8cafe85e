#ifndef SHARDBUS_HARNESS_API_HPP
#define SHARDBUS_HARNESS_API_HPP

#include <memory>
#include <string>

#include "shardbus/history.hpp"
#include "shardbus/node.hpp"
#include "shardbus/result.hpp"
#include "shardbus/types.hpp"

namespace shardbus::harness {

/// The agent-facing surface. Both transports expose the same calls so
/// every agent script runs unchanged in-process or against a live server.
class Api {
 public:
  virtual ~Api() = default;
  virtual Result<Version> admin_create(const std::string& key,
                                       const std::string& content) = 0;
  virtual bool admin_reset() = 0;
  virtual Result<ReadResult> get_shard(const std::string& key,
                                       const std::string& agent) = 0;
  virtual Result<CommitOutcome> commit(const CommitRequest& req) = 0;
  virtual Counters counters() = 0;
};

class InProcApi final : public Api {
 public:
  explicit InProcApi(Node& node) : node_(node) {}
  Result<Version> admin_create(const std::string& key,
                               const std::string& content) override {
    return node_.admin_create(key, content);
  }
  bool admin_reset() override {
    node_.admin_reset();
    return true;
  }
  Result<ReadResult> get_shard(const std::string& key,
                               const std::string& agent) override {
    return node_.get_shard(key, agent);
  }
  Result<CommitOutcome> commit(const CommitRequest& req) override {
    return node_.commit(req);
  }
  Counters counters() override { return node_.registry().snapshot().counters; }

  Node& node() { return node_; }

 private:
  Node& node_;
};

/// Drives a live server over its JSON API. Each call issues a fresh
/// request; per-agent ordering is preserved because calls are synchronous.
class HttpApi final : public Api {
 public:
  /// base like "http://127.0.0.1:7000"
  explicit HttpApi(std::string base) : base_(std::move(base)) {}

  Result<Version> admin_create(const std::string& key,
                               const std::string& content) override;
  bool admin_reset() override;
  Result<ReadResult> get_shard(const std::string& key,
                               const std::string& agent) override;
  Result<CommitOutcome> commit(const CommitRequest& req) override;
  Counters counters() override;

 private:
  std::string base_;
};

/// An Api plus the trace needed for independent post-hoc audits; the
/// recorder is only available for the in-process transport.
struct Driver {
  Api& api;
  HistoryRecorder* recorder = nullptr;
};

}  // namespace shardbus::harness

#endif  // SHARDBUS_HARNESS_API_HPP
