#ifndef SHARDBUS_HTTP_SERVICE_HPP
#define SHARDBUS_HTTP_SERVICE_HPP

#include <memory>
#include <string>
#include <thread>

#include "shardbus/node.hpp"

namespace httplib {
class Server;
}

namespace shardbus {

/// HTTP/1.1 JSON front end over one node.
///
///   GET  /shard/{key}?agent_id=A   200 {key, version, content}
///   POST /commit/v2                200 {new_version} | 409 | 410 | 404
///   POST /admin/shard              201 | 409
///   POST /admin/reset              204
///   GET  /stats                    200 snapshot + counters + sessions
///   GET  /health                   200
///
/// Error bodies carry {code, detail?}. CrossShardStale and VersionMismatch
/// map to 409, SessionExpired to 410, UnknownKey to 404, malformed input
/// to 422. Protocol upgrades are refused; the server speaks HTTP/1.1 only.
class HttpService {
 public:
  explicit HttpService(Node& node);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds and serves on a background thread. port 0 picks a free port.
  bool start(const std::string& bind_addr, int port);
  /// Blocking variant for the daemon.
  bool run(const std::string& bind_addr, int port);
  void stop();

  int port() const { return port_; }

 private:
  void install_routes();

  Node& node_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace shardbus

#endif  // SHARDBUS_HTTP_SERVICE_HPP
