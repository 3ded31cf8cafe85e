#ifndef SHARDBUS_HISTORY_HPP
#define SHARDBUS_HISTORY_HPP

#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "shardbus/result.hpp"
#include "shardbus/types.hpp"

namespace shardbus {

enum class EventKind { Get, CommitOk, CommitReject };

constexpr const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Get: return "GET";
    case EventKind::CommitOk: return "COMMIT_OK";
    case EventKind::CommitReject: return "COMMIT_REJECT";
  }
  return "?";
}

/// One element of the global event trace. `version` is the version
/// observed for a Get, the new version for a CommitOk, and the expected
/// version for a CommitReject. `read_set` is the effective read-set the
/// commit was validated against (empty for Gets).
struct HistoryEvent {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Get;
  std::string agent;
  std::string key;
  Version version = 0;
  ReadSet read_set;

  friend bool operator==(const HistoryEvent&, const HistoryEvent&) = default;
};

/// Receives events from inside the registry/commit critical sections, so
/// the assigned seq order is a valid serialisation order.
class HistorySink {
 public:
  virtual ~HistorySink() = default;
  virtual void append(EventKind kind, const std::string& agent,
                      const std::string& key, Version version,
                      const ReadSet* read_set) = 0;
};

class HistoryRecorder final : public HistorySink {
 public:
  void append(EventKind kind, const std::string& agent, const std::string& key,
              Version version, const ReadSet* read_set) override;
  std::vector<HistoryEvent> events() const;
  void clear();

 private:
  mutable std::mutex mu_;
  std::vector<HistoryEvent> events_;
};

/// Line format, one event per line:
///   <seq> <kind> <agent> <key> <version> <k=v,k=v|->
std::string format_event(const HistoryEvent& e);
std::string format_history(const std::vector<HistoryEvent>& events);
Result<std::vector<HistoryEvent>> parse_history(const std::string& text);

}  // namespace shardbus

#endif  // SHARDBUS_HISTORY_HPP
