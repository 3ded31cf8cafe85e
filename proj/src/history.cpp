#include "shardbus/history.hpp"

#include <charconv>
#include <sstream>

namespace shardbus {

void HistoryRecorder::append(EventKind kind, const std::string& agent,
                             const std::string& key, Version version,
                             const ReadSet* read_set) {
  std::lock_guard lk(mu_);
  HistoryEvent e;
  e.seq = events_.size() + 1;
  e.kind = kind;
  e.agent = agent;
  e.key = key;
  e.version = version;
  if (read_set != nullptr) e.read_set = *read_set;
  events_.push_back(std::move(e));
}

std::vector<HistoryEvent> HistoryRecorder::events() const {
  std::lock_guard lk(mu_);
  return events_;
}

void HistoryRecorder::clear() {
  std::lock_guard lk(mu_);
  events_.clear();
}

std::string format_event(const HistoryEvent& e) {
  std::ostringstream os;
  os << e.seq << ' ' << to_string(e.kind) << ' ' << e.agent << ' ' << e.key
     << ' ' << e.version << ' ';
  if (e.read_set.empty()) {
    os << '-';
  } else {
    bool first = true;
    for (const auto& [k, v] : e.read_set) {
      if (!first) os << ',';
      first = false;
      os << k << '=' << v;
    }
  }
  return os.str();
}

std::string format_history(const std::vector<HistoryEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

namespace {

bool parse_u64(const std::string& s, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

Result<std::vector<HistoryEvent>> parse_history(const std::string& text) {
  std::vector<HistoryEvent> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string seq_s, kind_s, agent, key, ver_s, rs_s;
    if (!(ls >> seq_s >> kind_s >> agent >> key >> ver_s >> rs_s))
      return Error::MalformedHistory;
    HistoryEvent e;
    if (!parse_u64(seq_s, e.seq) || !parse_u64(ver_s, e.version))
      return Error::MalformedHistory;
    if (kind_s == "GET")
      e.kind = EventKind::Get;
    else if (kind_s == "COMMIT_OK")
      e.kind = EventKind::CommitOk;
    else if (kind_s == "COMMIT_REJECT")
      e.kind = EventKind::CommitReject;
    else
      return Error::MalformedHistory;
    e.agent = agent;
    e.key = key;
    if (rs_s != "-") {
      std::size_t pos = 0;
      while (pos < rs_s.size()) {
        std::size_t comma = rs_s.find(',', pos);
        if (comma == std::string::npos) comma = rs_s.size();
        std::string pair = rs_s.substr(pos, comma - pos);
        std::size_t eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) return Error::MalformedHistory;
        std::uint64_t v = 0;
        if (!parse_u64(pair.substr(eq + 1), v)) return Error::MalformedHistory;
        e.read_set[pair.substr(0, eq)] = v;
        pos = comma + 1;
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace shardbus
