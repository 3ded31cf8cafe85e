#include <doctest.h>

#include "shardbus/history.hpp"
#include "shardbus/history_oracle.hpp"

using namespace shardbus;

namespace {

HistoryEvent ev(std::uint64_t seq, EventKind kind, std::string agent,
                std::string key, Version version, ReadSet rs = {}) {
  HistoryEvent e;
  e.seq = seq;
  e.kind = kind;
  e.agent = std::move(agent);
  e.key = std::move(key);
  e.version = version;
  e.read_set = std::move(rs);
  return e;
}

}  // namespace

TEST_CASE("a stale commit accepted without rejection is illegal") {
  // Two workers read the schema at v3; a third advances it; a worker then
  // commits its own shard against the superseded read and is accepted.
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "a2", "db_schema", 3),
      ev(2, EventKind::Get, "a3", "db_schema", 3),
      ev(3, EventKind::Get, "a1", "db_schema", 3),
      ev(4, EventKind::CommitOk, "a1", "db_schema", 4, {{"db_schema", 3}}),
      ev(5, EventKind::Get, "a2", "migration_script", 1),
      ev(6, EventKind::CommitOk, "a2", "migration_script", 2,
         {{"db_schema", 3}, {"migration_script", 1}}),
  };
  auto report = is_ori_legal(h);
  REQUIRE(report.ok());
  CHECK_FALSE(report->legal);
  REQUIRE(report->violations.size() == 1);
  CHECK(report->violations[0].kind ==
        Violation::Kind::CrossShardStaleAccepted);
  // Evidence: the recording read, the superseding commit, the bad commit.
  CHECK(report->violations[0].evidence ==
        std::vector<std::uint64_t>{1, 4, 6});
}

TEST_CASE("the same narrative with the rejection in place is legal") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "a2", "db_schema", 3),
      ev(2, EventKind::Get, "a1", "db_schema", 3),
      ev(3, EventKind::CommitOk, "a1", "db_schema", 4, {{"db_schema", 3}}),
      ev(4, EventKind::Get, "a2", "migration_script", 1),
      ev(5, EventKind::CommitReject, "a2", "migration_script", 1,
         {{"db_schema", 3}, {"migration_script", 1}}),
      ev(6, EventKind::Get, "a2", "db_schema", 4),
      ev(7, EventKind::CommitOk, "a2", "migration_script", 2,
         {{"db_schema", 4}, {"migration_script", 1}}),
  };
  auto report = is_ori_legal(h);
  REQUIRE(report.ok());
  CHECK(report->legal);
}

TEST_CASE("any single-agent sequential history is legal") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "solo", "a", 1),
      ev(2, EventKind::Get, "solo", "b", 1),
      ev(3, EventKind::CommitOk, "solo", "a", 2, {{"a", 1}, {"b", 1}}),
      ev(4, EventKind::Get, "solo", "a", 2),
      ev(5, EventKind::Get, "solo", "b", 1),
      ev(6, EventKind::CommitOk, "solo", "b", 2, {{"a", 2}, {"b", 1}}),
  };
  auto report = is_ori_legal(h);
  REQUIRE(report.ok());
  CHECK(report->legal);
}

TEST_CASE("non-serialized double write is flagged") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "x", "k", 1),
      ev(2, EventKind::Get, "y", "k", 1),
      ev(3, EventKind::CommitOk, "x", "k", 2, {{"k", 1}}),
      // A second accepted write producing the same version: lost update.
      ev(4, EventKind::CommitOk, "y", "k", 2, {{"k", 1}}),
  };
  auto report = is_ori_legal(h);
  REQUIRE(report.ok());
  CHECK_FALSE(report->legal);
  bool found = false;
  for (const auto& v : report->violations)
    if (v.kind == Violation::Kind::WriteWriteUnserialized) found = true;
  CHECK(found);
}

TEST_CASE("malformed histories are rejected") {
  SUBCASE("gap in seq") {
    std::vector<HistoryEvent> h{
        ev(1, EventKind::Get, "a", "k", 1),
        ev(3, EventKind::CommitOk, "a", "k", 2, {{"k", 1}}),
    };
    CHECK_FALSE(is_ori_legal(h).ok());
    CHECK_FALSE(contains_src(h, "k").ok());
  }
  SUBCASE("accepted commit referencing a read that never happened") {
    std::vector<HistoryEvent> h{
        ev(1, EventKind::Get, "a", "k", 1),
        ev(2, EventKind::CommitOk, "a", "k", 2, {{"k", 1}, {"ghost", 4}}),
    };
    auto r = is_ori_legal(h);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error() == Error::MalformedHistory);
  }
}

TEST_CASE("src: both read v1 and both attempt expected 1") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "x", "k", 1),
      ev(2, EventKind::Get, "y", "k", 1),
      ev(3, EventKind::CommitOk, "x", "k", 2, {{"k", 1}}),
      ev(4, EventKind::CommitReject, "y", "k", 1, {{"k", 1}}),
  };
  auto src = contains_src(h, "k");
  REQUIRE(src.ok());
  CHECK(src->present);
  CHECK_FALSE(src->second_committed);  // the guard fired
  CHECK(src->evidence == std::vector<std::uint64_t>{1, 2, 3, 4});
}

TEST_CASE("src with the second attempt accepted marks the corruption") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "x", "k", 1),
      ev(2, EventKind::Get, "y", "k", 1),
      ev(3, EventKind::CommitOk, "x", "k", 2, {{"k", 1}}),
      ev(4, EventKind::CommitOk, "y", "k", 3, {{"k", 1}}),
  };
  auto src = contains_src(h, "k");
  REQUIRE(src.ok());
  CHECK(src->present);
  CHECK(src->second_committed);
}

TEST_CASE("an intervening re-read dissolves the race") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "x", "k", 1),
      ev(2, EventKind::Get, "y", "k", 1),
      ev(3, EventKind::CommitOk, "x", "k", 2, {{"k", 1}}),
      ev(4, EventKind::Get, "y", "k", 2),
      ev(5, EventKind::CommitOk, "y", "k", 3, {{"k", 2}}),
  };
  auto src = contains_src(h, "k");
  REQUIRE(src.ok());
  CHECK_FALSE(src->present);
}

TEST_CASE("src detection is key-scoped") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "x", "k", 1),
      ev(2, EventKind::Get, "y", "k", 1),
      ev(3, EventKind::CommitOk, "x", "k", 2, {{"k", 1}}),
      ev(4, EventKind::CommitReject, "y", "k", 1, {{"k", 1}}),
  };
  auto other = contains_src(h, "unrelated");
  REQUIRE(other.ok());
  CHECK_FALSE(other->present);
}

TEST_CASE("history lines round-trip through the text format") {
  std::vector<HistoryEvent> h{
      ev(1, EventKind::Get, "a1", "db_schema", 3),
      ev(2, EventKind::CommitReject, "a2", "migration_script", 1,
         {{"db_schema", 3}, {"migration_script", 1}}),
      ev(3, EventKind::CommitOk, "a1", "db_schema", 4, {{"db_schema", 3}}),
  };
  const std::string text = format_history(h);
  auto parsed = parse_history(text);
  REQUIRE(parsed.ok());
  CHECK(*parsed == h);

  CHECK(format_event(h[0]) == "1 GET a1 db_schema 3 -");
  CHECK(format_event(h[1]) ==
        "2 COMMIT_REJECT a2 migration_script 1 db_schema=3,migration_script=1");
}

TEST_CASE("garbage lines fail to parse") {
  CHECK_FALSE(parse_history("1 GET onlyfour 3").ok());
  CHECK_FALSE(parse_history("x GET a k 3 -").ok());
  CHECK_FALSE(parse_history("1 NOPE a k 3 -").ok());
  CHECK_FALSE(parse_history("1 GET a k 3 ,=,").ok());
}
