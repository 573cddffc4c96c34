#include <doctest.h>

#include <sstream>

#include <json.hpp>

#include "qpvlab/errors.hpp"
#include "qpvlab/spacetime.hpp"

using namespace qpvlab;

namespace {

const std::vector<Party> kLine{{"A", 0.0}, {"B", 1.0}, {"C", 3.0}};

Outgoing note_to(std::string to, std::string tag, std::vector<std::string> deps = {}) {
  return {std::move(to), std::move(tag), ClassicalMessage("v", {1}), std::move(deps)};
}

}  // namespace

TEST_CASE("geometry validation") {
  CHECK_NOTHROW(Geometry::unit().validate());
  CHECK_NOTHROW(Geometry::cheaters().validate_cheaters());
  CHECK_THROWS_AS(Geometry::unit().validate_cheaters(), std::invalid_argument);
  CHECK_THROWS_AS(Geometry::cheaters(1.5).validate_cheaters(), std::invalid_argument);
  Geometry g = Geometry::unit();
  g.claimed = 3.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  CHECK_THROWS_AS(Geometry::unit(-1.0).validate(), std::invalid_argument);
  CHECK(Geometry::cheaters(0.25).position("M2") == 1.25);
}

TEST_CASE("simultaneous arrival schedule and deadlines") {
  Geometry g = Geometry::unit(0.05);
  g.claimed = 0.5;
  const auto s = schedule_simultaneous_arrival(g);
  CHECK(s.t_send_v1 == 0.0);
  CHECK(s.arrival == doctest::Approx(0.5));
  CHECK(s.t_send_v2 + (g.v2 - g.claimed) == doctest::Approx(s.arrival));
  const auto d = verdict_deadlines(g);
  CHECK(d.v1 == doctest::Approx(1.05));
  CHECK(d.v2 == doctest::Approx(2.05));
}

TEST_CASE("cheaters get exactly one simultaneous exchange") {
  CHECK(max_exchange_rounds(Geometry::cheaters(0.5)) == 1);
  CHECK(max_exchange_rounds(Geometry::cheaters(0.1)) == 1);
  CHECK(max_exchange_rounds(Geometry::cheaters(0.01)) == 1);
  Geometry slow = Geometry::cheaters(0.5);
  slow.processing_delay = 0.1;
  CHECK(max_exchange_rounds(slow) == 0);
  Geometry lax = Geometry::cheaters(0.1, 0.5);
  CHECK(max_exchange_rounds(lax) > 1);
}

TEST_CASE("messages arrive on the light cone in time order") {
  Program p;
  p.initial.push_back({"A", 0.0, note_to("C", "far")});
  p.initial.push_back({"A", 0.0, note_to("B", "near")});
  p.handlers["B"] = [](PartyContext& ctx, const Message& m) {
    CHECK(ctx.now() == doctest::Approx(1.0));
    CHECK(m.tag == "near");
    return std::vector<Outgoing>{note_to("C", "relay", {"near"})};
  };
  std::vector<std::string> seen;
  p.handlers["C"] = [&](PartyContext& ctx, const Message& m) {
    seen.push_back(m.tag);
    if (m.tag == "relay") {
      CHECK(ctx.has("far"));
      CHECK(ctx.received("far").arrival_time == doctest::Approx(3.0));
    }
    return std::vector<Outgoing>{};
  };
  const auto r = run_events(kLine, p);
  CHECK(seen == std::vector<std::string>{"far", "relay"});
  CHECK(causally_consistent(r, kLine));
  REQUIRE(r.delivered.size() == 3);
  CHECK(r.delivered[2].arrival_time == doctest::Approx(3.0));
}

TEST_CASE("ties in arrival are broken by send order") {
  Program p;
  p.initial.push_back({"A", 0.0, note_to("B", "first")});
  p.initial.push_back({"C", 0.0, note_to("B", "late")});
  p.initial.push_back({"C", -1.0, note_to("B", "second")});
  const auto r = run_events(kLine, p);
  std::vector<std::string> order;
  for (const auto& d : r.delivered) order.push_back(d.tag);
  CHECK(order == std::vector<std::string>{"first", "second", "late"});
}

TEST_CASE("processing delay postpones replies") {
  Program p;
  p.initial.push_back({"A", 0.0, note_to("B", "ping")});
  p.handlers["B"] = [](PartyContext&, const Message&) {
    return std::vector<Outgoing>{note_to("A", "pong", {"ping"})};
  };
  const auto r = run_events(kLine, p, 0.25);
  CHECK(r.delivered.back().send_time == doctest::Approx(1.25));
  CHECK(r.delivered.back().arrival_time == doctest::Approx(2.25));
  CHECK_THROWS_AS(run_events(kLine, p, -1.0), std::invalid_argument);
}

TEST_CASE("relying on a message that has not arrived is a causality violation") {
  Program p;
  p.initial.push_back({"A", 0.0, note_to("B", "go")});
  p.initial.push_back({"C", 0.0, note_to("B", "slow")});
  p.handlers["B"] = [](PartyContext& ctx, const Message& m) {
    if (m.tag == "go") CHECK_THROWS_AS(ctx.received("slow"), CausalityViolation);
    return std::vector<Outgoing>{note_to("A", "answer", {"go", "slow"})};
  };
  CHECK_THROWS_AS(run_events(kLine, p), CausalityViolation);
}

TEST_CASE("channel rules") {
  SUBCASE("quantum payload on a classical link") {
    Program p;
    p.rules.restrict_quantum = true;
    p.rules.quantum_links = {{"A", "B"}};
    p.initial.push_back({"A", 0.0, {"B", "ok", QuantumHandle{{"q"}}, {}}});
    CHECK_NOTHROW(run_events(kLine, p));
    p.initial.push_back({"A", 0.0, {"C", "bad", QuantumHandle{{"r"}}, {}}});
    CHECK_THROWS_AS(run_events(kLine, p), ProtocolViolation);
  }
  SUBCASE("budget") {
    Program p;
    p.rules.budget[{"A", "B"}] = 1;
    p.initial.push_back({"A", 0.0, note_to("B", "one")});
    CHECK_NOTHROW(run_events(kLine, p));
    p.initial.push_back({"A", 0.5, note_to("B", "two")});
    CHECK_THROWS_AS(run_events(kLine, p), ProtocolViolation);
  }
  SUBCASE("duplicate tag") {
    Program p;
    p.initial.push_back({"A", 0.0, note_to("B", "same")});
    p.initial.push_back({"C", 0.0, note_to("B", "same")});
    CHECK_THROWS_AS(run_events(kLine, p), ProtocolViolation);
  }
  SUBCASE("unknown receiver") {
    Program p;
    p.initial.push_back({"A", 0.0, note_to("Z", "x")});
    CHECK_THROWS_AS(run_events(kLine, p), std::invalid_argument);
  }
}

TEST_CASE("event log is deterministic JSON lines") {
  Program p;
  p.initial.push_back({"A", 0.0, note_to("B", "ping")});
  p.handlers["B"] = [](PartyContext& ctx, const Message&) {
    ctx.note("work");
    return std::vector<Outgoing>{};
  };
  const auto a = run_events(kLine, p).log.to_jsonl();
  const auto b = run_events(kLine, p).log.to_jsonl();
  CHECK(a == b);
  std::istringstream in(a);
  std::string line;
  std::vector<nlohmann::json> rows;
  while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0]["kind"] == "send");
  CHECK(rows[1]["kind"] == "receive");
  CHECK(rows[1]["digest"] == rows[0]["digest"]);
  CHECK(rows[2]["kind"] == "compute");
  CHECK(rows[2]["digest"].is_null());
}

TEST_CASE("payload digests") {
  CHECK(digest(ClassicalMessage("x", {0, 1})) == digest(ClassicalMessage("x", {0, 1})));
  CHECK(digest(ClassicalMessage("x", {0, 1})) != digest(ClassicalMessage("x", {1, 0})));
  CHECK(digest(ClassicalMessage("x", {})) != digest(QuantumHandle{{"x"}}));
  CHECK(digest_hex(0xabcULL) == "0000000000000abc");
  ClassicalMessage m("a", {1});
  m.set("b", {0});
  m.set("a", {0, 0});
  CHECK(m.fields.size() == 2);
  CHECK(m.at("a") == Bits{0, 0});
  CHECK_THROWS_AS(m.at("c"), std::invalid_argument);
}
