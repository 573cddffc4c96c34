#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qpvlab/rng.hpp"

namespace qpvlab {

/// One-dimensional layout, c = 1. Verifiers at `v1` < `v2`, the position
/// being claimed at `claimed`. `actual` holds where the other parties really
/// are ("P" for an honest prover, "M1"/"M2" for cheaters).
struct Geometry {
  double v1 = 0.0;
  double v2 = 2.0;
  double claimed = 1.0;
  std::map<std::string, double> actual;
  double tolerance = 0.0;
  double processing_delay = 0.0;

  /// V1 = 0, V2 = 2, claimed = 1, honest prover at the claimed point.
  static Geometry unit(double tolerance = 0.0);
  /// Unit geometry with cheaters at claimed -/+ offset.
  static Geometry cheaters(double offset = 0.5, double tolerance = 0.0);

  void validate() const;
  void validate_cheaters() const;
  double position(const std::string& party) const;
};

struct ArrivalSchedule {
  double t_send_v1;
  double t_send_v2;
  double arrival;  // both messages reach the claimed position at this time
};

/// Send times that make V1's and V2's messages meet at the claimed position.
/// V1 sends at t = 0.
ArrivalSchedule schedule_simultaneous_arrival(const Geometry& geometry);

struct Deadlines {
  double v1;
  double v2;
};

/// arrival + |claimed - v_i| + tolerance.
Deadlines verdict_deadlines(const Geometry& geometry);

/// Number of sequential M1 <-> M2 exchange rounds that still let both
/// cheaters answer their verifier by the deadline.
int max_exchange_rounds(const Geometry& geometry, int cap = 16);

// ---------------------------------------------------------------------------
// Messages

/// Named bit strings, kept in insertion order.
struct ClassicalMessage {
  std::vector<std::pair<std::string, Bits>> fields;

  ClassicalMessage() = default;
  ClassicalMessage(std::string key, Bits bits) { set(std::move(key), std::move(bits)); }

  const Bits& at(const std::string& key) const;
  bool has(const std::string& key) const;
  /// Adds or replaces `key`.
  void set(std::string key, Bits bits);
};

/// Reference to quantum subsystems travelling with a message.
struct QuantumHandle {
  std::vector<std::string> labels;
};

using Payload = std::variant<ClassicalMessage, QuantumHandle>;

bool is_quantum(const Payload& payload);
/// FNV-1a hash of the payload contents.
std::uint64_t digest(const Payload& payload);
/// 16 lowercase hex digits.
std::string digest_hex(std::uint64_t digest);

struct Message {
  std::string tag;
  std::string sender;
  std::string receiver;
  double send_time = 0.0;
  double arrival_time = 0.0;
  Payload payload;
};

enum class EventKind { Send, Receive, Compute };

const char* to_string(EventKind kind);

struct Event {
  double time;
  std::string party;
  EventKind kind;
  std::string tag;
  std::string peer;  // counterpart for send/receive, empty for compute
  std::uint64_t digest = 0;  // payload hash for send/receive
};

class EventLog {
 public:
  void append(Event e) { events_.push_back(std::move(e)); }
  void reserve(std::size_t n) { events_.reserve(n); }
  const std::vector<Event>& events() const { return events_; }
  bool empty() const { return events_.empty(); }
  /// One JSON object per line: time, party, kind, tag, peer, digest.
  std::string to_jsonl() const;

 private:
  std::vector<Event> events_;
};

// ---------------------------------------------------------------------------
// Engine

struct Party {
  std::string name;
  double position;
};

struct Outgoing {
  std::string receiver;
  std::string tag;
  Payload payload;
  /// Tags of messages this send relies on; each must already have reached
  /// the sender, else the engine raises CausalityViolation.
  std::vector<std::string> depends_on;
};

class PartyContext {
 public:
  /// `arrived` indexes `messages` in arrival order; only entries addressed to
  /// `self` are visible.
  PartyContext(std::string self, double now, const std::vector<Message>& messages,
               const std::vector<std::size_t>& arrived, EventLog& log)
      : self_(std::move(self)), now_(now), messages_(messages), arrived_(arrived), log_(log) {}

  const std::string& self() const { return self_; }
  double now() const { return now_; }
  bool has(const std::string& tag) const { return find(tag) != nullptr; }
  const Message& received(const std::string& tag) const;
  void note(const std::string& what);

 private:
  std::string self_;
  double now_;
  const Message* find(const std::string& tag) const;

  const std::vector<Message>& messages_;
  const std::vector<std::size_t>& arrived_;
  EventLog& log_;
};

using Handler = std::function<std::vector<Outgoing>(PartyContext&, const Message&)>;

struct InitialSend {
  std::string sender;
  double time;
  Outgoing message;
};

struct ChannelRules {
  /// Directed pairs allowed to carry quantum payloads; empty set = any pair.
  std::vector<std::pair<std::string, std::string>> quantum_links;
  bool restrict_quantum = false;
  /// Maximum number of messages per directed pair; absent = unlimited.
  std::map<std::pair<std::string, std::string>, int> budget;
};

struct Program {
  std::vector<InitialSend> initial;
  std::map<std::string, Handler> handlers;
  ChannelRules rules;
};

/// Delivery metadata of one message (payload omitted).
struct Delivery {
  std::string tag;
  std::string sender;
  std::string receiver;
  double send_time;
  double arrival_time;
};

struct RunResult {
  EventLog log;
  std::vector<Delivery> delivered;  // in delivery order
};

/// Deterministic discrete-event loop. Messages travel at c = 1; a party's
/// handler runs at each arrival and may emit further sends, which leave after
/// `processing_delay`. Ties in arrival time are broken by send order.
RunResult run_events(const std::vector<Party>& parties, const Program& program,
                     double processing_delay = 0.0);

/// True iff every receive in `result` happens at send_time + distance and no
/// earlier (within 1e-12).
bool causally_consistent(const RunResult& result, const std::vector<Party>& parties);

}  // namespace qpvlab
