#include "qpvlab/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "qpvlab/errors.hpp"

namespace qpvlab {

namespace {

constexpr double kTimingSlack = 1e-12;

}  // namespace

Geometry Geometry::unit(double tolerance) {
  Geometry g;
  g.actual["P"] = g.claimed;
  g.tolerance = tolerance;
  return g;
}

Geometry Geometry::cheaters(double offset, double tolerance) {
  Geometry g;
  g.actual["M1"] = g.claimed - offset;
  g.actual["M2"] = g.claimed + offset;
  g.tolerance = tolerance;
  return g;
}

void Geometry::validate() const {
  if (!(v1 < claimed && claimed < v2))
    throw std::invalid_argument("Geometry: need v1 < claimed < v2");
  if (tolerance < 0.0) throw std::invalid_argument("Geometry: negative timing tolerance");
  if (processing_delay < 0.0) throw std::invalid_argument("Geometry: negative processing delay");
  for (const auto& [name, pos] : actual)
    if (!std::isfinite(pos)) throw std::invalid_argument("Geometry: non-finite position for " + name);
}

void Geometry::validate_cheaters() const {
  validate();
  const auto m1 = actual.find("M1");
  const auto m2 = actual.find("M2");
  if (m1 == actual.end() || m2 == actual.end())
    throw std::invalid_argument("Geometry: cheater positions M1, M2 missing");
  if (!(v1 < m1->second && m1->second < claimed && claimed < m2->second && m2->second < v2))
    throw std::invalid_argument("Geometry: need v1 < M1 < claimed < M2 < v2");
}

double Geometry::position(const std::string& party) const {
  if (party == "V1") return v1;
  if (party == "V2") return v2;
  const auto it = actual.find(party);
  if (it == actual.end()) throw std::invalid_argument("Geometry: no position for '" + party + "'");
  return it->second;
}

ArrivalSchedule schedule_simultaneous_arrival(const Geometry& geometry) {
  geometry.validate();
  const double arrival = geometry.claimed - geometry.v1;
  return {0.0, arrival - (geometry.v2 - geometry.claimed), arrival};
}

Deadlines verdict_deadlines(const Geometry& geometry) {
  const auto sched = schedule_simultaneous_arrival(geometry);
  return {sched.arrival + (geometry.claimed - geometry.v1) + geometry.tolerance,
          sched.arrival + (geometry.v2 - geometry.claimed) + geometry.tolerance};
}

int max_exchange_rounds(const Geometry& geometry, int cap) {
  geometry.validate_cheaters();
  const auto sched = schedule_simultaneous_arrival(geometry);
  const auto deadlines = verdict_deadlines(geometry);
  const double m1 = geometry.position("M1");
  const double m2 = geometry.position("M2");
  const double d = m2 - m1;
  const double delay = geometry.processing_delay;
  double a = sched.t_send_v1 + (m1 - geometry.v1);  // M1 holds its input
  double b = sched.t_send_v2 + (geometry.v2 - m2);  // M2 holds its input
  const auto feasible = [&](double ta, double tb) {
    return ta + delay + (m1 - geometry.v1) <= deadlines.v1 + kTimingSlack &&
           tb + delay + (geometry.v2 - m2) <= deadlines.v2 + kTimingSlack;
  };
  if (!feasible(a, b)) return -1;
  int rounds = 0;
  while (rounds < cap) {
    const double na = std::max(a, b + delay + d);
    const double nb = std::max(b, a + delay + d);
    if (!feasible(na, nb)) break;
    a = na;
    b = nb;
    ++rounds;
  }
  return rounds;
}

// ---------------------------------------------------------------------------

const Bits& ClassicalMessage::at(const std::string& key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return v;
  throw std::invalid_argument("message has no field '" + key + "'");
}

bool ClassicalMessage::has(const std::string& key) const {
  for (const auto& f : fields)
    if (f.first == key) return true;
  return false;
}

void ClassicalMessage::set(std::string key, Bits bits) {
  for (auto& [k, v] : fields)
    if (k == key) {
      v = std::move(bits);
      return;
    }
  fields.emplace_back(std::move(key), std::move(bits));
}

bool is_quantum(const Payload& payload) { return std::holds_alternative<QuantumHandle>(payload); }

std::uint64_t digest(const Payload& payload) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  const auto mix_str = [&](const std::string& s) {
    for (unsigned char c : s) mix(c);
    mix(0);
  };
  if (const auto* q = std::get_if<QuantumHandle>(&payload)) {
    mix('Q');
    for (const auto& l : q->labels) mix_str(l);
  } else {
    mix('C');
    for (const auto& [key, bits] : std::get<ClassicalMessage>(payload).fields) {
      mix_str(key);
      for (auto b : bits) mix(b);
      mix(0xff);
    }
  }
  return h;
}

std::string digest_hex(std::uint64_t h) {
  std::string out(16, '0');
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Send: return "send";
    case EventKind::Receive: return "receive";
    case EventKind::Compute: return "compute";
  }
  return "unknown";
}

std::string EventLog::to_jsonl() const {
  std::string out;
  for (const auto& e : events_) {
    nlohmann::json j;
    j["time"] = e.time;
    j["party"] = e.party;
    j["kind"] = to_string(e.kind);
    j["tag"] = e.tag;
    j["peer"] = e.peer;
    if (e.kind == EventKind::Compute) {
      j["digest"] = nullptr;
    } else {
      j["digest"] = digest_hex(e.digest);
    }
    out += j.dump();
    out += '\n';
  }
  return out;
}

const Message* PartyContext::find(const std::string& tag) const {
  for (std::size_t i : arrived_) {
    const Message& m = messages_[i];
    if (m.tag == tag && m.receiver == self_) return &m;
  }
  return nullptr;
}

const Message& PartyContext::received(const std::string& tag) const {
  const Message* m = find(tag);
  if (!m) throw CausalityViolation(self_ + " read message '" + tag + "' before it arrived");
  return *m;
}

void PartyContext::note(const std::string& what) {
  log_.append({now_, self_, EventKind::Compute, what, "", 0});
}

// ---------------------------------------------------------------------------

namespace {

struct Pending {
  double arrival;
  std::size_t sequence;  // index into the message store
};

struct LaterFirst {
  bool operator()(const Pending& a, const Pending& b) const {
    if (a.arrival != b.arrival) return a.arrival > b.arrival;
    return a.sequence > b.sequence;
  }
};

class Engine {
 public:
  Engine(const std::vector<Party>& parties, const Program& program, double delay)
      : parties_(parties), program_(program), delay_(delay) {
    for (const auto& p : parties_)
      if (!std::isfinite(p.position)) throw std::invalid_argument("party with non-finite position");
    handlers_.reserve(parties_.size());
    for (const auto& p : parties_) {
      const auto h = program_.handlers.find(p.name);
      handlers_.push_back(h == program_.handlers.end() ? nullptr : &h->second);
    }
    for (const auto& [from, to] : program_.rules.quantum_links)
      if (has_party(from) && has_party(to)) quantum_links_.emplace_back(index(from), index(to));
    for (const auto& [link, limit] : program_.rules.budget)
      if (has_party(link.first) && has_party(link.second))
        budgets_.push_back({index(link.first), index(link.second), limit, 0});
  }

  RunResult run() {
    const std::size_t expected = 2 * program_.initial.size() + 8;
    result_.log.reserve(2 * expected);
    result_.delivered.reserve(expected);
    messages_.reserve(expected);
    routes_.reserve(expected);
    arrived_.reserve(expected);
    heap_.reserve(expected);
    for (const auto& init : program_.initial) send(index(init.sender), init.time, init.message);
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), LaterFirst{});
      const std::size_t next = heap_.back().sequence;
      heap_.pop_back();
      const Route route = routes_[next];
      const Message& msg = messages_[next];
      result_.log.append({msg.arrival_time, msg.receiver, EventKind::Receive, msg.tag, msg.sender,
                          route.digest});
      if (arrived_at(route.receiver, msg.tag))
        throw ProtocolViolation(msg.receiver + " received duplicate message tag '" + msg.tag + "'");
      arrived_.push_back(next);
      result_.delivered.push_back(
          {msg.tag, msg.sender, msg.receiver, msg.send_time, msg.arrival_time});
      const Handler* handler = handlers_[route.receiver];
      if (!handler) continue;
      const double now = msg.arrival_time;
      PartyContext ctx(msg.receiver, now, messages_, arrived_, result_.log);
      // `msg` may dangle once send() grows the store.
      for (auto& out : (*handler)(ctx, msg)) send(route.receiver, now + delay_, std::move(out));
    }
    return std::move(result_);
  }

 private:
  struct Route {
    std::size_t receiver;
    std::uint64_t digest;
  };
  struct Budget {
    std::size_t from;
    std::size_t to;
    int limit;
    int used;
  };

  bool has_party(const std::string& name) const {
    return std::any_of(parties_.begin(), parties_.end(),
                       [&](const Party& p) { return p.name == name; });
  }

  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < parties_.size(); ++i)
      if (parties_[i].name == name) return i;
    throw std::invalid_argument("unknown party '" + name + "'");
  }

  const Message* arrived_at(std::size_t party, const std::string& tag) const {
    for (std::size_t i : arrived_)
      if (routes_[i].receiver == party && messages_[i].tag == tag) return &messages_[i];
    return nullptr;
  }

  void send(std::size_t from, double time, Outgoing out) {
    const std::string& sender = parties_[from].name;
    const std::size_t to = index(out.receiver);
    for (const auto& dep : out.depends_on) {
      const Message* m = arrived_at(from, dep);
      if (!m || m->arrival_time > time + kTimingSlack)
        throw CausalityViolation(sender + " sent '" + out.tag + "' at t=" + std::to_string(time) +
                                 " relying on '" + dep + "' which has not arrived");
    }
    if (is_quantum(out.payload) && program_.rules.restrict_quantum &&
        std::find(quantum_links_.begin(), quantum_links_.end(), std::make_pair(from, to)) ==
            quantum_links_.end())
      throw ProtocolViolation("quantum payload on classical-only link " + sender + " -> " +
                              out.receiver);
    for (auto& b : budgets_)
      if (b.from == from && b.to == to && ++b.used > b.limit)
        throw ProtocolViolation("message budget exhausted on " + sender + " -> " + out.receiver +
                                " (tag '" + out.tag + "')");
    const double arrival = time + std::abs(parties_[to].position - parties_[from].position);
    const std::uint64_t d = digest(out.payload);
    result_.log.append({time, sender, EventKind::Send, out.tag, out.receiver, d});
    heap_.push_back({arrival, messages_.size()});
    std::push_heap(heap_.begin(), heap_.end(), LaterFirst{});
    messages_.push_back({std::move(out.tag), sender, std::move(out.receiver), time, arrival,
                         std::move(out.payload)});
    routes_.push_back({to, d});
  }

  const std::vector<Party>& parties_;
  const Program& program_;
  double delay_;
  std::vector<const Handler*> handlers_;
  std::vector<std::pair<std::size_t, std::size_t>> quantum_links_;
  std::vector<Budget> budgets_;
  std::vector<Message> messages_;  // in send order
  std::vector<Route> routes_;
  std::vector<std::size_t> arrived_;  // indices into messages_, in arrival order
  std::vector<Pending> heap_;
  RunResult result_;
};

}  // namespace

RunResult run_events(const std::vector<Party>& parties, const Program& program,
                     double processing_delay) {
  if (processing_delay < 0.0) throw std::invalid_argument("negative processing delay");
  return Engine(parties, program, processing_delay).run();
}

bool causally_consistent(const RunResult& result, const std::vector<Party>& parties) {
  const auto pos = [&](const std::string& name) {
    for (const auto& p : parties)
      if (p.name == name) return p.position;
    throw std::invalid_argument("unknown party '" + name + "'");
  };
  for (const auto& m : result.delivered) {
    const double earliest = m.send_time + std::abs(pos(m.receiver) - pos(m.sender));
    if (std::abs(m.arrival_time - earliest) > kTimingSlack) return false;
  }
  return true;
}

}  // namespace qpvlab
