#include "qpvlab/protocols.hpp"

#include <stdexcept>

#include "qpvlab/errors.hpp"

namespace qpvlab {

namespace {

constexpr double kTimingSlack = 1e-12;

std::vector<std::string> qubit_labels(std::size_t n, const std::string& prefix = "q") {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

const Povm& bb84_povm(std::uint8_t theta) {
  static const Povm p0 = Povm::bb84_basis(0);
  static const Povm p1 = Povm::bb84_basis(1);
  return theta ? p1 : p0;
}

ClassicalMessage classical(std::string key, Bits bits) {
  return ClassicalMessage(std::move(key), std::move(bits));
}

const ClassicalMessage& as_classical(const Message& m) {
  const auto* c = std::get_if<ClassicalMessage>(&m.payload);
  if (!c) throw ProtocolViolation("expected a classical message for '" + m.tag + "'");
  return *c;
}

void transfer(const Message& m, std::map<std::string, std::string>& owners) {
  if (const auto* q = std::get_if<QuantumHandle>(&m.payload))
    for (const auto& l : q->labels) owners[l] = m.receiver;
}

void check_bits(const Bits& b, std::size_t n, const char* what) {
  if (b.size() != n) throw std::invalid_argument(std::string(what) + " has the wrong length");
  for (auto v : b)
    if (v > 1) throw std::invalid_argument(std::string(what) + " must contain bits");
}

/// Verifier handlers recording the answer each one receives.
void add_verifiers(Program& program, QpvTranscript& t) {
  program.handlers["V1"] = [&t](PartyContext&, const Message& m) {
    if (m.tag == "answer") {
      t.answer_v1 = as_classical(m).at("x");
      t.arrival_v1 = m.arrival_time;
    }
    return std::vector<Outgoing>{};
  };
  program.handlers["V2"] = [&t](PartyContext&, const Message& m) {
    if (m.tag == "answer") {
      t.answer_v2 = as_classical(m).at("x");
      t.arrival_v2 = m.arrival_time;
    }
    return std::vector<Outgoing>{};
  };
}

void decide(QpvTranscript& t) {
  t.reasons.clear();
  if (t.answer_v1 != t.x || t.answer_v2 != t.x) t.reasons.push_back(RejectReason::WrongString);
  if (!t.arrival_v1 || *t.arrival_v1 > t.deadlines.v1 + kTimingSlack)
    t.reasons.push_back(RejectReason::LateV1);
  if (!t.arrival_v2 || *t.arrival_v2 > t.deadlines.v2 + kTimingSlack)
    t.reasons.push_back(RejectReason::LateV2);
  t.accepted = t.reasons.empty();
  t.degenerate = t.x.empty();
}

void start_verifiers(Program& program, const Geometry& geometry, const std::string& near_v1,
                     const std::string& near_v2, const std::vector<std::string>& qubits,
                     const Bits& theta) {
  const auto sched = schedule_simultaneous_arrival(geometry);
  program.initial.reserve(2);
  program.initial.push_back({"V1", sched.t_send_v1, {near_v1, "qubits", QuantumHandle{qubits}, {}}});
  program.initial.push_back({"V2", sched.t_send_v2, {near_v2, "theta", classical("theta", theta), {}}});
}

}  // namespace

// ---------------------------------------------------------------------------

bool WseTranscript::correct() const {
  for (std::size_t j = 0; j < index_set.size(); ++j)
    if (x_on_index[j] != x[index_set[j]]) return false;
  return true;
}

WseTranscript run_wse_honest(std::size_t n, Rng& rng, const WseOptions& options) {
  if (n < 1) throw std::invalid_argument("run_wse_honest: n must be at least 1");
  WseTranscript t;
  t.theta = options.theta ? *options.theta : rng.bits(n);
  t.theta_tilde = options.theta_tilde ? *options.theta_tilde : rng.bits(n);
  check_bits(t.theta, n, "theta");
  check_bits(t.theta_tilde, n, "theta~");

  QuantumRegister reg;
  std::map<std::string, std::string> owners;
  const auto qubits = qubit_labels(n);
  LocalLab alice("Alice", reg, owners);
  if (options.mode == AliceMode::PrepareAndSend) {
    t.x = rng.bits(n);
    for (std::size_t i = 0; i < n; ++i) {
      reg.add(bb84_encode(t.x[i], t.theta[i], qubits[i]));
      owners[qubits[i]] = "Alice";
    }
  } else {
    const auto kept = qubit_labels(n, "a");
    t.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      reg.add(bell_pair(kept[i], qubits[i]));
      owners[kept[i]] = "Alice";
      owners[qubits[i]] = "Alice";
    }
    for (std::size_t i = 0; i < n; ++i)
      t.x[i] = static_cast<std::uint8_t>(alice.measure(kept[i], bb84_povm(t.theta[i]), rng));
  }

  const std::vector<Party> parties{{"Alice", 0.0}, {"Bob", 1.0}};
  Program program;
  program.rules.restrict_quantum = true;
  program.rules.quantum_links = {{"Alice", "Bob"}};
  program.initial.push_back({"Alice", 0.0, {"Bob", "qubits", QuantumHandle{qubits}, {}}});
  // Alice announces Theta^n only after Bob has had the qubits (the waiting time).
  program.initial.push_back({"Alice", 1.0, {"Bob", "theta", classical("theta", t.theta), {}}});

  LocalLab bob("Bob", reg, owners);
  program.handlers["Bob"] = [&](PartyContext& ctx, const Message& m) {
    transfer(m, owners);
    if (m.tag == "qubits") {
      t.x_tilde.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        t.x_tilde[i] =
            static_cast<std::uint8_t>(bob.measure(qubits[i], bb84_povm(t.theta_tilde[i]), rng));
      ctx.note("measure");
    } else if (m.tag == "theta") {
      const Bits& theta = as_classical(ctx.received("theta")).at("theta");
      ctx.received("qubits");
      for (std::size_t i = 0; i < n; ++i)
        if (theta[i] == t.theta_tilde[i]) {
          t.index_set.push_back(i);
          t.x_on_index.push_back(t.x_tilde[i]);
        }
      ctx.note("index-set");
    }
    return std::vector<Outgoing>{};
  };
  t.log = run_events(parties, program).log;
  return t;
}

nlohmann::json to_json(const WseTranscript& t) {
  nlohmann::json j;
  j["x"] = bit_string(t.x);
  j["theta"] = bit_string(t.theta);
  j["theta_tilde"] = bit_string(t.theta_tilde);
  j["x_tilde"] = bit_string(t.x_tilde);
  j["index_set"] = t.index_set;
  j["x_on_index"] = bit_string(t.x_on_index);
  j["correct"] = t.correct();
  return j;
}

// ---------------------------------------------------------------------------

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::WrongString: return "wrong-string";
    case RejectReason::LateV1: return "late-v1";
    case RejectReason::LateV2: return "late-v2";
  }
  return "unknown";
}

QpvTranscript run_qpv_honest(std::size_t n, const Geometry& geometry, Rng& rng) {
  geometry.validate();
  QpvTranscript t;
  t.prover = "honest";
  t.x = rng.bits(n);
  t.theta = rng.bits(n);
  t.deadlines = verdict_deadlines(geometry);

  QuantumRegister reg;
  std::map<std::string, std::string> owners;
  const auto qubits = qubit_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    reg.add(bb84_encode(t.x[i], t.theta[i], qubits[i]));
    owners[qubits[i]] = "V1";
  }

  const double p = geometry.actual.count("P") ? geometry.actual.at("P") : geometry.claimed;
  const std::vector<Party> parties{{"V1", geometry.v1}, {"V2", geometry.v2}, {"P", p}};
  Program program;
  program.rules.restrict_quantum = true;
  program.rules.quantum_links = {{"V1", "P"}};
  start_verifiers(program, geometry, "P", "P", qubits, t.theta);
  add_verifiers(program, t);

  LocalLab lab("P", reg, owners);
  program.handlers["P"] = [&](PartyContext& ctx, const Message& m) {
    transfer(m, owners);
    std::vector<Outgoing> out;
    if (!ctx.has("qubits") || !ctx.has("theta")) return out;
    const Bits& theta = as_classical(ctx.received("theta")).at("theta");
    Bits answer(n);
    for (std::size_t i = 0; i < n; ++i)
      answer[i] = static_cast<std::uint8_t>(lab.measure(qubits[i], bb84_povm(theta[i]), rng));
    ctx.note("measure");
    const auto reply = classical("x", answer);
    out.push_back({"V1", "answer", reply, {"qubits", "theta"}});
    out.push_back({"V2", "answer", reply, {"qubits", "theta"}});
    return out;
  };
  t.log = run_events(parties, program, geometry.processing_delay).log;
  decide(t);
  return t;
}

QpvTranscript run_qpv_adversarial(std::size_t n, const Geometry& geometry,
                                  const Strategy& strategy, const ResourceSpec& resource,
                                  Rng& rng) {
  geometry.validate_cheaters();
  resource.validate();
  if (strategy.required_pairs() > resource.pairs)
    throw std::invalid_argument("strategy '" + strategy.name() + "' needs " +
                                std::to_string(strategy.required_pairs()) +
                                " shared pairs, resource has " + std::to_string(resource.pairs));
  QpvTranscript t;
  t.prover = strategy.name();
  t.x = rng.bits(n);
  t.theta = rng.bits(n);
  t.deadlines = verdict_deadlines(geometry);

  QuantumRegister reg;
  std::map<std::string, std::string> owners;
  const auto qubits = qubit_labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    reg.add(bb84_encode(t.x[i], t.theta[i], qubits[i]));
    owners[qubits[i]] = "V1";
  }
  resource.install(reg);
  const auto half1 = resource.m1_labels();
  const auto half2 = resource.m2_labels();
  for (const auto& l : half1) owners[l] = "M1";
  for (const auto& l : half2) owners[l] = "M2";

  const std::vector<Party> parties{{"V1", geometry.v1},
                                   {"V2", geometry.v2},
                                   {"M1", geometry.position("M1")},
                                   {"M2", geometry.position("M2")}};
  Program program;
  program.rules.restrict_quantum = true;
  program.rules.quantum_links = {{"V1", "M1"}};
  program.rules.budget = {{{"M1", "M2"}, 1}, {{"M2", "M1"}, 1}};
  start_verifiers(program, geometry, "M1", "M2", qubits, t.theta);
  add_verifiers(program, t);

  struct Cheater {
    std::string peer;
    std::string verifier;
    std::string input_tag;
    std::string own_tag;
    std::string peer_tag;
    LocalLab lab;
    bool first;  // M1
    std::optional<Memory> memory;
    bool done = false;
  };
  struct Coalition {
    const Strategy& strategy;
    QpvTranscript& t;
    std::map<std::string, std::string>& owners;
    const std::vector<std::string>& qubits;
    const std::vector<std::string>& half1;
    const std::vector<std::string>& half2;
    Rng& rng;

    std::vector<Outgoing> step(Cheater& me, PartyContext& ctx, const Message& m) {
      transfer(m, owners);
      std::vector<Outgoing> out;
      out.reserve(2);
      if (m.tag == me.input_tag && !me.memory) {
        PhaseOne p1 = me.first
                          ? strategy.phase1_m1(me.lab, qubits, half1, rng)
                          : strategy.phase1_m2(me.lab, as_classical(m).at("theta"), half2, rng);
        if (const auto* c = std::get_if<ClassicalMessage>(&p1.message))
          (me.first ? t.c1 : t.c2) = *c;
        out.push_back({me.peer, me.own_tag, std::move(p1.message), {me.input_tag}});
        me.memory = std::move(p1.memory);
        ctx.note("phase1");
      }
      if (me.memory && !me.done && ctx.has(me.peer_tag)) {
        const auto& from_peer = as_classical(ctx.received(me.peer_tag));
        PhaseTwo p2 = me.first ? strategy.phase2_m1(me.lab, from_peer, *me.memory, rng)
                               : strategy.phase2_m2(me.lab, from_peer, *me.memory, rng);
        me.done = true;
        ctx.note("phase2");
        out.push_back({me.verifier, "answer", classical("x", std::move(p2.guess)),
                       {me.input_tag, me.peer_tag}});
        if (p2.follow_up)
          out.push_back({me.peer, me.own_tag + "-again", std::move(*p2.follow_up), {me.peer_tag}});
      }
      return out;
    }
  };
  Cheater m1{"M2", "V1", "qubits", "c1", "c2", LocalLab("M1", reg, owners), true, {}, false};
  Cheater m2{"M1", "V2", "theta", "c2", "c1", LocalLab("M2", reg, owners), false, {}, false};
  Coalition coalition{strategy, t, owners, qubits, half1, half2, rng};
  program.handlers["M1"] = [c = &coalition, me = &m1](PartyContext& ctx, const Message& m) {
    return c->step(*me, ctx, m);
  };
  program.handlers["M2"] = [c = &coalition, me = &m2](PartyContext& ctx, const Message& m) {
    return c->step(*me, ctx, m);
  };

  t.log = run_events(parties, program, geometry.processing_delay).log;
  decide(t);
  return t;
}

std::string bit_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s.push_back(b ? '1' : '0');
  return s;
}

nlohmann::json to_json(const QpvTranscript& t, bool include_log) {
  const auto opt_bits = [](const std::optional<Bits>& b) {
    return b ? nlohmann::json(bit_string(*b)) : nlohmann::json(nullptr);
  };
  const auto opt_num = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  const auto msg = [](const std::optional<ClassicalMessage>& m) {
    if (!m) return nlohmann::json(nullptr);
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m->fields) j[k] = bit_string(v);
    return j;
  };
  nlohmann::json j;
  j["prover"] = t.prover;
  j["n"] = t.x.size();
  j["x"] = bit_string(t.x);
  j["theta"] = bit_string(t.theta);
  j["answer_v1"] = opt_bits(t.answer_v1);
  j["answer_v2"] = opt_bits(t.answer_v2);
  j["arrival_v1"] = opt_num(t.arrival_v1);
  j["arrival_v2"] = opt_num(t.arrival_v2);
  j["deadline_v1"] = t.deadlines.v1;
  j["deadline_v2"] = t.deadlines.v2;
  if (t.c1 || t.c2) {
    j["c1"] = msg(t.c1);
    j["c2"] = msg(t.c2);
  }
  j["accepted"] = t.accepted;
  j["reasons"] = nlohmann::json::array();
  for (auto r : t.reasons) j["reasons"].push_back(to_string(r));
  j["degenerate"] = t.degenerate;
  if (include_log) {
    j["events"] = nlohmann::json::array();
    for (const auto& e : t.log.events())
      j["events"].push_back({{"time", e.time},
                             {"party", e.party},
                             {"kind", to_string(e.kind)},
                             {"tag", e.tag},
                             {"peer", e.peer},
                             {"digest", e.kind == EventKind::Compute
                                            ? nlohmann::json(nullptr)
                                            : nlohmann::json(digest_hex(e.digest))}});
  }
  return j;
}

}  // namespace qpvlab
