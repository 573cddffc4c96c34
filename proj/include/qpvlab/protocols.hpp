#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpvlab/spacetime.hpp"
#include "qpvlab/strategy.hpp"

namespace qpvlab {

// ---------------------------------------------------------------------------
// Weak string erasure

enum class AliceMode {
  PrepareAndSend,  // Alice sends H^theta_i |x_i>
  Entangled,       // Alice keeps halves of |Phi+>^n and measures them in Theta^n
};

struct WseOptions {
  AliceMode mode = AliceMode::PrepareAndSend;
  std::optional<Bits> theta;        // Alice's bases, drawn uniformly if absent
  std::optional<Bits> theta_tilde;  // Bob's bases, drawn uniformly if absent
};

struct WseTranscript {
  Bits x;
  Bits theta;
  Bits theta_tilde;
  Bits x_tilde;
  std::vector<std::size_t> index_set;  // I = { i : theta_i = theta~_i }
  Bits x_on_index;                     // X^I as seen by Bob
  EventLog log;

  /// Bob's string agrees with Alice's on I.
  bool correct() const;
};

/// Honest WSE between Alice and Bob. The waiting time between the qubit
/// transmission and Alice's basis announcement is a phase boundary only.
WseTranscript run_wse_honest(std::size_t n, Rng& rng, const WseOptions& options = {});

nlohmann::json to_json(const WseTranscript& t);

// ---------------------------------------------------------------------------
// Position verification

enum class RejectReason { WrongString, LateV1, LateV2 };

const char* to_string(RejectReason r);

struct QpvTranscript {
  std::string prover;  // "honest" or the strategy name
  Bits x;
  Bits theta;
  std::optional<Bits> answer_v1;
  std::optional<Bits> answer_v2;
  std::optional<double> arrival_v1;
  std::optional<double> arrival_v2;
  Deadlines deadlines{};
  std::optional<ClassicalMessage> c1;  // cheaters' exchange, adversarial runs only
  std::optional<ClassicalMessage> c2;
  bool accepted = false;
  std::vector<RejectReason> reasons;
  bool degenerate = false;  // n = 0: accepted vacuously
  EventLog log;
};

/// V1 sends the BB84 qubits, V2 sends Theta^n so both reach the claimed
/// position together. The prover sits at geometry.actual["P"] (the claimed
/// position if absent), measures, and answers both verifiers.
QpvTranscript run_qpv_honest(std::size_t n, const Geometry& geometry, Rng& rng);

/// Same verifiers against cheaters M1, M2 at geometry.actual["M1"], ["M2"]
/// following `strategy` with `resource` pre-shared. The engine allows a
/// quantum payload only on V1 -> M1 and one message each way between the
/// cheaters; anything else raises ProtocolViolation.
QpvTranscript run_qpv_adversarial(std::size_t n, const Geometry& geometry,
                                  const Strategy& strategy, const ResourceSpec& resource,
                                  Rng& rng);

nlohmann::json to_json(const QpvTranscript& t, bool include_log = false);

std::string bit_string(const Bits& bits);

}  // namespace qpvlab
