#pragma once

#include <stdexcept>
#include <string>

namespace qpvlab {

/// A quantity was requested outside the domain where the formulas say anything.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The security bound makes no statement for these parameters (e.g. E_max > n).
class VacuousBound : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A cheating strategy stepped outside the NEM interface: a quantum payload
/// between cheaters, or more classical crossings than the timing admits.
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A party tried to act on a message that has not reached it yet.
class CausalityViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Monte-Carlo estimate exceeded the proven cheating bound.
class BoundViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpvlab
