#pragma once

#include <stdexcept>
#include <string>

namespace nsw {

/// Malformed instance or state file.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// The market violates the money-clearing condition and no equilibrium
/// could be reached from a relaxed start.
class NotMoneyClearing : public std::runtime_error {
 public:
  explicit NotMoneyClearing(const std::string& what) : std::runtime_error(what) {}
};

/// A solver invariant that should hold on every correct run was violated.
class InvariantBreach : public std::logic_error {
 public:
  explicit InvariantBreach(const std::string& what) : std::logic_error(what) {}
};

/// An exhaustive oracle was asked to enumerate beyond its guard.
class OracleTooLarge : public std::length_error {
 public:
  explicit OracleTooLarge(const std::string& what) : std::length_error(what) {}
};

}  // namespace nsw
