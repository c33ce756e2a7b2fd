#pragma once

#include "nsw/instance.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nsw {

using InstanceFile = std::variant<NswInstance, MarketInstance>;

/// Line-oriented instance format:
///   nsw <n> <m>      then `cap <i> <c>` and sparse `val <i> <j> <v>`
///   market <n> <m>   then `budget`, `ucap`, `ecap` and sparse `util` lines
/// Indices are 1-based, '#' starts a comment. Throws ParseError.
InstanceFile parse_instance(std::istream& in);
InstanceFile read_instance_file(const std::string& path);

void write_instance(std::ostream& out, const NswInstance& inst);
void write_instance(std::ostream& out, const MarketInstance& market);

/// An equilibrium together with the market it was computed for.
struct StateFile {
  LinearMarket market;
  std::optional<Rational> epsilon;  // absent for an unperturbed solve
  std::vector<Rational> price;
  Matrix<Rational> flow;
  Allocation allocation;
};

void write_state(std::ostream& out, const StateFile& state);
StateFile parse_state(std::istream& in);
StateFile read_state_file(const std::string& path);

}  // namespace nsw
