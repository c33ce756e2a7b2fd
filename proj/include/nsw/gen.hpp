#pragma once

#include "nsw/instance.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nsw {

/// Deterministic random instance; v_ij uniform in {0..vmax}, c_i uniform in
/// {1..cmax}, every agent values at least one item.
NswInstance gen_random(std::size_t agents, std::size_t items, std::uint32_t vmax,
                       std::uint32_t cmax, std::uint64_t seed);

/// Random market with general budgets and earning caps.
MarketInstance gen_random_market(std::size_t buyers, std::size_t goods, std::uint32_t umax,
                                 std::uint32_t budget_max, std::uint32_t cap_max,
                                 std::uint64_t seed);

/// A small market from the structure proposition together with what its
/// equilibria look like. Non-integer parameters are scaled to integers:
/// utilities and utility caps by `utility_scale`, budgets and earning caps by
/// `money_scale`; prices scale with `money_scale`.
struct Fixture {
  std::string name;
  MarketInstance market;
  Integer utility_scale = 1;
  Integer money_scale = 1;
  bool money_clearing = true;
  /// Known equilibrium prices (already multiplied by money_scale).
  std::vector<std::vector<Rational>> expected_prices;
};

/// "prop1", "prop2" or "prop3". Throws std::invalid_argument otherwise.
Fixture gen_fixture(std::string_view name);

/// Exactly-k-occurrence MAX-E3-LIN-2 instance.
struct E3Lin2Instance {
  struct Equation {
    std::array<std::size_t, 3> variable;
    int rhs = 0;  // 0 or 1
  };
  std::size_t variables = 0;
  std::vector<Equation> equations;
  std::size_t occurrences = 0;

  /// Throws std::invalid_argument on repeated variables, a bad right-hand
  /// side or occurrence counts that differ from `occurrences`.
  void validate() const;
};

/// Agents <x_i:0>, <x_i:1> with cap 4k, one switch item per variable and
/// twelve items per equation. Agent 2i is <x_i:0>, agent 2i+1 is <x_i:1>;
/// switch items come first.
NswInstance gen_hardness(const E3Lin2Instance& lin);

/// A random exactly-k-occurrence instance (3 divides variables * k).
E3Lin2Instance gen_e3lin2(std::size_t variables, std::size_t occurrences, std::uint64_t seed);

}  // namespace nsw
