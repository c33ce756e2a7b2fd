#pragma once

#include "nsw/matrix.hpp"
#include "nsw/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace nsw {

/// Agents with budget-additive valuations v_i(S) = min(c_i, sum_{j in S} v_ij).
struct NswInstance {
  Matrix<Integer> value;       // n x m, non-negative
  std::vector<Integer> cap;    // length n, positive

  std::size_t agents() const { return cap.size(); }
  std::size_t items() const { return value.cols(); }

  /// Throws std::invalid_argument when m < n, a value is negative or a cap
  /// is not positive.
  void validate() const;
};

/// Linear Fisher market with integer budgets, utility caps and earning caps.
struct MarketInstance {
  std::vector<Integer> budget;     // m_i
  std::vector<Integer> utility_cap;  // c_i
  std::vector<Integer> earning_cap;  // d_j
  Matrix<Integer> utility;         // u_ij

  std::size_t buyers() const { return budget.size(); }
  std::size_t goods() const { return earning_cap.size(); }

  /// Largest integer among all parameters.
  Integer largest_parameter() const;
  void validate() const;
};

/// Market with rational parameters; the common input of the equilibrium
/// engine, the verifiers and the rounding stage.
struct LinearMarket {
  std::vector<Rational> budget;
  std::vector<Rational> utility_cap;
  std::vector<Rational> earning_cap;
  Matrix<Rational> utility;

  std::size_t buyers() const { return budget.size(); }
  std::size_t goods() const { return earning_cap.size(); }

  static LinearMarket from(const MarketInstance& market);
};

/// Utilities rounded up to powers of (1 + epsilon).
struct PerturbedMarket {
  MarketInstance base;
  Rational epsilon;
  Matrix<std::optional<std::uint64_t>> exponent;  // absent where u_ij = 0
  Matrix<Rational> perturbed_utility;             // (1+eps)^k_ij or 0
  Rational largest_utility;                       // max perturbed utility

  /// The base market with perturbed utilities substituted.
  LinearMarket market() const;
};

/// Fractional or integral allocation x_ij.
struct Allocation {
  Matrix<Rational> share;
  bool integral = false;

  std::size_t buyers() const { return share.rows(); }
  std::size_t goods() const { return share.cols(); }

  /// Integral allocation from an owner per item (nullopt = unassigned).
  static Allocation from_owners(std::size_t agents,
                                const std::vector<std::optional<std::size_t>>& owner);
  /// Owner per item; requires an integral allocation.
  std::vector<std::optional<std::size_t>> owners() const;
};

/// Product of budget-additive values together with the agent count; the
/// geometric mean is product^(1/agents) and is never materialized.
struct NswValue {
  Rational product;
  std::size_t agents = 0;
};

NswInstance cap_valuations(const NswInstance& inst);

/// Budget-additive value of each agent under an (integral or fractional)
/// allocation.
std::vector<Rational> agent_values(const NswInstance& inst, const Allocation& alloc);

NswValue nsw_value(const NswInstance& inst, const Allocation& alloc);

/// Unit budgets, unit earning caps, u = v. Throws std::invalid_argument for
/// an instance with some v_ij > c_i.
MarketInstance to_market(const NswInstance& inst);

/// Throws std::invalid_argument unless epsilon > 0.
PerturbedMarket perturb(const MarketInstance& market, const Rational& epsilon);

}  // namespace nsw
