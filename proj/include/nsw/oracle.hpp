#pragma once

#include "nsw/instance.hpp"
#include "nsw/subroutines.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

// Exhaustive ground truth for desk-scale checks. Guards are hard errors.
namespace nsw::oracle {

struct BruteNsw {
  NswValue optimum;
  std::vector<std::optional<std::size_t>> owner;
};

/// Enumerates all n^m assignments; throws OracleTooLarge past 10^7.
BruteNsw brute_nsw(const NswInstance& inst);

/// Checks every buyer subset; throws OracleTooLarge past 20 buyers.
bool brute_money_clearing(const MarketInstance& market);
bool brute_money_clearing(const LinearMarket& market);

/// Dense linear system over non-negative variables.
struct LinearSystem {
  enum class Sense { LessEqual, Equal, GreaterEqual };
  struct Row {
    std::vector<Rational> coeff;
    Sense sense;
    Rational rhs;
  };
  std::size_t variables = 0;
  std::vector<Row> rows;
  std::vector<Rational> objective;  // minimized
};

struct LpOptimum {
  bool feasible = false;
  Rational objective;
  std::vector<Rational> point;
};

/// Minimum over all basic feasible solutions; throws OracleTooLarge past 12
/// structural variables. Assumes a bounded objective.
LpOptimum lp_oracle(const LinearSystem& system);

/// The price-decrease LP written out independently of the solver; the last
/// variable is x.
LinearSystem min_factor_system(const MinFactorProblem& problem);
/// The flow feasibility system with a zero objective.
LinearSystem feasible_flow_system(const FeasibleFlowProblem& problem);

}  // namespace nsw::oracle
