#pragma once

#include "nsw/matrix.hpp"
#include "nsw/priced_market.hpp"
#include "nsw/rational.hpp"

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace nsw {

/// The price-decrease LP: minimize x subject to
///   sum_i g_ij = d_j            capped goods
///   sum_i g_ij = x p_j          uncapped goods
///   sum_j g_ij (= or >=) x c_i lambda_i   capped buyers (= iff in Z)
///   sum_j g_ij (= or >=) m_i              uncapped buyers (= iff in Z)
///   g >= 0 on MBB edges, g = 0 elsewhere.
/// All coefficients are frozen at the pre-decrease prices.
struct MinFactorProblem {
  struct Good {
    std::size_t index;
    bool capped;
    Rational coefficient;  // d_j when capped, p_j otherwise
  };
  struct Buyer {
    std::size_t index;
    bool capped;
    bool in_zero_set;
    Rational coefficient;  // c_i lambda_i when capped, m_i otherwise
  };
  std::vector<Buyer> buyers;
  std::vector<Good> goods;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // positions into buyers/goods
};

/// Builds the LP for reach sets `buyers` x `goods` at the state's prices.
/// Goods with p_j = d_j count as uncapped: any decrease uncaps them.
MinFactorProblem make_min_factor_problem(const PricedMarket& pm, const MarketState& state,
                                         const std::vector<std::size_t>& buyers,
                                         const std::vector<std::size_t>& goods);

/// Exact optimum of the LP. Throws InvariantBreach when the LP is infeasible.
Rational min_factor(const MinFactorProblem& problem);

/// Whether the constraint system with x fixed admits a flow. Solved as a
/// transportation problem by max-flow with lower bounds.
bool min_factor_feasible_at(const MinFactorProblem& problem, const Rational& x);

/// Flow feasibility at fixed prices: goods earn exactly their target, buyers
/// spend exactly (in Z) or at least (off Z) theirs, only on listed edges.
struct FeasibleFlowProblem {
  std::size_t buyers = 0;
  std::size_t goods = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (buyer, good)
  std::vector<Rational> good_target;   // p_j^a; zero for inactive goods
  std::vector<Rational> buyer_target;  // m_i^a; zero for inactive buyers
  std::vector<bool> buyer_exact;       // in Z
  std::vector<bool> active_buyer;
  std::vector<bool> active_good;
};

/// The system at the current prices for every buyer and good that is not
/// frozen, using MBB edges only.
FeasibleFlowProblem make_feasible_flow_problem(const PricedMarket& pm, const MarketState& state);

std::optional<Matrix<Rational>> solve_feasible_flow(const FeasibleFlowProblem& problem);
/// Throws InvariantBreach when the system is infeasible.
Matrix<Rational> feasible_flow(const FeasibleFlowProblem& problem);

/// A feasible flow in which `buyer` spends as little as possible, so its
/// surplus is zero whenever some feasible flow allows that. Throws
/// InvariantBreach when the system is infeasible.
Matrix<Rational> feasible_flow_min_spend(const FeasibleFlowProblem& problem, std::size_t buyer);

}  // namespace nsw
