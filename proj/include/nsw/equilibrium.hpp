#pragma once

#include "nsw/instance.hpp"
#include "nsw/priced_market.hpp"
#include "nsw/subroutines.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nsw {

enum class EventKind { NewMbbEdge, MinFactorBinding, GoodUncaps, BuyerCaps, PriceFloor };

std::string_view to_string(EventKind kind);

/// The event that stops a continuous price decrease on the reach set.
struct EventOutcome {
  EventKind kind = EventKind::MinFactorBinding;
  Rational x;
  /// (buyer, good) for NewMbbEdge, the good for GoodUncaps and PriceFloor,
  /// the buyer for BuyerCaps, empty for MinFactorBinding.
  std::vector<std::size_t> witness;
};

/// Largest stopping factor in (0, 1] among all candidate events.
EventOutcome detect_events(const PricedMarket& pm, const MarketState& state,
                           const std::vector<std::size_t>& reach_buyers,
                           const std::vector<std::size_t>& reach_goods,
                           const Rational& price_floor);

/// Buyers and goods that can reach `buyer` in the MBB residual graph
/// (forward arcs on MBB edges, backward arcs where flow is positive).
struct ReachSets {
  std::vector<std::size_t> buyers;
  std::vector<std::size_t> goods;
};
ReachSets reach_sets(const PricedMarket& pm, const MarketState& state, std::size_t buyer);

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t run = 0;  // index of the buyer-k run this iteration belongs to
  std::size_t buyer = 0;
  EventKind kind = EventKind::MinFactorBinding;
  Rational x;
  Rational min_price;
  Rational lambda_before;  // inverse MBB ratio of the run's buyer
  Rational lambda_after;
  std::vector<Rational> price_after;
};

struct ZeroPriceExit {
  std::size_t run = 0;
  std::vector<std::size_t> goods;
  std::vector<std::size_t> buyers;
  bool all_capped = false;
};

struct SolverTrace {
  std::vector<IterationRecord> iterations;
  std::vector<std::vector<Rational>> run_start_price;
  std::vector<std::size_t> run_buyer;
  std::vector<ZeroPriceExit> zero_exits;
  /// Z after each outer iteration; must be monotone.
  std::vector<std::vector<bool>> zero_set_history;
  /// Good and buyer cap status after every iteration.
  std::vector<std::vector<bool>> good_capped_history;
  std::vector<std::vector<bool>> buyer_capped_history;
  bool good_surplus_always_zero = true;
  bool buyer_surplus_nonnegative = true;
  bool relaxed_start = false;
  /// Capped zero-surplus buyers taken back out of Z because every buyer
  /// with surplus was blocked at factor 1 (Z is then not monotone).
  std::vector<std::size_t> zero_set_releases;
};

/// Writes `iter <t> buyer <k> event <kind> x <r> minprice <r>` lines.
void write_trace(std::ostream& out, const SolverTrace& trace);

/// Observers for the LP subroutines; used to capture systems for the
/// brute-force LP oracle.
struct SolverHooks {
  std::function<void(const MinFactorProblem&, const Rational&)> on_min_factor;
  std::function<void(const FeasibleFlowProblem&, const Matrix<Rational>&)> on_feasible_flow;
};

struct EquilibriumResult {
  MarketState state;
  Allocation allocation;
  SolverTrace trace;
  Rational price_floor;
};

/// Equilibrium ignoring utility caps: every good earns its active price and
/// every buyer spends exactly m_i, flow on MBB edges only. Ascending prices
/// from a uniform low start. Throws NotMoneyClearing.
MarketState solve_no_utility_caps(const LinearMarket& market);

/// Start state for markets that are not money clearing: ascend prices until
/// every buyer spends at least its utility-capped active budget. Throws
/// NotMoneyClearing when the ascent gets stuck.
MarketState solve_relaxed_start(const LinearMarket& market);

/// The descending-price engine on the given utilities. The price floor is
/// 1/(n * U^n) with U the largest utility.
EquilibriumResult solve_market(const LinearMarket& market, const SolverHooks& hooks = {});

/// Perturbs utilities and runs the engine on the perturbed market.
EquilibriumResult run_fptas(const PerturbedMarket& perturbed, const SolverHooks& hooks = {});

struct VerificationReport {
  bool ok = true;
  std::vector<std::string> violations;

  explicit operator bool() const { return ok; }
  void fail(std::string message);
};

/// Thrifty and modest equilibrium check, all conditions exact.
VerificationReport verify_equilibrium(const LinearMarket& market, std::span<const Rational> price,
                                      const Allocation& alloc);

/// Conditions (1)-(3),(5) exact and epsilon-approximate demand for every
/// buyer with respect to the market's own utilities.
VerificationReport verify_approx_equilibrium(const LinearMarket& market,
                                             std::span<const Rational> price,
                                             const Allocation& alloc, const Rational& epsilon);

/// An allocation making `price` a thrifty and modest equilibrium, if one
/// exists.
std::optional<Allocation> equilibrium_allocation_at(const LinearMarket& market,
                                                    std::span<const Rational> price);

/// Exact run-time properties of a solver trace.
struct TraceAudit {
  bool prices_monotone = true;
  bool zero_set_monotone = true;
  bool cap_status_monotone = true;
  bool mbb_strictly_increasing = true;
  bool phase_progress = true;
  bool zero_exit_capped = true;
  std::size_t iterations = 0;
  std::size_t windows_checked = 0;
  std::size_t phases = 0;
  Rational max_price_decrease;  // largest single-iteration p_before / p_after
  double iteration_budget = 0;  // 4 n^3 log_{1+eps}(n U^n sum m)
  bool within_budget = true;
  std::vector<std::string> notes;
};

TraceAudit audit_trace(const LinearMarket& market, const EquilibriumResult& result,
                       const Rational& epsilon);

}  // namespace nsw
