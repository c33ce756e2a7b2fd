#pragma once

#include "nsw/equilibrium.hpp"
#include "nsw/instance.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nsw {

/// Equilibrium-normalized valuations. For buyers outside B0 the values and
/// cap are scaled by lambda_i so that every MBB ratio becomes 1; buyers in
/// B0 (those valuing a free good) keep their original values.
struct NormalizedInstance {
  Matrix<Rational> value;
  std::vector<Rational> cap;
  std::vector<Rational> scale;  // lambda_i outside B0, 1 inside
  std::vector<Rational> price;
  std::vector<bool> zero_price_buyer;  // B0
  std::vector<bool> zero_price_good;   // G0
  std::vector<bool> capped;            // B_c
  std::vector<Rational> equilibrium_value;  // v'_i(x)
  std::vector<Rational> active_budget;      // m_i^a

  std::size_t agents() const { return cap.size(); }
  std::size_t items() const { return price.size(); }
};

/// Throws InvariantBreach if the normalized instance violates v' <= min(p, c')
/// or a capped buyer has an MBB good priced above 1.
NormalizedInstance normalize(const LinearMarket& market, std::span<const Rational> price,
                             const Allocation& alloc);

/// prod_{B_c} c'_i * prod_{p_j > 1} p_j in normalized units.
NswValue upper_bound(const NormalizedInstance& norm);

/// Cancels every cycle of the allocation's support graph. Positive-price
/// cycles shift money so spending and earnings stay fixed; zero-price cycles
/// keep every buyer's utility and release supply of one good.
Allocation flow_to_forest(const LinearMarket& market, std::span<const Rational> price,
                          const Allocation& alloc);

struct RoundingTree {
  bool zero_price = false;
  std::size_t root = 0;
  std::vector<std::size_t> agents;
  std::vector<std::size_t> goods;
  // Filled by round(): a_1..a_{l+1}, g_1..g_l and the child-good counts of
  // a_1..a_l.
  std::vector<std::size_t> path_agents;
  std::vector<std::size_t> path_goods;
  std::vector<std::size_t> path_children;
};

struct RoundingForest {
  Matrix<Rational> share;  // forest allocation
  std::vector<bool> kept_good;
  std::vector<std::optional<std::size_t>> good_parent;
  std::vector<std::optional<std::size_t>> good_child;
  std::vector<std::optional<std::size_t>> preassigned;  // item -> agent
  std::vector<bool> root_agent;
  std::vector<std::size_t> tree_of_agent;
  std::vector<RoundingTree> trees;
  /// Normalized value after preprocessing: preassigned goods integrally plus
  /// the remaining forest edges fractionally.
  std::vector<Rational> fractional_value;
};

/// Roots each component at its lowest-index agent, hands childless goods to
/// their parent, keeps the largest child per good and drops children that
/// get at most half their value from the good.
RoundingForest preprocess(const NormalizedInstance& norm, const Allocation& forest);

/// Recursive rounding of every preprocessed tree; records recursion paths in
/// `forest`. Items outside all trees go to the agent valuing them most.
Allocation round(RoundingForest& forest, const NormalizedInstance& norm);

/// Exact per-tree checks of the rounding lemmas.
struct LemmaAudit {
  bool tree_ok = true;    // roots keep half, others everything
  bool half_ok = true;    // parent-good receivers keep half
  bool treeb_ok = true;   // per-tree product bound
  bool degree_ok = true;  // sum (k+1) <= n and sum k_j <= n
  bool positive_values = true;
  std::size_t trees_checked = 0;
  std::size_t treeb_failures = 0;
  /// Failing trees in which no recursion-path agent above the leaf owns an
  /// item assigned during preprocessing. The product bound's argument for
  /// the root only covers that case.
  std::size_t treeb_failures_unexplained = 0;
  std::vector<std::string> notes;

  bool ok() const { return tree_ok && half_ok && treeb_ok && degree_ok && positive_values; }
};

LemmaAudit audit_rounding(const NormalizedInstance& norm, const RoundingForest& forest,
                          const Allocation& rounded);

struct Certificate {
  bool opt_zero = false;
  NswValue nsw;               // true valuations of the rounded allocation
  Rational upper_bound;       // bound on OPT^n in original units
  Rational epsilon_prime;
  bool ratio_pass = false;    // nsw * 2.404^n * (1+eps')^(n^2) >= upper_bound
  Allocation allocation;
};

struct PipelineResult {
  Certificate certificate;
  std::optional<EquilibriumResult> equilibrium;
  std::optional<LinearMarket> market;  // perturbed market that was solved
  std::optional<NormalizedInstance> normalized;
  std::optional<RoundingForest> forest;
  std::optional<LemmaAudit> lemmas;
};

/// Rounds an equilibrium of `market` (perturbed version of the capped
/// instance) and certifies it against the original instance.
PipelineResult round_equilibrium(const NswInstance& inst, const LinearMarket& market,
                                 std::span<const Rational> price, const Allocation& alloc,
                                 const Rational& epsilon_prime);

/// The full approximation pipeline with eps' = eps''/n.
PipelineResult pipeline(const NswInstance& inst, const Rational& epsilon,
                        const SolverHooks& hooks = {});

/// The perturbed market used by the pipeline: utilities and utility caps
/// rounded up to powers of (1 + eps').
LinearMarket pipeline_market(const MarketInstance& market, const Rational& epsilon_prime);

void write_certificate(std::ostream& out, const Certificate& cert, std::size_t agents);

}  // namespace nsw
