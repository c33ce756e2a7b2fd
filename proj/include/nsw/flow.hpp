#pragma once

#include "nsw/instance.hpp"
#include "nsw/rational.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace nsw {

/// Directed network with arc bounds and node balances. A positive balance is
/// a supply, a negative one a demand.
struct FlowNetwork {
  struct Arc {
    std::size_t from;
    std::size_t to;
    Rational lower;
    std::optional<Rational> upper;  // nullopt = unbounded
  };

  std::vector<Rational> balance;
  std::vector<Arc> arcs;

  explicit FlowNetwork(std::size_t nodes = 0) : balance(nodes) {}

  std::size_t nodes() const { return balance.size(); }
  std::size_t add_node(const Rational& b = 0);
  std::size_t add_arc(std::size_t from, std::size_t to, const Rational& lower,
                      std::optional<Rational> upper);
};

struct FlowResult {
  bool feasible = false;
  std::vector<Rational> arc_flow;  // one entry per arc when feasible
  /// When infeasible: a node set X whose net supply exceeds what can leave
  /// it, i.e. sum_X b > sum_{out(X)} upper - sum_{in(X)} lower.
  std::vector<bool> violated_cut;
};

/// Feasible flow meeting every lower bound, upper bound and node balance.
/// Throws std::invalid_argument for a malformed network (dangling arc,
/// lower > upper, negative lower bound or unbalanced supplies).
FlowResult max_flow_with_lower_bounds(const FlowNetwork& net);

/// Classic s-t maximum flow on rational capacities (Edmonds-Karp).
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes);
  /// Returns the arc index; nullopt capacity means unbounded.
  std::size_t add_arc(std::size_t from, std::size_t to, std::optional<Rational> capacity);
  Rational solve(std::size_t source, std::size_t sink);
  const Rational& flow(std::size_t arc) const;
  /// Nodes reachable from the source in the final residual graph.
  std::vector<bool> source_side() const;

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    Rational cap;  // residual capacity
    bool infinite;
    Rational flow;
  };
  std::vector<std::vector<Edge>> graph_;
  std::vector<std::pair<std::size_t, std::size_t>> arc_pos_;
  std::size_t source_ = 0;
};

/// Money clearing: every buyer set's budget fits within the earning caps of
/// the goods it values. One max-flow computation.
bool money_clearing(const MarketInstance& market);
bool money_clearing(const LinearMarket& market);

}  // namespace nsw
