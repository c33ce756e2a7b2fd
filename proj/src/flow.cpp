#include "nsw/flow.hpp"

#include <deque>
#include <limits>
#include <stdexcept>

namespace nsw {

std::size_t FlowNetwork::add_node(const Rational& b) {
  balance.push_back(b);
  return balance.size() - 1;
}

std::size_t FlowNetwork::add_arc(std::size_t from, std::size_t to, const Rational& lower,
                                 std::optional<Rational> upper) {
  arcs.push_back({from, to, lower, std::move(upper)});
  return arcs.size() - 1;
}

MaxFlow::MaxFlow(std::size_t nodes) : graph_(nodes) {}

std::size_t MaxFlow::add_arc(std::size_t from, std::size_t to, std::optional<Rational> capacity) {
  if (from >= graph_.size() || to >= graph_.size()) throw std::invalid_argument("arc endpoint out of range");
  if (capacity && *capacity < 0) throw std::invalid_argument("negative capacity");
  const std::size_t fwd = graph_[from].size();
  const std::size_t bwd = graph_[to].size() + (from == to ? 1 : 0);
  graph_[from].push_back({to, bwd, capacity.value_or(0), !capacity.has_value(), 0});
  graph_[to].push_back({from, fwd, 0, false, 0});
  arc_pos_.emplace_back(from, fwd);
  return arc_pos_.size() - 1;
}

Rational MaxFlow::solve(std::size_t source, std::size_t sink) {
  source_ = source;
  Rational total = 0;
  const std::size_t n = graph_.size();
  for (;;) {
    std::vector<std::pair<std::size_t, std::size_t>> parent(n, {n, 0});
    std::deque<std::size_t> queue{source};
    parent[source] = {source, 0};
    while (!queue.empty() && parent[sink].first == n) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t e = 0; e < graph_[v].size(); ++e) {
        const Edge& edge = graph_[v][e];
        if (parent[edge.to].first != n) continue;
        if (!edge.infinite && edge.cap <= 0) continue;
        parent[edge.to] = {v, e};
        queue.push_back(edge.to);
      }
    }
    if (parent[sink].first == n) break;
    std::optional<Rational> push;
    for (std::size_t v = sink; v != source; v = parent[v].first) {
      const Edge& edge = graph_[parent[v].first][parent[v].second];
      if (!edge.infinite && (!push || edge.cap < *push)) push = edge.cap;
    }
    if (!push) throw std::logic_error("unbounded augmenting path");
    for (std::size_t v = sink; v != source; v = parent[v].first) {
      Edge& edge = graph_[parent[v].first][parent[v].second];
      Edge& back = graph_[v][edge.rev];
      if (!edge.infinite) edge.cap -= *push;
      back.cap += *push;
      edge.flow += *push;
      back.flow -= *push;
    }
    total += *push;
  }
  return total;
}

const Rational& MaxFlow::flow(std::size_t arc) const {
  auto [v, e] = arc_pos_.at(arc);
  return graph_[v][e].flow;
}

std::vector<bool> MaxFlow::source_side() const {
  std::vector<bool> seen(graph_.size(), false);
  std::deque<std::size_t> queue{source_};
  seen[source_] = true;
  while (!queue.empty()) {
    std::size_t v = queue.front();
    queue.pop_front();
    for (const Edge& edge : graph_[v]) {
      if (seen[edge.to] || (!edge.infinite && edge.cap <= 0)) continue;
      seen[edge.to] = true;
      queue.push_back(edge.to);
    }
  }
  return seen;
}

FlowResult max_flow_with_lower_bounds(const FlowNetwork& net) {
  const std::size_t n = net.nodes();
  Rational total_balance = 0;
  for (const auto& b : net.balance) total_balance += b;
  if (total_balance != 0) throw std::invalid_argument("node balances do not sum to zero");

  // Shift every lower bound into the node excesses, then route the excess
  // from a super source to a super sink.
  std::vector<Rational> excess = net.balance;
  MaxFlow mf(n + 2);
  const std::size_t s = n;
  const std::size_t t = n + 1;
  std::vector<std::size_t> handle;
  handle.reserve(net.arcs.size());
  for (const auto& arc : net.arcs) {
    if (arc.from >= n || arc.to >= n) throw std::invalid_argument("arc endpoint out of range");
    if (arc.lower < 0) throw std::invalid_argument("negative lower bound");
    if (arc.upper && *arc.upper < arc.lower) throw std::invalid_argument("lower bound exceeds upper bound");
    std::optional<Rational> residual;
    if (arc.upper) residual = *arc.upper - arc.lower;
    handle.push_back(mf.add_arc(arc.from, arc.to, residual));
    excess[arc.from] -= arc.lower;
    excess[arc.to] += arc.lower;
  }
  Rational required = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (excess[v] > 0) {
      mf.add_arc(s, v, excess[v]);
      required += excess[v];
    } else if (excess[v] < 0) {
      mf.add_arc(v, t, Rational(-excess[v]));
    }
  }
  FlowResult out;
  if (mf.solve(s, t) == required) {
    out.feasible = true;
    out.arc_flow.reserve(net.arcs.size());
    for (std::size_t a = 0; a < net.arcs.size(); ++a) out.arc_flow.push_back(net.arcs[a].lower + mf.flow(handle[a]));
    return out;
  }
  auto side = mf.source_side();
  out.violated_cut.assign(side.begin(), side.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

bool money_clearing(const LinearMarket& market) {
  const std::size_t n = market.buyers();
  const std::size_t m = market.goods();
  MaxFlow mf(n + m + 2);
  const std::size_t s = n + m;
  const std::size_t t = n + m + 1;
  Rational total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mf.add_arc(s, i, market.budget[i]);
    total += market.budget[i];
    for (std::size_t j = 0; j < m; ++j) {
      if (market.utility(i, j) > 0) mf.add_arc(i, n + j, std::nullopt);
    }
  }
  for (std::size_t j = 0; j < m; ++j) mf.add_arc(n + j, t, market.earning_cap[j]);
  return mf.solve(s, t) == total;
}

bool money_clearing(const MarketInstance& market) { return money_clearing(LinearMarket::from(market)); }

}  // namespace nsw
