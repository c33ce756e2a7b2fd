#include "nsw/subroutines.hpp"

#include "nsw/errors.hpp"
#include "nsw/flow.hpp"
#include "nsw/simplex.hpp"

#include <string>

namespace nsw {

MinFactorProblem make_min_factor_problem(const PricedMarket& pm, const MarketState& state,
                                         const std::vector<std::size_t>& buyers,
                                         const std::vector<std::size_t>& goods) {
  const LinearMarket& mk = pm.market();
  MinFactorProblem out;
  for (std::size_t i : buyers) {
    const bool capped = pm.buyer_capped(i);
    Rational coeff = capped ? Rational(mk.utility_cap[i] * *pm.lambda(i)) : mk.budget[i];
    out.buyers.push_back({i, capped, static_cast<bool>(state.zero_surplus[i]), std::move(coeff)});
  }
  for (std::size_t j : goods) {
    const bool capped = pm.price(j) > mk.earning_cap[j];
    out.goods.push_back({j, capped, capped ? mk.earning_cap[j] : pm.price(j)});
  }
  for (std::size_t b = 0; b < out.buyers.size(); ++b)
    for (std::size_t g = 0; g < out.goods.size(); ++g)
      if (pm.mbb(out.buyers[b].index, out.goods[g].index)) out.edges.emplace_back(b, g);
  return out;
}

Rational min_factor(const MinFactorProblem& problem) {
  const std::size_t edges = problem.edges.size();
  const std::size_t x = edges;
  lp::Program prog;
  prog.variables = edges + 1;
  prog.objective.assign(edges + 1, 0);
  prog.objective[x] = 1;
  for (std::size_t g = 0; g < problem.goods.size(); ++g) {
    const auto& good = problem.goods[g];
    lp::Row row;
    for (std::size_t e = 0; e < edges; ++e)
      if (problem.edges[e].second == g) row.terms.emplace_back(e, 1);
    row.sense = lp::Sense::Equal;
    if (good.capped) {
      row.rhs = good.coefficient;
    } else {
      row.terms.emplace_back(x, -good.coefficient);
      row.rhs = 0;
    }
    prog.rows.push_back(std::move(row));
  }
  for (std::size_t b = 0; b < problem.buyers.size(); ++b) {
    const auto& buyer = problem.buyers[b];
    lp::Row row;
    for (std::size_t e = 0; e < edges; ++e)
      if (problem.edges[e].first == b) row.terms.emplace_back(e, 1);
    row.sense = buyer.in_zero_set ? lp::Sense::Equal : lp::Sense::GreaterEqual;
    if (buyer.capped) {
      row.terms.emplace_back(x, -buyer.coefficient);
      row.rhs = 0;
    } else {
      row.rhs = buyer.coefficient;
    }
    prog.rows.push_back(std::move(row));
  }
  auto sol = lp::minimize(prog);
  if (sol.status != lp::Status::Optimal) {
    throw InvariantBreach("price-decrease LP has no optimum (" +
                          std::string(sol.status == lp::Status::Infeasible ? "infeasible" : "unbounded") + ")");
  }
  return sol.objective;
}

namespace {

// Transportation system: source -> buyer [lo, hi], buyer -> good on edges,
// good -> sink exactly its target, closed by an unbounded sink -> source arc.
std::optional<Matrix<Rational>> transport(std::size_t buyers, std::size_t goods,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                          const std::vector<Rational>& buyer_lower,
                                          const std::vector<bool>& buyer_exact,
                                          const std::vector<Rational>& good_target) {
  FlowNetwork net(buyers + goods + 2);
  const std::size_t s = buyers + goods;
  const std::size_t t = s + 1;
  for (std::size_t b = 0; b < buyers; ++b) {
    std::optional<Rational> upper;
    if (buyer_exact[b]) upper = buyer_lower[b];
    net.add_arc(s, b, buyer_lower[b], upper);
  }
  std::vector<std::size_t> edge_arc;
  for (const auto& [b, g] : edges) edge_arc.push_back(net.add_arc(b, buyers + g, 0, std::nullopt));
  for (std::size_t g = 0; g < goods; ++g) net.add_arc(buyers + g, t, good_target[g], good_target[g]);
  net.add_arc(t, s, 0, std::nullopt);
  auto res = max_flow_with_lower_bounds(net);
  if (!res.feasible) return std::nullopt;
  Matrix<Rational> flow(buyers, goods);
  for (std::size_t e = 0; e < edges.size(); ++e) flow(edges[e].first, edges[e].second) = res.arc_flow[edge_arc[e]];
  return flow;
}

}  // namespace

bool min_factor_feasible_at(const MinFactorProblem& problem, const Rational& x) {
  const std::size_t nb = problem.buyers.size();
  const std::size_t ng = problem.goods.size();
  std::vector<Rational> lower(nb);
  std::vector<bool> exact(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& buyer = problem.buyers[b];
    lower[b] = buyer.capped ? Rational(x * buyer.coefficient) : buyer.coefficient;
    exact[b] = buyer.in_zero_set;
  }
  std::vector<Rational> target(ng);
  for (std::size_t g = 0; g < ng; ++g) {
    const auto& good = problem.goods[g];
    target[g] = good.capped ? good.coefficient : Rational(x * good.coefficient);
  }
  return transport(nb, ng, problem.edges, lower, exact, target).has_value();
}

FeasibleFlowProblem make_feasible_flow_problem(const PricedMarket& pm, const MarketState& state) {
  const LinearMarket& mk = pm.market();
  const std::size_t n = mk.buyers();
  const std::size_t m = mk.goods();
  FeasibleFlowProblem out;
  out.buyers = n;
  out.goods = m;
  out.good_target.assign(m, 0);
  out.buyer_target.assign(n, 0);
  out.buyer_exact.assign(n, false);
  out.active_buyer.assign(n, false);
  out.active_good.assign(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    if (state.frozen_good[j]) continue;
    out.active_good[j] = true;
    out.good_target[j] = pm.active_price(j);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (state.frozen_buyer[i]) continue;
    out.active_buyer[i] = true;
    out.buyer_target[i] = pm.active_budget(i);
    out.buyer_exact[i] = state.zero_surplus[i];
    for (std::size_t j = 0; j < m; ++j)
      if (out.active_good[j] && pm.mbb(i, j)) out.edges.emplace_back(i, j);
  }
  return out;
}

std::optional<Matrix<Rational>> solve_feasible_flow(const FeasibleFlowProblem& problem) {
  return transport(problem.buyers, problem.goods, problem.edges, problem.buyer_target, problem.buyer_exact,
                   problem.good_target);
}

Matrix<Rational> feasible_flow(const FeasibleFlowProblem& problem) {
  auto flow = solve_feasible_flow(problem);
  if (!flow) throw InvariantBreach("no flow is consistent with the current prices and surplus set");
  return *flow;
}

Matrix<Rational> feasible_flow_min_spend(const FeasibleFlowProblem& problem, std::size_t buyer) {
  FeasibleFlowProblem tight = problem;
  tight.buyer_exact[buyer] = true;
  if (auto flow = solve_feasible_flow(tight)) return *flow;

  lp::Program prog;
  prog.variables = problem.edges.size();
  prog.objective.assign(prog.variables, 0);
  for (std::size_t e = 0; e < problem.edges.size(); ++e)
    if (problem.edges[e].first == buyer) prog.objective[e] = 1;
  for (std::size_t j = 0; j < problem.goods; ++j) {
    lp::Row row;
    for (std::size_t e = 0; e < problem.edges.size(); ++e)
      if (problem.edges[e].second == j) row.terms.emplace_back(e, 1);
    row.rhs = problem.good_target[j];
    prog.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < problem.buyers; ++i) {
    if (!problem.active_buyer[i]) continue;
    lp::Row row;
    for (std::size_t e = 0; e < problem.edges.size(); ++e)
      if (problem.edges[e].first == i) row.terms.emplace_back(e, 1);
    row.sense = problem.buyer_exact[i] ? lp::Sense::Equal : lp::Sense::GreaterEqual;
    row.rhs = problem.buyer_target[i];
    prog.rows.push_back(std::move(row));
  }
  auto sol = lp::minimize(prog);
  if (sol.status != lp::Status::Optimal) throw InvariantBreach("no flow is consistent with the current prices and surplus set");
  Matrix<Rational> flow(problem.buyers, problem.goods);
  for (std::size_t e = 0; e < problem.edges.size(); ++e) flow(problem.edges[e].first, problem.edges[e].second) = sol.values[e];
  return flow;
}

}  // namespace nsw
