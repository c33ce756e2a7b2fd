#include "nsw/equilibrium.hpp"

#include "nsw/errors.hpp"
#include "nsw/flow.hpp"
#include "nsw/simplex.hpp"

#include <deque>
#include <optional>
#include <string>

namespace nsw {

namespace {

constexpr std::size_t kAscentGuard = 200000;

// Max-flow with goods as sources (capacity p_j^a), MBB edges, and buyers
// draining at most their budget. Returns nullopt unless every good sells
// its whole active price.
std::optional<Matrix<Rational>> sell_all_goods(const PricedMarket& pm) {
  const LinearMarket& mk = pm.market();
  const std::size_t n = mk.buyers();
  const std::size_t m = mk.goods();
  MaxFlow mf(n + m + 2);
  const std::size_t s = n + m;
  const std::size_t t = s + 1;
  Rational total = 0;
  for (std::size_t j = 0; j < m; ++j) {
    Rational cap = pm.active_price(j);
    total += cap;
    mf.add_arc(s, n + j, cap);
  }
  Matrix<std::optional<std::size_t>> arc(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      if (pm.mbb(i, j)) arc(i, j) = mf.add_arc(n + j, i, std::nullopt);
    mf.add_arc(i, t, mk.budget[i]);
  }
  if (mf.solve(s, t) != total) return std::nullopt;
  Matrix<Rational> flow(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (arc(i, j)) flow(i, j) = mf.flow(*arc(i, j));
  return flow;
}

std::vector<Rational> initial_prices(const LinearMarket& mk) {
  const std::size_t n = mk.buyers();
  const std::size_t m = mk.goods();
  Rational lowest = mk.budget.empty() ? Rational(1) : mk.budget[0];
  for (const auto& b : mk.budget) lowest = std::min(lowest, b);
  std::vector<Rational> price(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < n; ++i)
      if (mk.utility(i, j) > 0) price[j] = lowest / static_cast<long>(m);
  }
  // Goods nobody buys at MBB are lowered until their best buyer is
  // indifferent. Lowering j this way never changes any lambda_i.
  PricedMarket pm(mk, price);
  for (std::size_t j = 0; j < m; ++j) {
    if (price[j] == 0) continue;
    bool demanded = false;
    Rational best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mk.utility(i, j) <= 0) continue;
      demanded = demanded || pm.mbb(i, j);
      best = std::max(best, Rational(mk.utility(i, j) * *pm.lambda(i)));
    }
    if (!demanded) price[j] = best;
  }
  return price;
}

MarketState ascend(const LinearMarket& mk, bool relaxed) {
  const std::size_t n = mk.buyers();
  const std::size_t m = mk.goods();
  for (std::size_t i = 0; i < n; ++i) {
    bool values_something = false;
    for (std::size_t j = 0; j < m; ++j) values_something = values_something || mk.utility(i, j) > 0;
    if (!values_something) throw NotMoneyClearing("buyer " + std::to_string(i + 1) + " values no good");
  }
  MarketState state = MarketState::empty(n, m);
  state.price = initial_prices(mk);

  for (std::size_t round = 0; round < kAscentGuard; ++round) {
    PricedMarket pm(mk, state.price);
    auto flow = sell_all_goods(pm);
    if (!flow) throw InvariantBreach("ascending start lost a feasible flow");
    state.flow = std::move(*flow);

    std::vector<bool> in_buyers(n, false);
    std::vector<bool> in_goods(m, false);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i) {
      const Rational spent = state.spent(i);
      const bool active = relaxed ? spent < pm.active_budget(i) : spent < mk.budget[i];
      if (active) {
        in_buyers[i] = true;
        queue.push_back(i);
      }
    }
    if (queue.empty()) return state;

    // Alternating closure: buyers to their MBB goods, goods back to the
    // buyers paying for them.
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (std::size_t j = 0; j < m; ++j) {
        if (in_goods[j] || !pm.mbb(i, j)) continue;
        in_goods[j] = true;
        for (std::size_t b = 0; b < n; ++b) {
          if (!in_buyers[b] && state.flow(b, j) > 0) {
            in_buyers[b] = true;
            queue.push_back(b);
          }
        }
      }
    }

    // Largest common factor for the set's prices that its buyers can still
    // pay for.
    lp::Program prog;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (in_buyers[i] && in_goods[j] && pm.mbb(i, j)) edges.emplace_back(i, j);
    const std::size_t x = edges.size();
    prog.variables = x + 1;
    prog.objective.assign(x + 1, 0);
    prog.objective[x] = -1;
    for (std::size_t j = 0; j < m; ++j) {
      if (!in_goods[j]) continue;
      lp::Row row;
      for (std::size_t e = 0; e < x; ++e)
        if (edges[e].second == j) row.terms.emplace_back(e, 1);
      if (state.price[j] < mk.earning_cap[j]) {
        row.terms.emplace_back(x, -state.price[j]);
        row.rhs = 0;
      } else {
        row.rhs = mk.earning_cap[j];
      }
      prog.rows.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_buyers[i]) continue;
      lp::Row row;
      for (std::size_t e = 0; e < x; ++e)
        if (edges[e].first == i) row.terms.emplace_back(e, 1);
      row.sense = lp::Sense::LessEqual;
      row.rhs = mk.budget[i];
      prog.rows.push_back(std::move(row));
    }
    auto sol = lp::minimize(prog);
    if (sol.status == lp::Status::Infeasible) throw InvariantBreach("ascending step LP infeasible");

    std::optional<Rational> factor;
    auto consider = [&](Rational candidate) {
      if (!factor || candidate < *factor) factor = std::move(candidate);
    };
    if (sol.status == lp::Status::Optimal) consider(sol.values[x]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_buyers[i]) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (in_goods[j] || mk.utility(i, j) <= 0) continue;
        consider(state.price[j] / (*pm.lambda(i) * mk.utility(i, j)));
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (in_goods[j] && state.price[j] < mk.earning_cap[j]) consider(mk.earning_cap[j] / state.price[j]);
    }
    if (!factor) {
      throw NotMoneyClearing("buyers with unspent budget only value goods already at their earning caps");
    }
    if (*factor <= 1) throw InvariantBreach("ascending step cannot raise prices");
    for (std::size_t j = 0; j < m; ++j)
      if (in_goods[j]) state.price[j] *= *factor;
  }
  throw InvariantBreach("ascending start did not converge");
}

}  // namespace

MarketState solve_no_utility_caps(const LinearMarket& market) {
  if (!money_clearing(market)) throw NotMoneyClearing("market is not money clearing");
  return ascend(market, false);
}

MarketState solve_relaxed_start(const LinearMarket& market) { return ascend(market, true); }

}  // namespace nsw
