#include "nsw/equilibrium.hpp"

#include "nsw/errors.hpp"
#include "nsw/flow.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <string>

namespace nsw {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::NewMbbEdge: return "NewMbbEdge";
    case EventKind::MinFactorBinding: return "MinFactorBinding";
    case EventKind::GoodUncaps: return "GoodUncaps";
    case EventKind::BuyerCaps: return "BuyerCaps";
    case EventKind::PriceFloor: return "PriceFloor";
  }
  return "?";
}

ReachSets reach_sets(const PricedMarket& pm, const MarketState& state, std::size_t buyer) {
  const LinearMarket& mk = pm.market();
  const std::size_t n = mk.buyers();
  const std::size_t m = mk.goods();
  std::vector<bool> seen_buyer(n, false);
  std::vector<bool> seen_good(m, false);
  // Walk residual arcs backwards: a buyer is entered from goods it pays,
  // a good from buyers for which it is MBB.
  std::deque<std::pair<bool, std::size_t>> queue{{true, buyer}};
  seen_buyer[buyer] = true;
  while (!queue.empty()) {
    auto [is_buyer, v] = queue.front();
    queue.pop_front();
    if (is_buyer) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!seen_good[j] && !state.frozen_good[j] && state.flow(v, j) > 0) {
          seen_good[j] = true;
          queue.emplace_back(false, j);
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!seen_buyer[i] && !state.frozen_buyer[i] && pm.mbb(i, v)) {
          seen_buyer[i] = true;
          queue.emplace_back(true, i);
        }
      }
    }
  }
  ReachSets out;
  for (std::size_t i = 0; i < n; ++i)
    if (seen_buyer[i]) out.buyers.push_back(i);
  for (std::size_t j = 0; j < m; ++j)
    if (seen_good[j]) out.goods.push_back(j);
  return out;
}

namespace {

EventOutcome detect(const PricedMarket& pm, const MarketState& state, const std::vector<std::size_t>& reach_buyers,
                    const std::vector<std::size_t>& reach_goods, const Rational& price_floor,
                    const SolverHooks* hooks) {
  const LinearMarket& mk = pm.market();
  std::vector<bool> in_buyers(mk.buyers(), false);
  for (std::size_t i : reach_buyers) in_buyers[i] = true;

  std::optional<EventOutcome> best;
  auto offer = [&](EventKind kind, Rational x, std::vector<std::size_t> witness) {
    if (x <= 0 || x > 1) return;
    if (best && (x < best->x || (x == best->x && kind >= best->kind))) return;
    best = EventOutcome{kind, std::move(x), std::move(witness)};
  };

  for (std::size_t i = 0; i < mk.buyers(); ++i) {
    if (in_buyers[i] || state.frozen_buyer[i] || !pm.lambda(i) || *pm.lambda(i) == 0) continue;
    for (std::size_t j : reach_goods) {
      if (mk.utility(i, j) <= 0 || pm.price(j) <= 0) continue;
      Rational x = mk.utility(i, j) * *pm.lambda(i) / pm.price(j);
      if (x < 1) offer(EventKind::NewMbbEdge, std::move(x), {i, j});
    }
  }

  auto problem = make_min_factor_problem(pm, state, reach_buyers, reach_goods);
  Rational factor = min_factor(problem);
  if (hooks && hooks->on_min_factor) hooks->on_min_factor(problem, factor);
  offer(EventKind::MinFactorBinding, factor, {});

  for (std::size_t j : reach_goods) {
    if (pm.price(j) > mk.earning_cap[j]) offer(EventKind::GoodUncaps, mk.earning_cap[j] / pm.price(j), {j});
  }
  for (std::size_t i : reach_buyers) {
    if (!pm.buyer_capped(i)) {
      offer(EventKind::BuyerCaps, mk.budget[i] / (mk.utility_cap[i] * *pm.lambda(i)), {i});
    }
  }
  std::optional<std::size_t> cheapest;
  for (std::size_t j : reach_goods) {
    if (pm.price(j) > 0 && (!cheapest || pm.price(j) < pm.price(*cheapest))) cheapest = j;
  }
  if (cheapest && pm.price(*cheapest) > price_floor) {
    offer(EventKind::PriceFloor, price_floor / pm.price(*cheapest), {*cheapest});
  }
  if (!best) throw InvariantBreach("no stopping event for the price decrease");
  return *best;
}

std::optional<Rational> min_positive_price(const std::vector<Rational>& price) {
  std::optional<Rational> out;
  for (const auto& p : price)
    if (p > 0 && (!out || p < *out)) out = p;
  return out;
}

std::vector<bool> good_caps(const PricedMarket& pm) {
  std::vector<bool> out(pm.market().goods());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = pm.good_capped(j);
  return out;
}

std::vector<bool> buyer_caps(const PricedMarket& pm, const MarketState& state) {
  std::vector<bool> out(pm.market().buyers());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = state.frozen_buyer[i] || pm.buyer_capped(i);
  return out;
}

void check_surpluses(const PricedMarket& pm, const MarketState& state, SolverTrace& trace) {
  for (std::size_t j = 0; j < pm.market().goods(); ++j)
    if (!state.frozen_good[j] && good_surplus(pm, state, j) != 0) trace.good_surplus_always_zero = false;
  for (std::size_t i = 0; i < pm.market().buyers(); ++i)
    if (!state.frozen_buyer[i] && buyer_surplus(pm, state, i) < 0) trace.buyer_surplus_nonnegative = false;
}

// Detaches the MBB-connected cluster around the cheapest good: prices drop
// to zero and the cluster's buyers keep their current bundles, trimmed so
// that each gets exactly its cap.
void zero_price_exit(const LinearMarket& mk, MarketState& state, std::size_t run, SolverTrace& trace) {
  const std::size_t n = mk.buyers();
  const std::size_t m = mk.goods();
  PricedMarket pm(mk, state.price);
  std::optional<std::size_t> cheapest;
  for (std::size_t j = 0; j < m; ++j) {
    if (!state.frozen_good[j] && state.price[j] > 0 && (!cheapest || state.price[j] < state.price[*cheapest]))
      cheapest = j;
  }
  std::vector<bool> goods(m, false);
  std::vector<bool> buyers(n, false);
  goods[*cheapest] = true;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (state.frozen_buyer[i]) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (goods[j] && !buyers[i] && mk.utility(i, j) > 0) {
          buyers[i] = true;
          grew = true;
        }
        if (buyers[i] && !goods[j] && !state.frozen_good[j] && pm.mbb(i, j)) {
          goods[j] = true;
          grew = true;
        }
      }
    }
  }
  ZeroPriceExit exit{run, {}, {}, true};
  for (std::size_t j = 0; j < m; ++j)
    if (goods[j]) exit.goods.push_back(j);
  for (std::size_t i = 0; i < n; ++i) {
    if (!buyers[i]) continue;
    exit.buyers.push_back(i);
    if (!pm.buyer_capped(i)) exit.all_capped = false;
  }
  trace.zero_exits.push_back(exit);
  if (!exit.all_capped) throw InvariantBreach("uncapped buyer attached to a near-zero price good");

  for (std::size_t i : exit.buyers) {
    Rational utility = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (state.flow(i, j) == 0) continue;
      if (!goods[j]) throw InvariantBreach("zero-price cluster spends outside itself");
      utility += mk.utility(i, j) * state.flow(i, j) / state.price[j];
    }
    if (utility < mk.utility_cap[i]) throw InvariantBreach("capped buyer below its cap at a zero-price exit");
    const Rational trim = mk.utility_cap[i] / utility;
    for (std::size_t j = 0; j < m; ++j) {
      if (state.flow(i, j) == 0) continue;
      state.frozen_share(i, j) = trim * state.flow(i, j) / state.price[j];
      state.flow(i, j) = 0;
    }
    state.frozen_buyer[i] = true;
    state.zero_surplus[i] = true;
  }
  for (std::size_t j : exit.goods) {
    state.price[j] = 0;
    state.frozen_good[j] = true;
  }
}

constexpr std::size_t kIterationGuard = 1000000;

}  // namespace

EventOutcome detect_events(const PricedMarket& pm, const MarketState& state,
                           const std::vector<std::size_t>& reach_buyers,
                           const std::vector<std::size_t>& reach_goods, const Rational& price_floor) {
  return detect(pm, state, reach_buyers, reach_goods, price_floor, nullptr);
}

EquilibriumResult solve_market(const LinearMarket& market, const SolverHooks& hooks) {
  const std::size_t n = market.buyers();
  const std::size_t m = market.goods();
  EquilibriumResult result;
  SolverTrace& trace = result.trace;
  trace.relaxed_start = !money_clearing(market);
  result.state = trace.relaxed_start ? solve_relaxed_start(market) : solve_no_utility_caps(market);
  MarketState& state = result.state;

  Rational largest = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) largest = std::max(largest, market.utility(i, j));
  result.price_floor = 1 / (n * pow(largest, n));

  {
    PricedMarket pm(market, state.price);
    for (std::size_t i = 0; i < n; ++i) state.zero_surplus[i] = buyer_surplus(pm, state, i) == 0;
    check_surpluses(pm, state, trace);
    trace.zero_set_history.push_back(state.zero_surplus);
    trace.good_capped_history.push_back(good_caps(pm));
    trace.buyer_capped_history.push_back(buyer_caps(pm, state));
  }

  std::size_t iteration = 0;
  // Buyers whose reach set admits no decrease at the current prices. A
  // capped zero-surplus buyer that alone pays for capped goods can pin the
  // factor at 1; another positive-surplus buyer may still make progress.
  std::vector<bool> stalled(n, false);
  // Buyers taken out of Z stay out until the next successful decrease.
  std::vector<bool> released(n, false);
  for (;;) {
    std::optional<std::size_t> pick;
    bool open = false;
    for (std::size_t i = 0; i < n && !pick; ++i) {
      if (state.zero_surplus[i] || released[i]) continue;
      open = true;
      if (!stalled[i]) pick = i;
    }
    if (!open) break;
    if (!pick) {
      // A capped buyer in Z that alone pays a capped good pins the factor:
      // its budget shrinks with the prices while the good keeps earning
      // d_j. Letting such buyers carry surplus again unblocks the decrease.
      PricedMarket pm(market, state.price);
      std::vector<std::size_t> release;
      for (std::size_t k = 0; k < n; ++k) {
        if (state.zero_surplus[k]) continue;
        for (std::size_t i : reach_sets(pm, state, k).buyers)
          if (state.zero_surplus[i] && !state.frozen_buyer[i] && pm.buyer_capped(i)) release.push_back(i);
      }
      if (release.empty()) throw InvariantBreach("price decrease stalled at factor 1 for every buyer with surplus");
      for (std::size_t i : release) {
        if (!state.zero_surplus[i]) continue;
        state.zero_surplus[i] = false;
        released[i] = true;
        trace.zero_set_releases.push_back(i);
      }
      std::fill(stalled.begin(), stalled.end(), false);
      trace.zero_set_history.push_back(state.zero_surplus);
      continue;
    }
    const std::size_t k = *pick;
    const std::size_t run = trace.run_buyer.size();
    trace.run_buyer.push_back(k);
    trace.run_start_price.push_back(state.price);

    bool rerouted = false;
    for (;;) {
      PricedMarket pm(market, state.price);
      if (buyer_surplus(pm, state, k) <= 0) break;
      auto lowest = min_positive_price(state.price);
      if (lowest && *lowest <= result.price_floor) break;
      if (++iteration > kIterationGuard) throw InvariantBreach("iteration guard exceeded");

      auto reach = reach_sets(pm, state, k);
      EventOutcome event = detect(pm, state, reach.buyers, reach.goods, result.price_floor, &hooks);
      if (event.x >= 1) {
        --iteration;
        if (rerouted) {
          stalled[k] = true;
          break;
        }
        // k's surplus may be an artifact of the chosen flow: shift as much
        // of its spending as possible to other buyers and look again.
        state.flow = feasible_flow_min_spend(make_feasible_flow_problem(pm, state), k);
        rerouted = true;
        continue;
      }
      rerouted = false;
      std::fill(stalled.begin(), stalled.end(), false);
      std::fill(released.begin(), released.end(), false);

      IterationRecord rec;
      rec.iteration = iteration;
      rec.run = run;
      rec.buyer = k;
      rec.kind = event.kind;
      rec.x = event.x;
      rec.lambda_before = *pm.lambda(k);
      for (std::size_t j : reach.goods) state.price[j] *= event.x;

      PricedMarket next(market, state.price);
      auto problem = make_feasible_flow_problem(next, state);
      state.flow = feasible_flow(problem);
      if (hooks.on_feasible_flow) hooks.on_feasible_flow(problem, state.flow);
      check_surpluses(next, state, trace);

      rec.lambda_after = *next.lambda(k);
      rec.min_price = min_positive_price(state.price).value_or(0);
      rec.price_after = state.price;
      trace.iterations.push_back(std::move(rec));
      trace.good_capped_history.push_back(good_caps(next));
      trace.buyer_capped_history.push_back(buyer_caps(next, state));
    }

    auto lowest = min_positive_price(state.price);
    if (lowest && *lowest <= result.price_floor) {
      zero_price_exit(market, state, run, trace);
      std::fill(stalled.begin(), stalled.end(), false);
      PricedMarket pm(market, state.price);
      trace.good_capped_history.push_back(good_caps(pm));
      trace.buyer_capped_history.push_back(buyer_caps(pm, state));
    }
    PricedMarket pm(market, state.price);
    for (std::size_t i = 0; i < n; ++i) {
      if (!state.frozen_buyer[i] && !state.zero_surplus[i] && !released[i] && buyer_surplus(pm, state, i) == 0) {
        state.zero_surplus[i] = true;
        std::fill(stalled.begin(), stalled.end(), false);
      }
    }
    trace.zero_set_history.push_back(state.zero_surplus);
  }

  result.allocation.share = Matrix<Rational>(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (state.frozen_buyer[i]) {
        result.allocation.share(i, j) = state.frozen_share(i, j);
      } else if (state.flow(i, j) != 0) {
        result.allocation.share(i, j) = state.flow(i, j) / state.price[j];
      }
    }
  }
  return result;
}

EquilibriumResult run_fptas(const PerturbedMarket& perturbed, const SolverHooks& hooks) {
  return solve_market(perturbed.market(), hooks);
}

void write_trace(std::ostream& out, const SolverTrace& trace) {
  for (const auto& rec : trace.iterations) {
    out << "iter " << rec.iteration << " buyer " << rec.buyer + 1 << " event " << to_string(rec.kind) << " x "
        << format_rational(rec.x) << " minprice " << format_rational(rec.min_price) << '\n';
  }
}

}  // namespace nsw
