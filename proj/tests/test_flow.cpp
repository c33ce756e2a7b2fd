#include "nsw/flow.hpp"
#include "nsw/gen.hpp"
#include "nsw/oracle.hpp"

#include <doctest.h>

#include <random>

using namespace nsw;

namespace {

// Hoffman: feasible iff no node set X has sum_X b > sum_out(X) u - sum_in(X) l.
bool hoffman_feasible(const FlowNetwork& net) {
  const std::size_t n = net.nodes();
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    auto in = [&](std::size_t v) { return (mask >> v) & 1u; };
    Rational supply = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (in(v)) supply += net.balance[v];
    Rational room = 0;
    bool unbounded = false;
    for (const auto& a : net.arcs) {
      if (in(a.from) && !in(a.to)) {
        if (!a.upper) unbounded = true;
        else room += *a.upper;
      }
      if (!in(a.from) && in(a.to)) room -= a.lower;
    }
    if (!unbounded && supply > room) return false;
  }
  return true;
}

bool flow_valid(const FlowNetwork& net, const std::vector<Rational>& flow) {
  std::vector<Rational> net_out(net.nodes(), 0);
  for (std::size_t k = 0; k < net.arcs.size(); ++k) {
    const auto& a = net.arcs[k];
    if (flow[k] < a.lower) return false;
    if (a.upper && flow[k] > *a.upper) return false;
    net_out[a.from] += flow[k];
    net_out[a.to] -= flow[k];
  }
  return net_out == net.balance;
}

bool cut_violated(const FlowNetwork& net, const std::vector<bool>& cut) {
  Rational supply = 0, room = 0;
  for (std::size_t v = 0; v < net.nodes(); ++v)
    if (cut[v]) supply += net.balance[v];
  for (const auto& a : net.arcs) {
    if (cut[a.from] && !cut[a.to]) {
      if (!a.upper) return false;
      room += *a.upper;
    }
    if (!cut[a.from] && cut[a.to]) room -= a.lower;
  }
  return supply > room;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("max flow on a small network") {
  MaxFlow mf(4);
  auto a = mf.add_arc(0, 1, Rational(3));
  mf.add_arc(0, 2, Rational(2));
  mf.add_arc(1, 2, Rational(5));
  mf.add_arc(1, 3, Rational(2));
  mf.add_arc(2, 3, std::nullopt);
  CHECK(mf.solve(0, 3) == 5);
  CHECK(mf.flow(a) == 3);
  auto side = mf.source_side();
  CHECK(side[0]);
  CHECK_FALSE(side[3]);
}

TEST_CASE("lower-bound feasibility agrees with Hoffman's condition") {
  std::mt19937_64 rng(42);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + rng() % 4;
    FlowNetwork net(n);
    const std::size_t arcs = 1 + rng() % 7;
    for (std::size_t k = 0; k < arcs; ++k) {
      std::size_t from = rng() % n, to = rng() % n;
      if (from == to) to = (to + 1) % n;
      Rational lower(rng() % 3);
      std::optional<Rational> upper;
      if (rng() % 5) upper = lower + Rational(rng() % 4, 1 + rng() % 2);
      net.add_arc(from, to, lower, upper);
    }
    Rational total = 0;
    for (std::size_t v = 0; v + 1 < n; ++v) {
      net.balance[v] = Rational(static_cast<int>(rng() % 7) - 3, 1 + rng() % 2);
      total += net.balance[v];
    }
    net.balance[n - 1] = -total;

    FlowResult res = max_flow_with_lower_bounds(net);
    CHECK(res.feasible == hoffman_feasible(net));
    if (res.feasible) {
      ++feasible;
      CHECK(flow_valid(net, res.arc_flow));
    } else {
      ++infeasible;
      CHECK(cut_violated(net, res.violated_cut));
    }
  }
  CHECK(feasible > 50);
  CHECK(infeasible > 50);
}

TEST_CASE("malformed networks are rejected") {
  FlowNetwork net(2);
  net.add_arc(0, 1, 3, Rational(2));
  CHECK_THROWS_AS(max_flow_with_lower_bounds(net), std::invalid_argument);
  FlowNetwork unbalanced(2);
  unbalanced.balance[0] = 1;
  CHECK_THROWS_AS(max_flow_with_lower_bounds(unbalanced), std::invalid_argument);
}

TEST_CASE("money clearing matches subset enumeration") {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    MarketInstance mk = gen_random_market(4, 4, 3, 5, 5, seed);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (rng() % 2) mk.utility(i, j) = 0;
    CHECK(money_clearing(mk) == oracle::brute_money_clearing(mk));
  }
}

TEST_CASE("the one-buyer market with budget above the earning cap is not clearing") {
  CHECK_FALSE(money_clearing(gen_fixture("prop1").market));
  CHECK(money_clearing(gen_fixture("prop2").market));
  CHECK(money_clearing(gen_fixture("prop3").market));
}

}  // TEST_SUITE
