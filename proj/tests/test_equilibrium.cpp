#include "corpus.hpp"

#include "nsw/equilibrium.hpp"
#include "nsw/errors.hpp"

#include <doctest.h>

#include <algorithm>

using namespace nsw;

TEST_SUITE("equilibrium") {

TEST_CASE("prop1: price 2 and half the good") {
  Fixture fx = gen_fixture("prop1");
  PerturbedMarket p = perturb(fx.market, 1);
  EquilibriumResult r = run_fptas(p);
  CHECK(r.state.price == std::vector<Rational>{2});
  CHECK(r.allocation.share(0, 0) == Rational(1, 2));
  CHECK(r.trace.relaxed_start);
  CHECK(verify_equilibrium(p.market(), r.state.price, r.allocation));
}

TEST_CASE("prop2 lands in one of the two published families") {
  Fixture fx = gen_fixture("prop2");
  LinearMarket mk = LinearMarket::from(fx.market);
  EquilibriumResult r = solve_market(mk);
  const auto& p = r.state.price;
  bool family_a = p[0] == 1 && p[1] >= 3 && p[1] <= 6;
  bool family_b = p[0] >= 5 && p[1] == 10 * p[0];
  CHECK((family_a || family_b));
  CHECK(verify_equilibrium(mk, p, r.allocation));
}

TEST_CASE("prop2 equilibrium prices are two disjoint sets") {
  LinearMarket mk = LinearMarket::from(gen_fixture("prop2").market);
  auto at = [&](Rational a, Rational b) {
    std::vector<Rational> p{a, b};
    return equilibrium_allocation_at(mk, p).has_value();
  };
  CHECK(at(1, 3));
  CHECK(at(1, 4));
  CHECK(at(1, 6));
  CHECK_FALSE(at(1, 8));  // seller 2 would exceed its earning cap
  CHECK(at(5, 50));
  CHECK(at(7, 70));
  CHECK_FALSE(at(3, 28));  // midpoint of (1,6) and (5,50)
  CHECK_FALSE(at(4, 40));
}

TEST_CASE("prop3: unique prices 20, 20 before scaling") {
  Fixture fx = gen_fixture("prop3");
  LinearMarket mk = LinearMarket::from(fx.market);
  EquilibriumResult r = solve_market(mk);
  Rational scale(fx.money_scale);
  CHECK(r.state.price[0] / scale == 20);
  CHECK(r.state.price[1] / scale == 20);
  CHECK(verify_equilibrium(mk, r.state.price, r.allocation));
}

TEST_CASE("a market with no equilibrium is reported") {
  // One buyer with budget 2 and a huge utility cap; the seller caps at 1.
  MarketInstance mk{{2}, {100}, {1}, Matrix<Integer>(1, 1, 1)};
  CHECK_THROWS_AS(solve_market(LinearMarket::from(mk)), NotMoneyClearing);
}

TEST_CASE("verifier rejects broken allocations") {
  auto corpus = testing::nsw_corpus(30);
  for (const auto& e : corpus) {
    PerturbedMarket p = perturb(e.market, e.epsilon);
    LinearMarket mk = p.market();
    EquilibriumResult r = run_fptas(p);
    REQUIRE(verify_equilibrium(mk, r.state.price, r.allocation));

    Allocation more = r.allocation;
    std::vector<Rational> raised = r.state.price;
    auto top = std::max_element(raised.begin(), raised.end());
    if (*top > 0) {
      *top *= 2;
      CHECK_FALSE(verify_equilibrium(mk, raised, more));
    }

    for (std::size_t i = 0; i < mk.buyers(); ++i)
      for (std::size_t j = 0; j < mk.goods(); ++j)
        if (more.share(i, j) > 0) {
          more.share(i, j) /= 2;
          CHECK_FALSE(verify_equilibrium(mk, r.state.price, more));
          more.share(i, j) *= 2;
        }
  }
}

TEST_CASE("corpus equilibria are exact for the perturbed market and approximate for the original") {
  std::size_t windows = 0;
  for (const auto& e : testing::nsw_corpus(150)) {
    CAPTURE(e.seed);
    PerturbedMarket p = perturb(e.market, e.epsilon);
    LinearMarket mk = p.market();
    EquilibriumResult r = run_fptas(p);
    CHECK(verify_equilibrium(mk, r.state.price, r.allocation));
    CHECK(verify_approx_equilibrium(LinearMarket::from(e.market), r.state.price, r.allocation, e.epsilon));

    TraceAudit audit = audit_trace(mk, r, e.epsilon);
    CHECK(audit.prices_monotone);
    CHECK(audit.zero_set_monotone);
    CHECK(audit.cap_status_monotone);
    CHECK(audit.mbb_strictly_increasing);
    CHECK(audit.phase_progress);
    CHECK(audit.zero_exit_capped);
    CHECK(r.trace.good_surplus_always_zero);
    CHECK(r.trace.buyer_surplus_nonnegative);
    windows += audit.windows_checked;

    // Every stop factor lies in (0, 1) and the trace names its event.
    for (const auto& it : r.trace.iterations) {
      CHECK(it.x > 0);
      CHECK(it.x <= 1);
    }
  }
  MESSAGE("phase windows checked: " << windows);
}

TEST_CASE("a capped buyer pinning a capped good is released from Z") {
  // Buyer 1 is capped, in Z, and the only MBB buyer of the capped good 3:
  // any common price decrease shrinks its budget below d_3.
  LinearMarket mk;
  mk.budget = {3, 8};
  mk.utility_cap = {3, 1};
  mk.earning_cap = {6, 6, 1};
  mk.utility = Matrix<Rational>(2, 3);
  const int u[2][3] = {{4, 3, 4}, {3, 4, 1}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) mk.utility(i, j) = u[i][j];
  EquilibriumResult r = solve_market(mk);
  CHECK(r.trace.zero_set_releases == std::vector<std::size_t>{0});
  CHECK(verify_equilibrium(mk, r.state.price, r.allocation));
  CHECK(r.state.price == std::vector<Rational>{0, 0, 0});
  TraceAudit audit = audit_trace(mk, r, 1);
  CHECK_FALSE(audit.zero_set_monotone);
  CHECK(audit.mbb_strictly_increasing);
}

TEST_CASE("general markets with budgets and earning caps") {
  std::size_t released = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    CAPTURE(seed);
    MarketInstance base = gen_random_market(2 + seed % 3, 4, 6, 10, 10, seed);
    if (!money_clearing(base)) continue;
    PerturbedMarket p = perturb(base, Rational(1, 2));
    EquilibriumResult r = run_fptas(p);
    CHECK(verify_equilibrium(p.market(), r.state.price, r.allocation));
    CHECK(verify_approx_equilibrium(LinearMarket::from(base), r.state.price, r.allocation, Rational(1, 2)));
    released += !r.trace.zero_set_releases.empty();
  }
  MESSAGE("runs with Z releases: " << released);
}

TEST_CASE("reach sets contain the buyer and only MBB goods") {
  for (const auto& e : testing::nsw_corpus(40)) {
    PerturbedMarket p = perturb(e.market, e.epsilon);
    LinearMarket mk = p.market();
    EquilibriumResult r = run_fptas(p);
    PricedMarket pm(mk, r.state.price);
    for (std::size_t k = 0; k < mk.buyers(); ++k) {
      if (r.state.frozen_buyer[k]) continue;
      ReachSets reach = reach_sets(pm, r.state, k);
      CHECK(std::find(reach.buyers.begin(), reach.buyers.end(), k) != reach.buyers.end());
      for (std::size_t j : reach.goods) {
        bool some_mbb = false;
        for (std::size_t i : reach.buyers) some_mbb = some_mbb || pm.mbb(i, j);
        CHECK(some_mbb);
      }
    }
  }
}

TEST_CASE("event names") {
  CHECK(to_string(EventKind::NewMbbEdge) == "NewMbbEdge");
  CHECK(to_string(EventKind::PriceFloor) == "PriceFloor");
}

}  // TEST_SUITE
