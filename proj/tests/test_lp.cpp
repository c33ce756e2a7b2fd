#include "corpus.hpp"

#include "nsw/equilibrium.hpp"
#include "nsw/oracle.hpp"
#include "nsw/simplex.hpp"

#include <doctest.h>

#include <random>

using namespace nsw;

namespace {

oracle::LinearSystem as_system(const lp::Program& p) {
  oracle::LinearSystem s;
  s.variables = p.variables;
  s.objective = p.objective;
  for (const auto& r : p.rows) {
    oracle::LinearSystem::Row row{std::vector<Rational>(p.variables, 0), {}, r.rhs};
    for (const auto& [v, c] : r.terms) row.coeff[v] += c;
    row.sense = r.sense == lp::Sense::Equal       ? oracle::LinearSystem::Sense::Equal
                : r.sense == lp::Sense::LessEqual ? oracle::LinearSystem::Sense::LessEqual
                                                  : oracle::LinearSystem::Sense::GreaterEqual;
    s.rows.push_back(std::move(row));
  }
  return s;
}

}  // namespace

TEST_SUITE("lp") {

TEST_CASE("simplex on small programs") {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
  lp::Program p{2, {-1, -1}, {}};
  p.rows.push_back({{{0, 1}, {1, 2}}, lp::Sense::LessEqual, 4});
  p.rows.push_back({{{0, 3}, {1, 1}}, lp::Sense::LessEqual, 6});
  auto s = lp::minimize(p);
  REQUIRE(s.status == lp::Status::Optimal);
  CHECK(s.objective == Rational(-14, 5));
  CHECK(s.values[0] == Rational(8, 5));

  lp::Program infeasible{1, {1}, {}};
  infeasible.rows.push_back({{{0, 1}}, lp::Sense::GreaterEqual, 2});
  infeasible.rows.push_back({{{0, 1}}, lp::Sense::LessEqual, 1});
  CHECK(lp::minimize(infeasible).status == lp::Status::Infeasible);

  lp::Program unbounded{1, {-1}, {}};
  unbounded.rows.push_back({{{0, 1}}, lp::Sense::GreaterEqual, 1});
  CHECK(lp::minimize(unbounded).status == lp::Status::Unbounded);
}

TEST_CASE("single-edge min factor: x = m / p") {
  oracle::LinearSystem s;
  s.variables = 2;  // g, x
  s.objective = {0, 1};
  s.rows.push_back({{1, -3}, oracle::LinearSystem::Sense::Equal, 0});
  s.rows.push_back({{1, 0}, oracle::LinearSystem::Sense::Equal, 2});
  auto best = oracle::lp_oracle(s);
  REQUIRE(best.feasible);
  CHECK(best.objective == Rational(2, 3));

  s.rows.push_back({{1, 0}, oracle::LinearSystem::Sense::LessEqual, 1});
  CHECK_FALSE(oracle::lp_oracle(s).feasible);
}

TEST_CASE("simplex agrees with vertex enumeration on random boxed programs") {
  std::mt19937_64 rng(7);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t vars = 1 + rng() % 4;
    lp::Program p{vars, {}, {}};
    for (std::size_t v = 0; v < vars; ++v) {
      p.objective.push_back(Rational(static_cast<int>(rng() % 7) - 3));
      p.rows.push_back({{{v, 1}}, lp::Sense::LessEqual, Rational(1 + rng() % 5)});
    }
    const std::size_t extra = rng() % 4;
    for (std::size_t r = 0; r < extra; ++r) {
      lp::Row row;
      for (std::size_t v = 0; v < vars; ++v)
        if (rng() % 2) row.terms.push_back({v, Rational(static_cast<int>(rng() % 5) - 2)});
      row.sense = static_cast<lp::Sense>(rng() % 3);
      row.rhs = Rational(static_cast<int>(rng() % 7) - 2);
      p.rows.push_back(row);
    }
    auto s = lp::minimize(p);
    auto best = oracle::lp_oracle(as_system(p));
    CHECK(s.status != lp::Status::Unbounded);
    CHECK((s.status == lp::Status::Optimal) == best.feasible);
    if (best.feasible && s.status == lp::Status::Optimal) {
      ++optimal;
      CHECK(s.objective == best.objective);
    } else {
      ++infeasible;
    }
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 10);
}

TEST_CASE("solver subsystems agree with the brute-force LP") {
  std::size_t mf = 0, ff = 0;
  SolverHooks hooks;
  hooks.on_min_factor = [&](const MinFactorProblem& p, const Rational& value) {
    auto system = oracle::min_factor_system(p);
    if (system.variables > 12) return;
    ++mf;
    auto best = oracle::lp_oracle(system);
    CHECK(best.feasible);
    CHECK(best.objective == value);
    CHECK(min_factor_feasible_at(p, value));
  };
  hooks.on_feasible_flow = [&](const FeasibleFlowProblem& p, const Matrix<Rational>&) {
    auto system = oracle::feasible_flow_system(p);
    if (system.variables > 12) return;
    ++ff;
    CHECK(oracle::lp_oracle(system).feasible == solve_feasible_flow(p).has_value());
  };
  for (const auto& e : testing::nsw_corpus(120)) solve_market(perturb(e.market, e.epsilon).market(), hooks);
  CHECK(mf > 20);
  CHECK(ff > 20);
}

}  // TEST_SUITE
