#include "corpus.hpp"

#include "nsw/equilibrium.hpp"
#include "nsw/errors.hpp"
#include "nsw/io.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace nsw;

TEST_SUITE("core") {

TEST_CASE("rationals parse and format") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-2") == -2);
  CHECK(parse_rational("+7/3") == Rational(7, 3));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("1/"), std::invalid_argument);
  CHECK(format_rational(Rational(1, 2)) == "1/2");
  CHECK(format_rational(Rational(3)) == "3");
  CHECK(format_decimal(Rational(1, 3), 4) == "0.3333");
}

TEST_CASE("powers") {
  CHECK(pow(Rational(2, 3), 3) == Rational(8, 27));
  CHECK(pow(Rational(5), 0) == 1);
  auto b = least_power_at_least(Rational(3, 2), 1);
  CHECK(b.exponent == 1);
  CHECK(b.power == Rational(3, 2));
  b = least_power_at_least(Rational(2), 5);
  CHECK(b.exponent == 3);
  CHECK(b.power == 8);
  b = least_power_at_least(Rational(2), 8);
  CHECK(b.exponent == 3);
}

TEST_CASE("perturbation rounds every utility up to a power") {
  MarketInstance mk = to_market(cap_valuations(gen_random(3, 4, 8, 8, 11)));
  for (Rational eps : {Rational(1), Rational(1, 2), Rational(1, 7)}) {
    PerturbedMarket p = perturb(mk, eps);
    for (std::size_t i = 0; i < mk.buyers(); ++i)
      for (std::size_t j = 0; j < mk.goods(); ++j) {
        Rational u(mk.utility(i, j));
        const Rational& w = p.perturbed_utility(i, j);
        if (u == 0) {
          CHECK(w == 0);
          CHECK_FALSE(p.exponent(i, j).has_value());
          continue;
        }
        CHECK(*p.exponent(i, j) >= 1);
        CHECK(w == pow(1 + eps, *p.exponent(i, j)));
        CHECK(w >= u);
        if (*p.exponent(i, j) > 1) CHECK(w / (1 + eps) < u);
      }
  }
  CHECK(perturb(mk, Rational(1, 2)).perturbed_utility(0, 0) != 0);
  CHECK_THROWS_AS(perturb(mk, 0), std::invalid_argument);
}

TEST_CASE("a unit utility is still rounded up") {
  MarketInstance mk{{1}, {5}, {1}, Matrix<Integer>(1, 1, 1)};
  CHECK(perturb(mk, Rational(1, 4)).perturbed_utility(0, 0) == Rational(5, 4));
}

TEST_CASE("capping values does not change integral valuations") {
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    NswInstance inst = gen_random(3, 5, 8, 6, seed);
    NswInstance capped = cap_valuations(inst);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<std::optional<std::size_t>> owner(inst.items());
      for (auto& o : owner) o = rng() % inst.agents();
      Allocation a = Allocation::from_owners(inst.agents(), owner);
      CHECK(agent_values(inst, a) == agent_values(capped, a));
    }
  }
}

TEST_CASE("to_market needs capped values") {
  NswInstance inst{Matrix<Integer>(1, 1, 5), {3}};
  CHECK_THROWS_AS(to_market(inst), std::invalid_argument);
  MarketInstance mk = to_market(cap_valuations(inst));
  CHECK(mk.utility(0, 0) == 3);
  CHECK(mk.budget == std::vector<Integer>{1});
  CHECK(mk.earning_cap == std::vector<Integer>{1});
}

TEST_CASE("instance files round-trip") {
  NswInstance inst = gen_random(3, 5, 8, 8, 3);
  std::stringstream ss;
  write_instance(ss, inst);
  auto back = std::get<NswInstance>(parse_instance(ss));
  CHECK(back.value == inst.value);
  CHECK(back.cap == inst.cap);

  MarketInstance mk = gen_random_market(3, 4, 5, 6, 7, 9);
  std::stringstream ms;
  write_instance(ms, mk);
  auto mback = std::get<MarketInstance>(parse_instance(ms));
  CHECK(mback.utility == mk.utility);
  CHECK(mback.budget == mk.budget);
  CHECK(mback.earning_cap == mk.earning_cap);
  CHECK(mback.utility_cap == mk.utility_cap);
}

TEST_CASE("malformed instance files") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_instance(in);
  };
  CHECK_THROWS_AS(parse("bogus 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse("nsw 1 1\nval 1 1 2\n"), ParseError);                       // missing cap
  CHECK_THROWS_AS(parse("nsw 1 1\ncap 1 2\ncap 1 3\n"), ParseError);                // duplicate
  CHECK_THROWS_AS(parse("nsw 2 1\ncap 1 2\ncap 2 2\nval 1 1 1\n"), ParseError);     // m < n
  CHECK_THROWS_AS(parse("nsw 1 1\ncap 1 2\nval 1 2 1\n"), ParseError);              // index out of range
  CHECK_THROWS_AS(parse("nsw 1 1\ncap 1 0\n"), ParseError);                         // cap must be positive
  CHECK_NOTHROW(parse("# comment\nnsw 1 1\ncap 1 2 # trailing\nval 1 1 1\n"));
}

TEST_CASE("state files round-trip exactly") {
  for (const auto& e : testing::nsw_corpus(40)) {
    PerturbedMarket p = perturb(e.market, e.epsilon);
    EquilibriumResult r = run_fptas(p);
    StateFile s{p.market(), e.epsilon, r.state.price, r.state.flow, r.allocation};
    std::stringstream ss;
    write_state(ss, s);
    StateFile back = parse_state(ss);
    CHECK(back.price == s.price);
    CHECK(back.flow == s.flow);
    CHECK(back.allocation.share == s.allocation.share);
    CHECK(back.market.utility == s.market.utility);
    CHECK(back.market.utility_cap == s.market.utility_cap);
    CHECK(back.epsilon == s.epsilon);
    std::stringstream again;
    write_state(again, back);
    CHECK(again.str() == ss.str());
  }
}

}  // TEST_SUITE
