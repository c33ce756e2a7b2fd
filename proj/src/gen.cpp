#include "nsw/gen.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

namespace nsw {

namespace {

std::uint32_t roll(std::mt19937_64& rng, std::uint32_t lo, std::uint32_t hi) {
  return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
}

// Utility row with at least one positive entry.
void fill_row(Matrix<Integer>& value, std::size_t i, std::uint32_t vmax, std::mt19937_64& rng) {
  for (;;) {
    bool positive = false;
    for (std::size_t j = 0; j < value.cols(); ++j) {
      value(i, j) = roll(rng, 0, vmax);
      positive = positive || value(i, j) > 0;
    }
    if (positive) return;
  }
}

// The largest utility a buyer could ever collect plus one: a cap that never
// binds.
Integer unreachable_cap(const MarketInstance& market, std::size_t i) {
  Integer sum = 1;
  for (std::size_t j = 0; j < market.goods(); ++j) sum += market.utility(i, j);
  return sum;
}

Integer unreachable_earning(const MarketInstance& market) {
  Integer sum = 1;
  for (const auto& b : market.budget) sum += b;
  return sum;
}

MarketInstance two_by_two(std::array<long, 2> budget, std::array<long, 4> utility) {
  MarketInstance mk{{budget[0], budget[1]}, {0, 0}, {0, 0}, Matrix<Integer>(2, 2)};
  mk.utility(0, 0) = utility[0];
  mk.utility(0, 1) = utility[1];
  mk.utility(1, 0) = utility[2];
  mk.utility(1, 1) = utility[3];
  return mk;
}

}  // namespace

NswInstance gen_random(std::size_t agents, std::size_t items, std::uint32_t vmax, std::uint32_t cmax,
                       std::uint64_t seed) {
  if (agents == 0 || agents > items) throw std::invalid_argument("need 1 <= agents <= items");
  if (vmax < 1 || cmax < 1) throw std::invalid_argument("vmax and cmax must be at least 1");
  std::mt19937_64 rng(seed);
  NswInstance inst{Matrix<Integer>(agents, items), std::vector<Integer>(agents)};
  for (std::size_t i = 0; i < agents; ++i) {
    fill_row(inst.value, i, vmax, rng);
    inst.cap[i] = roll(rng, 1, cmax);
  }
  return inst;
}

MarketInstance gen_random_market(std::size_t buyers, std::size_t goods, std::uint32_t umax,
                                 std::uint32_t budget_max, std::uint32_t cap_max, std::uint64_t seed) {
  if (buyers == 0 || goods == 0) throw std::invalid_argument("need at least one buyer and one good");
  if (umax < 1 || budget_max < 1 || cap_max < 1) throw std::invalid_argument("bounds must be at least 1");
  std::mt19937_64 rng(seed);
  MarketInstance mk{std::vector<Integer>(buyers), std::vector<Integer>(buyers), std::vector<Integer>(goods),
                    Matrix<Integer>(buyers, goods)};
  for (std::size_t i = 0; i < buyers; ++i) {
    fill_row(mk.utility, i, umax, rng);
    mk.budget[i] = roll(rng, 1, budget_max);
    mk.utility_cap[i] = roll(rng, 1, cap_max);
  }
  for (std::size_t j = 0; j < goods; ++j) mk.earning_cap[j] = roll(rng, 1, cap_max);
  return mk;
}

Fixture gen_fixture(std::string_view name) {
  Fixture fx;
  fx.name = std::string(name);
  if (name == "prop1") {
    fx.market = MarketInstance{{2}, {1}, {1}, Matrix<Integer>(1, 1, Integer(2))};
    fx.money_clearing = false;
    fx.expected_prices = {{Rational(2)}};
  } else if (name == "prop2") {
    // u21 = 1/10 in the original; utilities and utility caps times 10.
    fx.market = two_by_two({1, 10}, {10, 30, 1, 10});
    fx.market.utility_cap = {unreachable_cap(fx.market, 0), 10};
    fx.market.earning_cap = {5, 6};
    fx.utility_scale = 10;
    fx.expected_prices = {{Rational(1), Rational(6)}, {Rational(5), Rational(50)}};
  } else if (name == "prop3") {
    // c1 = 0.9: utilities and utility caps times 10, and money times 10.
    fx.market = two_by_two({1000, 110}, {10, 10, 10, 10});
    fx.market.utility_cap = {9, unreachable_cap(fx.market, 1)};
    fx.market.earning_cap = {90, unreachable_earning(fx.market)};
    fx.utility_scale = 10;
    fx.money_scale = 10;
    fx.expected_prices = {{Rational(200), Rational(200)}};
  } else {
    throw std::invalid_argument("unknown fixture '" + std::string(name) + "' (expected prop1, prop2 or prop3)");
  }
  return fx;
}

void E3Lin2Instance::validate() const {
  std::vector<std::size_t> count(variables, 0);
  for (const auto& eq : equations) {
    if (eq.rhs != 0 && eq.rhs != 1) throw std::invalid_argument("equation right-hand side must be 0 or 1");
    for (std::size_t v : eq.variable) {
      if (v >= variables) throw std::invalid_argument("equation uses an unknown variable");
      ++count[v];
    }
    const auto& x = eq.variable;
    if (x[0] == x[1] || x[0] == x[2] || x[1] == x[2]) throw std::invalid_argument("equation repeats a variable");
  }
  for (std::size_t c : count)
    if (c != occurrences) throw std::invalid_argument("variable occurrence counts are not uniform");
}

NswInstance gen_hardness(const E3Lin2Instance& lin) {
  lin.validate();
  const std::size_t n = lin.variables;
  const std::size_t items = n + 12 * lin.equations.size();
  const Integer cap = 4 * static_cast<long>(lin.occurrences);
  NswInstance inst{Matrix<Integer>(2 * n, items), std::vector<Integer>(2 * n, cap)};
  for (std::size_t v = 0; v < n; ++v) {
    inst.value(2 * v, v) = cap;
    inst.value(2 * v + 1, v) = cap;
  }
  std::size_t item = n;
  for (const auto& eq : lin.equations) {
    const int a = eq.rhs;
    const int b = 1 - a;
    const std::array<std::array<int, 3>, 4> classes{{{a, a, a}, {b, b, a}, {b, a, b}, {a, b, b}}};
    for (const auto& assignment : classes) {
      for (int copy = 0; copy < 3; ++copy, ++item) {
        for (std::size_t pos = 0; pos < 3; ++pos) inst.value(2 * eq.variable[pos] + assignment[pos], item) = 1;
      }
    }
  }
  return inst;
}

E3Lin2Instance gen_e3lin2(std::size_t variables, std::size_t occurrences, std::uint64_t seed) {
  if (variables < 3 || occurrences == 0 || (variables * occurrences) % 3 != 0) {
    throw std::invalid_argument("need at least 3 variables and 3 | variables * occurrences");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> slots;
  for (std::size_t v = 0; v < variables; ++v) slots.insert(slots.end(), occurrences, v);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::shuffle(slots.begin(), slots.end(), rng);
    E3Lin2Instance lin{variables, {}, occurrences};
    bool distinct = true;
    for (std::size_t e = 0; e < slots.size() && distinct; e += 3) {
      E3Lin2Instance::Equation eq{{slots[e], slots[e + 1], slots[e + 2]}, static_cast<int>(roll(rng, 0, 1))};
      const auto& x = eq.variable;
      distinct = x[0] != x[1] && x[0] != x[2] && x[1] != x[2];
      lin.equations.push_back(eq);
    }
    if (distinct) return lin;
  }
  throw std::invalid_argument("could not place occurrences into equations with distinct variables");
}

}  // namespace nsw
