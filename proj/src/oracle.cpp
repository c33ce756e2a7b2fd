#include "nsw/oracle.hpp"

#include "nsw/errors.hpp"

#include <algorithm>
#include <string>

namespace nsw::oracle {

BruteNsw brute_nsw(const NswInstance& inst) {
  const std::size_t n = inst.agents();
  const std::size_t m = inst.items();
  double count = 1;
  for (std::size_t j = 0; j < m; ++j) count *= static_cast<double>(n);
  if (count > 1e7) throw OracleTooLarge("brute_nsw would enumerate " + std::to_string(count) + " assignments");

  std::vector<std::size_t> owner(m, 0);
  BruteNsw best{{Rational(-1), n}, {}};
  std::vector<Integer> sum(n);
  for (;;) {
    std::fill(sum.begin(), sum.end(), Integer(0));
    for (std::size_t j = 0; j < m; ++j) sum[owner[j]] += inst.value(owner[j], j);
    Rational product = 1;
    for (std::size_t i = 0; i < n && product != 0; ++i) product *= std::min(sum[i], inst.cap[i]);
    if (product > best.optimum.product) {
      best.optimum.product = product;
      best.owner.assign(owner.begin(), owner.end());
    }
    std::size_t j = 0;
    while (j < m && ++owner[j] == n) owner[j++] = 0;
    if (j == m) break;
  }
  return best;
}

bool brute_money_clearing(const LinearMarket& market) {
  const std::size_t n = market.buyers();
  if (n > 20) throw OracleTooLarge("brute_money_clearing enumerates at most 20 buyers");
  for (std::uint32_t mask = 1; mask < (1U << n); ++mask) {
    Rational money = 0;
    Rational earning = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1U << i)) money += market.budget[i];
    for (std::size_t j = 0; j < market.goods(); ++j) {
      bool neighbor = false;
      for (std::size_t i = 0; i < n && !neighbor; ++i) neighbor = (mask & (1U << i)) && market.utility(i, j) > 0;
      if (neighbor) earning += market.earning_cap[j];
    }
    if (money > earning) return false;
  }
  return true;
}

bool brute_money_clearing(const MarketInstance& market) {
  return brute_money_clearing(LinearMarket::from(market));
}

namespace {

using Dense = std::vector<std::vector<Rational>>;

// Row-reduces [A | b] in place; returns false when the system is
// inconsistent. Dependent rows are removed.
bool reduce_rows(Dense& a) {
  if (a.empty()) return true;
  const std::size_t cols = a[0].size() - 1;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < a.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < a.size() && a[pivot][c] == 0) ++pivot;
    if (pivot == a.size()) continue;
    std::swap(a[rank], a[pivot]);
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == rank || a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[rank][c];
      for (std::size_t k = c; k <= cols; ++k) a[r][k] -= f * a[rank][k];
    }
    ++rank;
  }
  for (std::size_t r = rank; r < a.size(); ++r)
    if (a[r][cols] != 0) return false;
  a.resize(rank);
  return true;
}

// Solves the square system given by `basis` columns; nullopt if singular.
std::optional<std::vector<Rational>> solve_basis(const Dense& a, const std::vector<std::size_t>& basis) {
  const std::size_t r = a.size();
  const std::size_t cols = a[0].size() - 1;
  Dense m(r, std::vector<Rational>(r + 1));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t k = 0; k < r; ++k) m[i][k] = a[i][basis[k]];
    m[i][r] = a[i][cols];
  }
  for (std::size_t c = 0; c < r; ++c) {
    std::size_t pivot = c;
    while (pivot < r && m[pivot][c] == 0) ++pivot;
    if (pivot == r) return std::nullopt;
    std::swap(m[c], m[pivot]);
    for (std::size_t i = 0; i < r; ++i) {
      if (i == c || m[i][c] == 0) continue;
      const Rational f = m[i][c] / m[c][c];
      for (std::size_t k = c; k <= r; ++k) m[i][k] -= f * m[c][k];
    }
  }
  std::vector<Rational> out(r);
  for (std::size_t i = 0; i < r; ++i) out[i] = m[i][r] / m[i][i];
  return out;
}

}  // namespace

LpOptimum lp_oracle(const LinearSystem& system) {
  if (system.variables > 12) throw OracleTooLarge("lp_oracle handles at most 12 variables");
  std::size_t slacks = 0;
  for (const auto& row : system.rows)
    if (row.sense != LinearSystem::Sense::Equal) ++slacks;
  const std::size_t total = system.variables + slacks;

  Dense a;
  std::size_t slack = system.variables;
  for (const auto& row : system.rows) {
    std::vector<Rational> line(total + 1);
    for (std::size_t v = 0; v < system.variables && v < row.coeff.size(); ++v) line[v] = row.coeff[v];
    if (row.sense == LinearSystem::Sense::LessEqual) line[slack++] = 1;
    if (row.sense == LinearSystem::Sense::GreaterEqual) line[slack++] = -1;
    line[total] = row.rhs;
    a.push_back(std::move(line));
  }
  LpOptimum best;
  if (!reduce_rows(a)) return best;

  auto objective_of = [&](const std::vector<Rational>& point) {
    Rational v = 0;
    for (std::size_t k = 0; k < system.objective.size() && k < system.variables; ++k) v += system.objective[k] * point[k];
    return v;
  };
  if (a.empty()) {
    // Only trivial rows: the origin is the unique vertex.
    best.feasible = true;
    best.point.assign(system.variables, 0);
    best.objective = objective_of(best.point);
    return best;
  }

  const std::size_t rank = a.size();
  std::vector<bool> pick(total, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(rank), true);
  do {
    std::vector<std::size_t> basis;
    for (std::size_t c = 0; c < total; ++c)
      if (pick[c]) basis.push_back(c);
    auto values = solve_basis(a, basis);
    if (!values) continue;
    if (std::any_of(values->begin(), values->end(), [](const Rational& v) { return v < 0; })) continue;
    std::vector<Rational> point(total, 0);
    for (std::size_t k = 0; k < rank; ++k) point[basis[k]] = (*values)[k];
    point.resize(system.variables);
    Rational value = objective_of(point);
    if (!best.feasible || value < best.objective) {
      best.feasible = true;
      best.objective = std::move(value);
      best.point = std::move(point);
    }
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

LinearSystem min_factor_system(const MinFactorProblem& problem) {
  const std::size_t edges = problem.edges.size();
  LinearSystem sys;
  sys.variables = edges + 1;
  sys.objective.assign(edges + 1, 0);
  sys.objective[edges] = 1;
  for (std::size_t g = 0; g < problem.goods.size(); ++g) {
    LinearSystem::Row row{std::vector<Rational>(edges + 1), LinearSystem::Sense::Equal, 0};
    for (std::size_t e = 0; e < edges; ++e)
      if (problem.edges[e].second == g) row.coeff[e] = 1;
    if (problem.goods[g].capped) row.rhs = problem.goods[g].coefficient;
    else row.coeff[edges] = -problem.goods[g].coefficient;
    sys.rows.push_back(std::move(row));
  }
  for (std::size_t b = 0; b < problem.buyers.size(); ++b) {
    const auto& buyer = problem.buyers[b];
    LinearSystem::Row row{std::vector<Rational>(edges + 1),
                          buyer.in_zero_set ? LinearSystem::Sense::Equal : LinearSystem::Sense::GreaterEqual, 0};
    for (std::size_t e = 0; e < edges; ++e)
      if (problem.edges[e].first == b) row.coeff[e] = 1;
    if (buyer.capped) row.coeff[edges] = -buyer.coefficient;
    else row.rhs = buyer.coefficient;
    sys.rows.push_back(std::move(row));
  }
  return sys;
}

LinearSystem feasible_flow_system(const FeasibleFlowProblem& problem) {
  const std::size_t edges = problem.edges.size();
  LinearSystem sys;
  sys.variables = edges;
  sys.objective.assign(edges, 0);
  for (std::size_t j = 0; j < problem.goods; ++j) {
    if (!problem.active_good[j]) continue;
    LinearSystem::Row row{std::vector<Rational>(edges), LinearSystem::Sense::Equal, problem.good_target[j]};
    for (std::size_t e = 0; e < edges; ++e)
      if (problem.edges[e].second == j) row.coeff[e] = 1;
    sys.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < problem.buyers; ++i) {
    if (!problem.active_buyer[i]) continue;
    LinearSystem::Row row{std::vector<Rational>(edges),
                          problem.buyer_exact[i] ? LinearSystem::Sense::Equal : LinearSystem::Sense::GreaterEqual,
                          problem.buyer_target[i]};
    for (std::size_t e = 0; e < edges; ++e)
      if (problem.edges[e].first == i) row.coeff[e] = 1;
    sys.rows.push_back(std::move(row));
  }
  return sys;
}

}  // namespace nsw::oracle
