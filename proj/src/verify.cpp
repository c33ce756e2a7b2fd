#include "nsw/equilibrium.hpp"

#include "nsw/simplex.hpp"

#include <cmath>
#include <string>

namespace nsw {

void VerificationReport::fail(std::string message) {
  ok = false;
  violations.push_back(std::move(message));
}

namespace {

std::string good_name(std::size_t j) { return "good " + std::to_string(j + 1); }
std::string buyer_name(std::size_t i) { return "buyer " + std::to_string(i + 1); }

// MBB ratio alpha_i; nullopt stands for infinity (a valued free good).
struct Bang {
  bool values_something = false;
  std::optional<Rational> alpha;
};

Bang bang_per_buck(const LinearMarket& mk, std::span<const Rational> price, std::size_t i) {
  Bang out;
  bool infinite = false;
  for (std::size_t j = 0; j < mk.goods(); ++j) {
    const Rational& u = mk.utility(i, j);
    if (u <= 0) continue;
    out.values_something = true;
    if (price[j] == 0) {
      infinite = true;
      continue;
    }
    Rational ratio = u / price[j];
    if (!out.alpha || ratio > *out.alpha) out.alpha = std::move(ratio);
  }
  if (infinite) out.alpha.reset();
  return out;
}

bool is_mbb(const LinearMarket& mk, std::span<const Rational> price, const Bang& bang, std::size_t i,
            std::size_t j) {
  const Rational& u = mk.utility(i, j);
  if (u <= 0) return false;
  if (!bang.alpha) return price[j] == 0;
  return price[j] > 0 && u / price[j] == *bang.alpha;
}

// e_j = min(1, d_j / p_j), one for free goods.
Rational supply(const LinearMarket& mk, std::span<const Rational> price, std::size_t j) {
  if (price[j] == 0) return 1;
  return std::min(Rational(1), mk.earning_cap[j] / price[j]);
}

// Conditions on prices and goods shared by both verifiers.
void check_goods(const LinearMarket& mk, std::span<const Rational> price, const Allocation& alloc,
                 VerificationReport& report) {
  if (price.size() != mk.goods() || alloc.buyers() != mk.buyers() || alloc.goods() != mk.goods()) {
    report.fail("dimensions of prices or allocation do not match the market");
    return;
  }
  for (std::size_t j = 0; j < mk.goods(); ++j) {
    if (price[j] < 0) report.fail(good_name(j) + " has a negative price");
    Rational sold = 0;
    for (std::size_t i = 0; i < mk.buyers(); ++i) {
      if (alloc.share(i, j) < 0) report.fail(buyer_name(i) + " holds a negative share of " + good_name(j));
      sold += alloc.share(i, j);
    }
    const Rational e = supply(mk, price, j);
    if (sold > e) report.fail(good_name(j) + " is sold beyond its modest supply");
    if (price[j] * (e - sold) != 0) report.fail(good_name(j) + " violates Walras' law (unsold supply at positive price)");
  }
}

Rational utility_of(const LinearMarket& mk, const Allocation& alloc, std::size_t i) {
  Rational sum = 0;
  for (std::size_t j = 0; j < mk.goods(); ++j)
    if (alloc.share(i, j) != 0) sum += mk.utility(i, j) * alloc.share(i, j);
  return sum;
}

Rational spending_of(std::span<const Rational> price, const Allocation& alloc, std::size_t i) {
  Rational sum = 0;
  for (std::size_t j = 0; j < alloc.goods(); ++j)
    if (alloc.share(i, j) != 0) sum += price[j] * alloc.share(i, j);
  return sum;
}

}  // namespace

VerificationReport verify_equilibrium(const LinearMarket& mk, std::span<const Rational> price,
                                      const Allocation& alloc) {
  VerificationReport report;
  check_goods(mk, price, alloc, report);
  if (!report.ok) return report;
  for (std::size_t i = 0; i < mk.buyers(); ++i) {
    const Bang bang = bang_per_buck(mk, price, i);
    if (!bang.values_something) {
      report.fail(buyer_name(i) + " values no good and cannot spend its budget");
      continue;
    }
    for (std::size_t j = 0; j < mk.goods(); ++j) {
      if (alloc.share(i, j) > 0 && !is_mbb(mk, price, bang, i, j))
        report.fail(buyer_name(i) + " buys non-MBB " + good_name(j));
    }
    const Rational utility = utility_of(mk, alloc, i);
    const Rational& cap = mk.utility_cap[i];
    const bool capped = !bang.alpha || mk.budget[i] * *bang.alpha >= cap;
    if (utility > cap) report.fail(buyer_name(i) + " exceeds its utility cap");
    if (capped && utility != cap) report.fail(buyer_name(i) + " is capped but does not reach its cap");
    const Rational active = !bang.alpha ? Rational(0) : std::min(mk.budget[i], Rational(cap / *bang.alpha));
    if (spending_of(price, alloc, i) != active) report.fail(buyer_name(i) + " does not spend exactly its active budget");
  }
  return report;
}

VerificationReport verify_approx_equilibrium(const LinearMarket& mk, std::span<const Rational> price,
                                             const Allocation& alloc, const Rational& epsilon) {
  VerificationReport report;
  check_goods(mk, price, alloc, report);
  if (!report.ok) return report;
  for (std::size_t i = 0; i < mk.buyers(); ++i) {
    const Bang bang = bang_per_buck(mk, price, i);
    if (!bang.values_something) {
      report.fail(buyer_name(i) + " values no good");
      continue;
    }
    const Rational utility = utility_of(mk, alloc, i);
    const Rational& cap = mk.utility_cap[i];
    if (utility > cap) report.fail(buyer_name(i) + " exceeds its utility cap");
    const Rational active = !bang.alpha ? Rational(0) : std::min(mk.budget[i], Rational(cap / *bang.alpha));
    if (spending_of(price, alloc, i) > active) report.fail(buyer_name(i) + " spends beyond its active budget");
    const Rational best = !bang.alpha ? cap : std::min(cap, Rational(mk.budget[i] * *bang.alpha));
    if (utility < (1 - epsilon) * best) report.fail(buyer_name(i) + " is more than epsilon away from its optimal utility");
  }
  return report;
}

std::optional<Allocation> equilibrium_allocation_at(const LinearMarket& mk, std::span<const Rational> price) {
  const std::size_t n = mk.buyers();
  const std::size_t m = mk.goods();
  std::vector<Bang> bangs;
  for (std::size_t i = 0; i < n; ++i) {
    bangs.push_back(bang_per_buck(mk, price, i));
    if (!bangs.back().values_something) return std::nullopt;
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (is_mbb(mk, price, bangs[i], i, j)) edges.emplace_back(i, j);

  lp::Program prog;
  prog.variables = edges.size();
  for (std::size_t j = 0; j < m; ++j) {
    lp::Row row;
    for (std::size_t e = 0; e < edges.size(); ++e)
      if (edges[e].second == j) row.terms.emplace_back(e, 1);
    row.sense = price[j] > 0 ? lp::Sense::Equal : lp::Sense::LessEqual;
    row.rhs = supply(mk, price, j);
    prog.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Bang& bang = bangs[i];
    const Rational& cap = mk.utility_cap[i];
    lp::Row spend;
    lp::Row utility;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      if (edges[e].first != i) continue;
      if (price[edges[e].second] != 0) spend.terms.emplace_back(e, price[edges[e].second]);
      utility.terms.emplace_back(e, mk.utility(i, edges[e].second));
    }
    spend.rhs = !bang.alpha ? Rational(0) : std::min(mk.budget[i], Rational(cap / *bang.alpha));
    prog.rows.push_back(std::move(spend));
    const bool capped = !bang.alpha || mk.budget[i] * *bang.alpha >= cap;
    utility.sense = capped ? lp::Sense::Equal : lp::Sense::LessEqual;
    utility.rhs = cap;
    prog.rows.push_back(std::move(utility));
  }
  auto sol = lp::minimize(prog);
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  Allocation out{Matrix<Rational>(n, m), false};
  for (std::size_t e = 0; e < edges.size(); ++e) out.share(edges[e].first, edges[e].second) = sol.values[e];
  return out;
}

}  // namespace nsw
