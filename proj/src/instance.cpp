#include "nsw/instance.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace nsw {

void NswInstance::validate() const {
  if (value.rows() != cap.size()) throw std::invalid_argument("value rows do not match agent count");
  if (items() < agents()) throw std::invalid_argument("need at least as many items as agents");
  for (std::size_t i = 0; i < agents(); ++i) {
    if (cap[i] <= 0) throw std::invalid_argument("utility cap of agent " + std::to_string(i + 1) + " must be positive");
    for (std::size_t j = 0; j < items(); ++j) {
      if (value(i, j) < 0) throw std::invalid_argument("negative value");
    }
  }
}

Integer MarketInstance::largest_parameter() const {
  Integer u = 0;
  for (const auto& b : budget) u = std::max(u, b);
  for (const auto& c : utility_cap) u = std::max(u, c);
  for (const auto& d : earning_cap) u = std::max(u, d);
  for (std::size_t i = 0; i < utility.rows(); ++i)
    for (std::size_t j = 0; j < utility.cols(); ++j) u = std::max(u, utility(i, j));
  return u;
}

void MarketInstance::validate() const {
  const std::size_t n = buyers();
  const std::size_t m = goods();
  if (utility_cap.size() != n || utility.rows() != n || utility.cols() != m) {
    throw std::invalid_argument("market dimensions disagree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (budget[i] <= 0) throw std::invalid_argument("budgets must be positive");
    if (utility_cap[i] <= 0) throw std::invalid_argument("utility caps must be positive");
    for (std::size_t j = 0; j < m; ++j) {
      if (utility(i, j) < 0) throw std::invalid_argument("utilities must be non-negative");
    }
  }
  for (const auto& d : earning_cap) {
    if (d <= 0) throw std::invalid_argument("earning caps must be positive");
  }
}

LinearMarket LinearMarket::from(const MarketInstance& market) {
  LinearMarket out;
  for (const auto& b : market.budget) out.budget.emplace_back(b);
  for (const auto& c : market.utility_cap) out.utility_cap.emplace_back(c);
  for (const auto& d : market.earning_cap) out.earning_cap.emplace_back(d);
  out.utility = Matrix<Rational>(market.buyers(), market.goods());
  for (std::size_t i = 0; i < market.buyers(); ++i)
    for (std::size_t j = 0; j < market.goods(); ++j) out.utility(i, j) = Rational(market.utility(i, j));
  return out;
}

LinearMarket PerturbedMarket::market() const {
  LinearMarket out = LinearMarket::from(base);
  out.utility = perturbed_utility;
  return out;
}

Allocation Allocation::from_owners(std::size_t agents,
                                   const std::vector<std::optional<std::size_t>>& owner) {
  Allocation out{Matrix<Rational>(agents, owner.size()), true};
  for (std::size_t j = 0; j < owner.size(); ++j) {
    if (owner[j]) out.share(*owner[j], j) = 1;
  }
  return out;
}

std::vector<std::optional<std::size_t>> Allocation::owners() const {
  if (!integral) throw std::logic_error("owners() needs an integral allocation");
  std::vector<std::optional<std::size_t>> out(goods());
  for (std::size_t j = 0; j < goods(); ++j)
    for (std::size_t i = 0; i < buyers(); ++i)
      if (share(i, j) == 1) out[j] = i;
  return out;
}

NswInstance cap_valuations(const NswInstance& inst) {
  NswInstance out = inst;
  for (std::size_t i = 0; i < inst.agents(); ++i)
    for (std::size_t j = 0; j < inst.items(); ++j) out.value(i, j) = std::min(inst.value(i, j), inst.cap[i]);
  return out;
}

std::vector<Rational> agent_values(const NswInstance& inst, const Allocation& alloc) {
  std::vector<Rational> out(inst.agents());
  for (std::size_t i = 0; i < inst.agents(); ++i) {
    Rational sum = 0;
    for (std::size_t j = 0; j < inst.items(); ++j) {
      if (alloc.share(i, j) != 0) sum += Rational(inst.value(i, j)) * alloc.share(i, j);
    }
    out[i] = std::min(sum, Rational(inst.cap[i]));
  }
  return out;
}

NswValue nsw_value(const NswInstance& inst, const Allocation& alloc) {
  NswValue out{1, inst.agents()};
  for (const auto& v : agent_values(inst, alloc)) out.product *= v;
  return out;
}

MarketInstance to_market(const NswInstance& inst) {
  for (std::size_t i = 0; i < inst.agents(); ++i)
    for (std::size_t j = 0; j < inst.items(); ++j)
      if (inst.value(i, j) > inst.cap[i]) {
        throw std::invalid_argument("to_market needs capped valuations (run cap_valuations first)");
      }
  MarketInstance out;
  out.budget.assign(inst.agents(), 1);
  out.utility_cap = inst.cap;
  out.earning_cap.assign(inst.items(), 1);
  out.utility = inst.value;
  return out;
}

PerturbedMarket perturb(const MarketInstance& market, const Rational& epsilon) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  const Rational base = 1 + epsilon;
  PerturbedMarket out;
  out.base = market;
  out.epsilon = epsilon;
  out.exponent = Matrix<std::optional<std::uint64_t>>(market.buyers(), market.goods());
  out.perturbed_utility = Matrix<Rational>(market.buyers(), market.goods());
  out.largest_utility = 0;
  for (std::size_t i = 0; i < market.buyers(); ++i) {
    for (std::size_t j = 0; j < market.goods(); ++j) {
      if (market.utility(i, j) <= 0) continue;
      auto bound = least_power_at_least(base, Rational(market.utility(i, j)));
      out.exponent(i, j) = bound.exponent;
      out.largest_utility = std::max(out.largest_utility, bound.power);
      out.perturbed_utility(i, j) = std::move(bound.power);
    }
  }
  return out;
}

}  // namespace nsw
