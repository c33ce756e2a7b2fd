#include "nsw/priced_market.hpp"

#include <algorithm>

namespace nsw {

PricedMarket::PricedMarket(const LinearMarket& market, std::span<const Rational> price)
    : market_(&market), price_(price.begin(), price.end()), lambda_(market.buyers()) {
  for (std::size_t i = 0; i < market.buyers(); ++i) {
    for (std::size_t j = 0; j < market.goods(); ++j) {
      const Rational& u = market.utility(i, j);
      if (u <= 0) continue;
      Rational ratio = price_[j] / u;
      if (!lambda_[i] || ratio < *lambda_[i]) lambda_[i] = std::move(ratio);
    }
  }
}

bool PricedMarket::mbb(std::size_t i, std::size_t j) const {
  const Rational& u = market_->utility(i, j);
  return u > 0 && lambda_[i] && price_[j] == *lambda_[i] * u;
}

bool PricedMarket::buyer_capped(std::size_t i) const {
  return lambda_[i] && market_->budget[i] >= market_->utility_cap[i] * *lambda_[i];
}

bool PricedMarket::good_capped(std::size_t j) const { return price_[j] >= market_->earning_cap[j]; }

Rational PricedMarket::active_budget(std::size_t i) const {
  if (!lambda_[i]) return market_->budget[i];
  return std::min(market_->budget[i], Rational(market_->utility_cap[i] * *lambda_[i]));
}

Rational PricedMarket::active_price(std::size_t j) const {
  return std::min(price_[j], market_->earning_cap[j]);
}

MarketState MarketState::empty(std::size_t buyers, std::size_t goods) {
  MarketState s;
  s.price.assign(goods, 0);
  s.flow = Matrix<Rational>(buyers, goods);
  s.zero_surplus.assign(buyers, false);
  s.frozen_buyer.assign(buyers, false);
  s.frozen_good.assign(goods, false);
  s.frozen_share = Matrix<Rational>(buyers, goods);
  return s;
}

Rational MarketState::spent(std::size_t i) const {
  Rational sum = 0;
  for (std::size_t j = 0; j < flow.cols(); ++j) sum += flow(i, j);
  return sum;
}

Rational MarketState::earned(std::size_t j) const {
  Rational sum = 0;
  for (std::size_t i = 0; i < flow.rows(); ++i) sum += flow(i, j);
  return sum;
}

Rational buyer_surplus(const PricedMarket& pm, const MarketState& state, std::size_t i) {
  return state.spent(i) - pm.active_budget(i);
}

Rational good_surplus(const PricedMarket& pm, const MarketState& state, std::size_t j) {
  return pm.active_price(j) - state.earned(j);
}

}  // namespace nsw
