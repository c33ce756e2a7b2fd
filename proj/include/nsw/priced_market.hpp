#pragma once

#include "nsw/instance.hpp"
#include "nsw/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace nsw {

/// MBB quantities of a market at fixed prices.
///
/// lambda_i = min_j p_j / u_ij over goods with u_ij > 0 (the inverse MBB
/// ratio); it is zero when the buyer values a free good and absent when the
/// buyer values nothing. Buyer i is capped iff m_i >= c_i * lambda_i, good
/// j is capped iff p_j >= d_j.
class PricedMarket {
 public:
  PricedMarket(const LinearMarket& market, std::span<const Rational> price);

  const LinearMarket& market() const { return *market_; }
  const Rational& price(std::size_t j) const { return price_[j]; }
  const std::vector<Rational>& prices() const { return price_; }

  const std::optional<Rational>& lambda(std::size_t i) const { return lambda_[i]; }
  bool mbb(std::size_t i, std::size_t j) const;
  bool buyer_capped(std::size_t i) const;
  bool good_capped(std::size_t j) const;
  /// min(m_i, c_i * lambda_i)
  Rational active_budget(std::size_t i) const;
  /// min(p_j, d_j)
  Rational active_price(std::size_t j) const;

 private:
  const LinearMarket* market_;
  std::vector<Rational> price_;
  std::vector<std::optional<Rational>> lambda_;
};

/// Descending-price solver state. Frozen buyers and goods were detached by
/// a zero-price exit; their allocation lives in `frozen_share`.
struct MarketState {
  std::vector<Rational> price;
  Matrix<Rational> flow;
  std::vector<bool> zero_surplus;  // Z
  std::vector<bool> frozen_buyer;
  std::vector<bool> frozen_good;
  Matrix<Rational> frozen_share;

  static MarketState empty(std::size_t buyers, std::size_t goods);

  Rational spent(std::size_t i) const;
  Rational earned(std::size_t j) const;
};

/// s(i) = sum_j f_ij - m_i^a
Rational buyer_surplus(const PricedMarket& pm, const MarketState& state, std::size_t i);
/// s(j) = p_j^a - sum_i f_ij
Rational good_surplus(const PricedMarket& pm, const MarketState& state, std::size_t j);

}  // namespace nsw
