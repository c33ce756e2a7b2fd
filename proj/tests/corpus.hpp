#pragma once

#include "nsw/flow.hpp"
#include "nsw/gen.hpp"
#include "nsw/instance.hpp"

#include <cstdint>
#include <vector>

namespace nsw::testing {

struct CorpusEntry {
  std::uint64_t seed = 0;
  NswInstance instance;
  MarketInstance market;  // unit budgets and earning caps, capped values
  Rational epsilon;       // 1, 1/2 or 1/4
};

// Random NSW instances with n <= 5, m <= 7, values <= 8; only money-clearing
// ones are kept.
inline std::vector<CorpusEntry> nsw_corpus(std::size_t seeds, std::uint32_t cmax = 8) {
  std::vector<CorpusEntry> out;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    std::size_t n = 1 + seed % 5;
    std::size_t m = std::min<std::size_t>(n + seed % 3, 7);
    NswInstance inst = gen_random(n, m, 8, cmax, seed);
    MarketInstance mk = to_market(cap_valuations(inst));
    if (!money_clearing(mk)) continue;
    out.push_back({seed, inst, mk, Rational(1, 1 << (seed % 3))});
  }
  return out;
}

}  // namespace nsw::testing
