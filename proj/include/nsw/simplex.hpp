#pragma once

#include "nsw/rational.hpp"

#include <cstddef>
#include <utility>
#include <vector>

// Exact dense two-phase simplex used by the market subroutines. Bland's
// rule throughout, so it terminates on degenerate systems.
namespace nsw::lp {

enum class Sense { LessEqual, Equal, GreaterEqual };

struct Row {
  std::vector<std::pair<std::size_t, Rational>> terms;
  Sense sense = Sense::Equal;
  Rational rhs;
};

/// minimize objective . v  subject to rows, v >= 0.
struct Program {
  std::size_t variables = 0;
  std::vector<Rational> objective;
  std::vector<Row> rows;
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  Rational objective;
  std::vector<Rational> values;
};

Solution minimize(const Program& program);

}  // namespace nsw::lp
