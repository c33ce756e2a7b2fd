#include "nsw/equilibrium.hpp"

#include <cmath>
#include <optional>
#include <string>

namespace nsw {

namespace {

bool ends_iteration(EventKind kind) {
  return kind == EventKind::NewMbbEdge || kind == EventKind::MinFactorBinding;
}

bool dominated(const std::vector<Rational>& before, const std::vector<Rational>& after) {
  for (std::size_t j = 0; j < before.size(); ++j)
    if (after[j] > before[j]) return false;
  return true;
}

double log_of(const Rational& r) {
  // Split off powers of two so huge numerators survive the double cast.
  const Integer num = numerator_of(r);
  const Integer den = denominator_of(r);
  const long shift_n = static_cast<long>(boost::multiprecision::msb(num));
  const long shift_d = static_cast<long>(boost::multiprecision::msb(den));
  const double mant_n = Rational(num, Integer(1) << shift_n).convert_to<double>();
  const double mant_d = Rational(den, Integer(1) << shift_d).convert_to<double>();
  return std::log(mant_n) - std::log(mant_d) + static_cast<double>(shift_n - shift_d) * std::log(2.0);
}

}  // namespace

TraceAudit audit_trace(const LinearMarket& market, const EquilibriumResult& result, const Rational& epsilon) {
  const SolverTrace& trace = result.trace;
  const std::size_t n = market.buyers();
  TraceAudit audit;
  audit.iterations = trace.iterations.size();
  audit.max_price_decrease = 1;

  // Prices and strict MBB progress, run by run.
  std::size_t next = 0;
  std::optional<std::vector<Rational>> carried;
  for (std::size_t run = 0; run < trace.run_buyer.size(); ++run) {
    std::vector<std::vector<Rational>> snapshots{trace.run_start_price[run]};
    std::vector<Rational> previous = trace.run_start_price[run];
    if (carried && !dominated(*carried, previous)) audit.prices_monotone = false;
    for (; next < trace.iterations.size() && trace.iterations[next].run == run; ++next) {
      const IterationRecord& rec = trace.iterations[next];
      if (!dominated(previous, rec.price_after)) audit.prices_monotone = false;
      for (std::size_t j = 0; j < previous.size(); ++j) {
        if (rec.price_after[j] > 0 && previous[j] / rec.price_after[j] > audit.max_price_decrease)
          audit.max_price_decrease = previous[j] / rec.price_after[j];
      }
      if (!(rec.lambda_after < rec.lambda_before)) {
        audit.mbb_strictly_increasing = false;
        audit.notes.push_back("MBB ratio of buyer " + std::to_string(rec.buyer + 1) + " did not increase at iteration " +
                              std::to_string(rec.iteration));
      }
      previous = rec.price_after;
      // Cap transitions are stops inside one continuous decrease; an
      // iteration in the sense of the analysis ends at a structural event.
      // A run's trailing stop at the price floor is cut short and does not
      // count as a phase.
      if (ends_iteration(rec.kind)) snapshots.push_back(previous);
    }
    carried = previous;
    const std::size_t phases = snapshots.size() - 1;
    audit.phases += phases;

    const std::size_t window = n * n;
    for (std::size_t start = 0; window > 0 && start + window <= phases; ++start) {
      ++audit.windows_checked;
      const auto& from = snapshots[start];
      const auto& to = snapshots[start + window];
      bool dropped = false;
      for (std::size_t j = 0; j < from.size() && !dropped; ++j)
        dropped = from[j] > 0 && to[j] * (1 + epsilon) <= from[j];
      if (!dropped) {
        audit.phase_progress = false;
        audit.notes.push_back("no good dropped by 1+eps in the window of run " + std::to_string(run) +
                              " starting at phase " + std::to_string(start));
      }
    }
  }

  for (std::size_t h = 1; h < trace.zero_set_history.size(); ++h) {
    for (std::size_t i = 0; i < n; ++i)
      if (trace.zero_set_history[h - 1][i] && !trace.zero_set_history[h][i]) audit.zero_set_monotone = false;
  }
  for (std::size_t h = 1; h < trace.good_capped_history.size(); ++h) {
    for (std::size_t j = 0; j < trace.good_capped_history[h].size(); ++j)
      if (!trace.good_capped_history[h - 1][j] && trace.good_capped_history[h][j]) audit.cap_status_monotone = false;
  }
  for (std::size_t h = 1; h < trace.buyer_capped_history.size(); ++h) {
    for (std::size_t i = 0; i < n; ++i)
      if (trace.buyer_capped_history[h - 1][i] && !trace.buyer_capped_history[h][i]) audit.cap_status_monotone = false;
  }
  for (const auto& exit : trace.zero_exits) audit.zero_exit_capped = audit.zero_exit_capped && exit.all_capped;

  Rational largest = 0;
  Rational money = 0;
  for (std::size_t i = 0; i < n; ++i) {
    money += market.budget[i];
    for (std::size_t j = 0; j < market.goods(); ++j) largest = std::max(largest, market.utility(i, j));
  }
  if (n > 0 && largest > 0 && epsilon > 0) {
    const double log_base = log_of(1 + epsilon);
    const double inner = std::log(static_cast<double>(n)) + static_cast<double>(n) * log_of(largest) + log_of(money);
    audit.iteration_budget = 4.0 * std::pow(static_cast<double>(n), 3) * inner / log_base;
    audit.within_budget = static_cast<double>(audit.iterations) <= audit.iteration_budget;
  }
  return audit;
}

}  // namespace nsw
