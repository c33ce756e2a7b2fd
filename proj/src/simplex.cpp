#include "nsw/simplex.hpp"

#include <optional>
#include <stdexcept>

namespace nsw::lp {

namespace {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : a_(rows, std::vector<Rational>(cols + 1)), basis_(rows), cost_(cols + 1) {}

  std::size_t rows() const { return a_.size(); }
  std::size_t cols() const { return cost_.size() - 1; }
  Rational& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  Rational& rhs(std::size_t r) { return a_[r].back(); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  // Sets the reduced-cost row for objective c (over the first cols() columns).
  void set_objective(const std::vector<Rational>& c) {
    for (std::size_t k = 0; k < cost_.size(); ++k) cost_[k] = k < c.size() ? c[k] : Rational(0);
    for (std::size_t r = 0; r < rows(); ++r) {
      const Rational cb = basis_[r] < c.size() ? c[basis_[r]] : Rational(0);
      if (cb == 0) continue;
      for (std::size_t k = 0; k < cost_.size(); ++k) cost_[k] -= cb * a_[r][k];
    }
  }

  Rational objective() const { return -cost_.back(); }

  void pivot(std::size_t r, std::size_t c) {
    const Rational inv = 1 / a_[r][c];
    for (auto& v : a_[r]) v *= inv;
    for (std::size_t q = 0; q < rows(); ++q) {
      if (q == r || a_[q][c] == 0) continue;
      const Rational factor = a_[q][c];
      for (std::size_t k = 0; k < a_[q].size(); ++k) {
        if (a_[r][k] != 0) a_[q][k] -= factor * a_[r][k];
      }
    }
    if (cost_[c] != 0) {
      const Rational factor = cost_[c];
      for (std::size_t k = 0; k < cost_.size(); ++k) {
        if (a_[r][k] != 0) cost_[k] -= factor * a_[r][k];
      }
    }
    basis_[r] = c;
  }

  // Bland's rule over columns < limit. Returns false when unbounded.
  bool optimize(std::size_t limit) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t c = 0; c < limit; ++c) {
        if (cost_[c] < 0) {
          enter = c;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t r = 0; r < rows(); ++r) {
        if (a_[r][*enter] <= 0) continue;
        Rational ratio = a_[r].back() / a_[r][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = std::move(ratio);
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
    }
  }

  void drop_row(std::size_t r) {
    a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
  }

 private:
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> cost_;
};

}  // namespace

Solution minimize(const Program& program) {
  const std::size_t nv = program.variables;
  const std::size_t nr = program.rows.size();
  if (program.objective.size() > nv) throw std::invalid_argument("objective longer than variable count");

  // Normalize to non-negative right-hand sides.
  std::vector<Row> rows = program.rows;
  for (auto& row : rows) {
    for (const auto& [v, coeff] : row.terms) {
      if (v >= nv) throw std::invalid_argument("row references unknown variable");
    }
    if (row.rhs < 0) {
      row.rhs = -row.rhs;
      for (auto& term : row.terms) term.second = -term.second;
      if (row.sense == Sense::LessEqual) row.sense = Sense::GreaterEqual;
      else if (row.sense == Sense::GreaterEqual) row.sense = Sense::LessEqual;
    }
  }

  std::size_t slacks = 0;
  std::size_t artificials = 0;
  for (const auto& row : rows) {
    if (row.sense != Sense::Equal) ++slacks;
    if (row.sense != Sense::LessEqual) ++artificials;
  }
  const std::size_t first_artificial = nv + slacks;
  const std::size_t total = first_artificial + artificials;
  Tableau tab(nr, total);

  std::size_t next_slack = nv;
  std::size_t next_art = first_artificial;
  for (std::size_t r = 0; r < nr; ++r) {
    for (const auto& [v, coeff] : rows[r].terms) tab.at(r, v) += coeff;
    tab.rhs(r) = rows[r].rhs;
    switch (rows[r].sense) {
      case Sense::LessEqual:
        tab.at(r, next_slack) = 1;
        tab.basis(r) = next_slack++;
        break;
      case Sense::GreaterEqual:
        tab.at(r, next_slack++) = -1;
        tab.at(r, next_art) = 1;
        tab.basis(r) = next_art++;
        break;
      case Sense::Equal:
        tab.at(r, next_art) = 1;
        tab.basis(r) = next_art++;
        break;
    }
  }

  Solution out;
  if (artificials > 0) {
    std::vector<Rational> phase1(total);
    for (std::size_t k = first_artificial; k < total; ++k) phase1[k] = 1;
    tab.set_objective(phase1);
    tab.optimize(total);
    if (tab.objective() != 0) {
      out.status = Status::Infeasible;
      return out;
    }
    // Drive remaining artificials out of the basis; rows where that is
    // impossible are linearly dependent and can go.
    for (std::size_t r = 0; r < tab.rows();) {
      if (tab.basis(r) < first_artificial) {
        ++r;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t c = 0; c < first_artificial; ++c) {
        if (tab.at(r, c) != 0) {
          col = c;
          break;
        }
      }
      if (col) {
        tab.pivot(r, *col);
        ++r;
      } else {
        tab.drop_row(r);
      }
    }
  }

  std::vector<Rational> cost(program.objective);
  cost.resize(first_artificial);
  tab.set_objective(cost);
  if (!tab.optimize(first_artificial)) {
    out.status = Status::Unbounded;
    return out;
  }
  out.status = Status::Optimal;
  out.values.assign(nv, 0);
  for (std::size_t r = 0; r < tab.rows(); ++r) {
    if (tab.basis(r) < nv) out.values[tab.basis(r)] = tab.rhs(r);
  }
  out.objective = 0;
  for (std::size_t v = 0; v < program.objective.size(); ++v) out.objective += program.objective[v] * out.values[v];
  return out;
}

}  // namespace nsw::lp
