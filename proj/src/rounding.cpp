#include "nsw/rounding.hpp"

#include "nsw/errors.hpp"
#include "nsw/flow.hpp"
#include "nsw/priced_market.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

namespace nsw {

namespace {

std::string agent_name(std::size_t i) { return "agent " + std::to_string(i + 1); }
std::string item_name(std::size_t j) { return "item " + std::to_string(j + 1); }

Rational capped_sum(const Rational& sum, const Rational& cap) { return std::min(sum, cap); }

}  // namespace

NormalizedInstance normalize(const LinearMarket& market, std::span<const Rational> price,
                             const Allocation& alloc) {
  const std::size_t n = market.buyers();
  const std::size_t m = market.goods();
  PricedMarket pm(market, price);

  NormalizedInstance out;
  out.value = Matrix<Rational>(n, m);
  out.cap.resize(n);
  out.scale.resize(n);
  out.price.assign(price.begin(), price.end());
  out.zero_price_buyer.assign(n, false);
  out.zero_price_good.assign(m, false);
  out.capped.assign(n, false);
  out.equilibrium_value.resize(n);
  out.active_budget.resize(n);

  for (std::size_t j = 0; j < m; ++j) out.zero_price_good[j] = price[j] == 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (out.zero_price_good[j] && market.utility(i, j) > 0) out.zero_price_buyer[i] = true;

  for (std::size_t i = 0; i < n; ++i) {
    Rational utility = 0;
    for (std::size_t j = 0; j < m; ++j) utility += market.utility(i, j) * alloc.share(i, j);

    if (out.zero_price_buyer[i]) {
      out.scale[i] = 1;
      out.cap[i] = market.utility_cap[i];
      for (std::size_t j = 0; j < m; ++j) {
        out.value(i, j) = market.utility(i, j);
        if (alloc.share(i, j) > 0 && !out.zero_price_good[j])
          throw InvariantBreach(agent_name(i) + " values a free item but buys " + item_name(j));
      }
      if (utility != market.utility_cap[i])
        throw InvariantBreach(agent_name(i) + " values a free item but is not capped");
      out.capped[i] = true;
      out.equilibrium_value[i] = utility;
      out.active_budget[i] = 0;
      continue;
    }

    const auto& lambda = pm.lambda(i);
    if (!lambda) throw InvariantBreach(agent_name(i) + " values no item");
    out.scale[i] = *lambda;
    out.cap[i] = market.utility_cap[i] * *lambda;
    for (std::size_t j = 0; j < m; ++j) out.value(i, j) = market.utility(i, j) * *lambda;
    out.capped[i] = pm.buyer_capped(i);
    out.equilibrium_value[i] = capped_sum(utility, market.utility_cap[i]) * *lambda;
    out.active_budget[i] = pm.active_budget(i);

    for (std::size_t j = 0; j < m; ++j) {
      const Rational& v = out.value(i, j);
      if (v > price[j] || v > out.cap[i])
        throw InvariantBreach("normalized value of " + agent_name(i) + " for " + item_name(j) +
                              " exceeds min(price, cap)");
      if (out.capped[i] && v > 0 && v == price[j] && price[j] > 1)
        throw InvariantBreach("capped " + agent_name(i) + " has an MBB item priced above 1");
    }
  }
  return out;
}

NswValue upper_bound(const NormalizedInstance& norm) {
  NswValue out{1, norm.agents()};
  for (std::size_t i = 0; i < norm.agents(); ++i)
    if (norm.capped[i]) out.product *= norm.cap[i];
  for (const auto& p : norm.price)
    if (p > 1) out.product *= p;
  return out;
}

namespace {

// Path between two nodes of an acyclic support graph, or empty if they are
// not connected. Nodes 0..n-1 are agents, n..n+m-1 are goods.
std::vector<std::size_t> forest_path(const std::vector<std::vector<std::size_t>>& adj,
                                     std::size_t from, std::size_t to) {
  std::vector<std::optional<std::size_t>> pred(adj.size());
  std::vector<bool> seen(adj.size(), false);
  std::vector<std::size_t> queue{from};
  seen[from] = true;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::size_t v = queue[head];
    if (v == to) break;
    for (std::size_t w : adj[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      pred[w] = v;
      queue.push_back(w);
    }
  }
  if (!seen[to]) return {};
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(*pred[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Some cycle of the support graph as a node sequence starting at an agent,
// or empty if the support is a forest.
std::vector<std::size_t> support_cycle(const Matrix<Rational>& share) {
  const std::size_t n = share.rows();
  std::vector<std::vector<std::size_t>> adj(n + share.cols());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < share.cols(); ++j) {
      if (share(i, j) <= 0) continue;
      auto path = forest_path(adj, i, n + j);
      if (!path.empty()) return path;  // agent first, closes through (i, j)
      adj[i].push_back(n + j);
      adj[n + j].push_back(i);
    }
  return {};
}

}  // namespace

Allocation flow_to_forest(const LinearMarket& market, std::span<const Rational> price,
                          const Allocation& alloc) {
  (void)price;
  const std::size_t n = market.buyers();
  Allocation out = alloc;
  Matrix<Rational>& x = out.share;

  for (auto cycle = support_cycle(x); !cycle.empty(); cycle = support_cycle(x)) {
    // cycle = a0 g0 a1 g1 ... a_{k-1} g_{k-1}; edges (a_t, g_t), (a_{t+1}, g_t)
    // and the closing edge (a0, g_{k-1}).
    const std::size_t k = cycle.size() / 2;
    auto agent = [&](std::size_t t) { return cycle[2 * (t % k)]; };
    auto good = [&](std::size_t t) { return cycle[2 * t + 1] - n; };
    auto util = [&](std::size_t i, std::size_t j) -> const Rational& {
      const Rational& u = market.utility(i, j);
      if (u <= 0) throw InvariantBreach("support edge with zero utility");
      return u;
    };

    // Each agent keeps its utility, each good except g_{k-1} keeps its sales.
    struct Step {
      std::size_t i, j;
      Rational delta;
    };
    std::vector<Step> steps;
    Rational coef = 1;
    for (std::size_t t = 0; t < k; ++t) {
      steps.push_back({agent(t), good(t), coef});
      if (t + 1 < k) {
        steps.push_back({agent(t + 1), good(t), -coef});
        coef = coef * util(agent(t + 1), good(t)) / util(agent(t + 1), good(t + 1));
      }
    }
    Rational closing = -util(agent(0), good(0)) / util(agent(0), good(k - 1));
    steps.push_back({agent(0), good(k - 1), closing});
    Rational net = steps[steps.size() - 2].delta + closing;
    if (net > 0)
      for (auto& s : steps) s.delta = -s.delta;

    std::optional<Rational> t;
    for (const auto& s : steps) {
      if (s.delta >= 0) continue;
      Rational room = x(s.i, s.j) / -s.delta;
      if (!t || room < *t) t = room;
    }
    for (const auto& s : steps) {
      x(s.i, s.j) += *t * s.delta;
      if (x(s.i, s.j) < 0) throw InvariantBreach("cycle cancellation went negative");
    }
  }
  return out;
}

RoundingForest preprocess(const NormalizedInstance& norm, const Allocation& forest) {
  const std::size_t n = norm.agents();
  const std::size_t m = norm.items();

  RoundingForest out;
  out.share = forest.share;
  out.kept_good.assign(m, false);
  out.good_parent.assign(m, std::nullopt);
  out.good_child.assign(m, std::nullopt);
  out.preassigned.assign(m, std::nullopt);
  out.root_agent.assign(n, false);
  out.tree_of_agent.assign(n, 0);

  const auto& x = out.share;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (x(i, j) > 0 && norm.zero_price_buyer[i] != norm.zero_price_good[j])
        throw InvariantBreach("allocation edge joins a free and a priced part");

  // Root every component at its lowest agent and orient it.
  std::vector<std::vector<std::size_t>> children(m);
  std::vector<bool> agent_seen(n, false), good_seen(m, false);
  for (std::size_t r = 0; r < n; ++r) {
    if (agent_seen[r]) continue;
    agent_seen[r] = true;
    out.root_agent[r] = true;
    std::vector<std::size_t> stack{r};
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < m; ++j) {
        if (x(a, j) <= 0 || good_seen[j]) continue;
        good_seen[j] = true;
        out.good_parent[j] = a;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == a || x(i, j) <= 0) continue;
          children[j].push_back(i);
          agent_seen[i] = true;
          stack.push_back(i);
        }
      }
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    if (!out.good_parent[j]) continue;
    if (children[j].empty()) {
      out.preassigned[j] = out.good_parent[j];
      continue;
    }
    std::size_t keep = children[j].front();
    for (std::size_t i : children[j])
      if (x(i, j) > x(keep, j)) keep = i;
    for (std::size_t i : children[j])
      if (i != keep) out.root_agent[i] = true;

    bool drop = norm.zero_price_good[j] ? norm.value(keep, j) * x(keep, j) <= norm.cap[keep] / 2
                                        : norm.price[j] <= norm.active_budget[keep] / 2;
    if (drop) {
      out.preassigned[j] = out.good_parent[j];
      out.root_agent[keep] = true;
    } else {
      out.kept_good[j] = true;
      out.good_child[j] = keep;
    }
  }

  for (std::size_t r = 0; r < n; ++r) {
    if (!out.root_agent[r]) continue;
    RoundingTree tree;
    tree.root = r;
    tree.zero_price = norm.zero_price_buyer[r];
    std::vector<std::size_t> stack{r};
    while (!stack.empty()) {
      std::size_t a = stack.back();
      stack.pop_back();
      tree.agents.push_back(a);
      out.tree_of_agent[a] = out.trees.size();
      for (std::size_t j = 0; j < m; ++j) {
        if (!out.kept_good[j] || out.good_parent[j] != a) continue;
        tree.goods.push_back(j);
        stack.push_back(*out.good_child[j]);
      }
    }
    std::sort(tree.agents.begin(), tree.agents.end());
    std::sort(tree.goods.begin(), tree.goods.end());
    out.trees.push_back(std::move(tree));
  }

  out.fractional_value.assign(n, 0);
  for (std::size_t j = 0; j < m; ++j) {
    if (out.preassigned[j]) out.fractional_value[*out.preassigned[j]] += norm.value(*out.preassigned[j], j);
    if (!out.kept_good[j]) continue;
    for (std::size_t i : {*out.good_parent[j], *out.good_child[j]}) out.fractional_value[i] += norm.value(i, j) * x(i, j);
  }
  for (std::size_t i = 0; i < n; ++i) out.fractional_value[i] = capped_sum(out.fractional_value[i], norm.cap[i]);
  return out;
}

Allocation round(RoundingForest& forest, const NormalizedInstance& norm) {
  const std::size_t n = norm.agents();
  const std::size_t m = norm.items();
  std::vector<std::optional<std::size_t>> owner = forest.preassigned;

  auto child_goods = [&](std::size_t a) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < m; ++j)
      if (forest.kept_good[j] && forest.good_parent[j] == a) out.push_back(j);
    return out;
  };
  // Every good below `j` goes to its child agent.
  auto hand_down = [&](std::size_t j) {
    std::vector<std::size_t> stack{j};
    while (!stack.empty()) {
      std::size_t g = stack.back();
      stack.pop_back();
      owner[g] = forest.good_child[g];
      for (std::size_t h : child_goods(*forest.good_child[g])) stack.push_back(h);
    }
  };

  for (auto& tree : forest.trees) {
    tree.path_agents.clear();
    tree.path_goods.clear();
    tree.path_children.clear();
    std::size_t a = tree.root;
    while (true) {
      tree.path_agents.push_back(a);
      auto kids = child_goods(a);
      if (kids.empty()) break;
      std::size_t best = kids.front();
      for (std::size_t j : kids)
        if (norm.value(a, j) * forest.share(a, j) > norm.value(a, best) * forest.share(a, best)) best = j;
      owner[best] = a;
      tree.path_goods.push_back(best);
      tree.path_children.push_back(kids.size());
      for (std::size_t j : kids)
        if (j != best) hand_down(j);
      a = *forest.good_child[best];
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    if (owner[j]) continue;
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (norm.value(i, j) > norm.value(best, j)) best = i;
    owner[j] = best;
  }
  return Allocation::from_owners(n, owner);
}

LemmaAudit audit_rounding(const NormalizedInstance& norm, const RoundingForest& forest,
                          const Allocation& rounded) {
  const std::size_t n = norm.agents();
  const std::size_t m = norm.items();
  LemmaAudit audit;

  std::vector<Rational> value(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      if (rounded.share(i, j) != 0) value[i] += norm.value(i, j) * rounded.share(i, j);
    value[i] = capped_sum(value[i], norm.cap[i]);
    if (value[i] <= 0) {
      audit.positive_values = false;
      audit.notes.push_back(agent_name(i) + " ends with value 0");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const Rational& before = norm.equilibrium_value[i];
    const Rational need = forest.root_agent[i] ? before / 2 : before;
    if (forest.fractional_value[i] < need) {
      audit.tree_ok = false;
      audit.notes.push_back(agent_name(i) + " keeps too little after preprocessing");
    }
  }

  for (std::size_t j = 0; j < m; ++j) {
    if (!forest.kept_good[j]) continue;
    std::size_t i = *forest.good_child[j];
    if (rounded.share(i, j) == 1 && value[i] < norm.equilibrium_value[i] / 2) {
      audit.half_ok = false;
      audit.notes.push_back(agent_name(i) + " gets less than half from its parent item");
    }
  }

  std::size_t agent_total = 0;
  std::size_t children_total = 0;
  for (const auto& tree : forest.trees) {
    ++audit.trees_checked;
    if (tree.agents.size() != tree.goods.size() + 1) {
      audit.degree_ok = false;
      audit.notes.push_back("tree rooted at " + agent_name(tree.root) + " is not k goods and k+1 agents");
    }
    agent_total += tree.agents.size();
    for (std::size_t k : tree.path_children) children_total += k;

    const std::size_t k_tree = tree.goods.size();
    const std::size_t l = tree.path_goods.size();
    Rational bound = pow(Rational(1, 2), k_tree - l + 1);
    for (std::size_t k : tree.path_children) bound /= k;
    for (std::size_t i : tree.agents)
      if (tree.zero_price || norm.capped[i]) bound *= norm.cap[i];
    if (!tree.zero_price)
      for (std::size_t j : tree.goods)
        if (norm.price[j] > 1) bound *= norm.price[j];

    Rational product = 1;
    for (std::size_t i : tree.agents) product *= value[i];
    if (product < bound) {
      audit.treeb_ok = false;
      ++audit.treeb_failures;
      bool holds_items = false;
      for (std::size_t s = 0; s + 1 < tree.path_agents.size(); ++s)
        for (const auto& owner : forest.preassigned)
          if (owner == tree.path_agents[s]) holds_items = true;
      if (!holds_items) ++audit.treeb_failures_unexplained;
      audit.notes.push_back("tree rooted at " + agent_name(tree.root) + " falls below its product bound");
    }
  }
  if (agent_total > n || children_total > n) {
    audit.degree_ok = false;
    audit.notes.push_back("tree sizes exceed the agent count");
  }
  return audit;
}

LinearMarket pipeline_market(const MarketInstance& market, const Rational& epsilon_prime) {
  PerturbedMarket perturbed = perturb(market, epsilon_prime);
  LinearMarket out = perturbed.market();
  const Rational base = 1 + epsilon_prime;
  for (std::size_t i = 0; i < out.buyers(); ++i)
    out.utility_cap[i] = least_power_at_least(base, out.utility_cap[i]).power;
  return out;
}

namespace {

bool ratio_holds(const Rational& nsw, const Rational& bound, std::size_t n, const Rational& eps) {
  Rational lhs = nsw * pow(Rational(2404, 1000), n) * pow(1 + eps, static_cast<std::uint64_t>(n) * n);
  return lhs >= bound;
}

}  // namespace

PipelineResult round_equilibrium(const NswInstance& inst, const LinearMarket& market,
                                 std::span<const Rational> price, const Allocation& alloc,
                                 const Rational& epsilon_prime) {
  PipelineResult out;
  Allocation forest_alloc = flow_to_forest(market, price, alloc);
  NormalizedInstance norm = normalize(market, price, forest_alloc);
  RoundingForest forest = preprocess(norm, forest_alloc);
  Allocation rounded = round(forest, norm);
  out.lemmas = audit_rounding(norm, forest, rounded);

  Certificate& cert = out.certificate;
  cert.nsw = nsw_value(inst, rounded);
  cert.upper_bound = upper_bound(norm).product;
  for (const auto& s : norm.scale) cert.upper_bound /= s;
  cert.epsilon_prime = epsilon_prime;
  cert.ratio_pass = ratio_holds(cert.nsw.product, cert.upper_bound, inst.agents(), epsilon_prime);
  cert.allocation = std::move(rounded);

  out.market = market;
  out.normalized = std::move(norm);
  out.forest = std::move(forest);
  return out;
}

PipelineResult pipeline(const NswInstance& inst, const Rational& epsilon, const SolverHooks& hooks) {
  inst.validate();
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  const std::size_t n = inst.agents();
  const Rational eps_prime = epsilon / n;
  NswInstance capped = cap_valuations(inst);
  MarketInstance mk = to_market(capped);

  if (!money_clearing(mk)) {
    PipelineResult out;
    std::vector<std::optional<std::size_t>> owner(inst.items());
    for (std::size_t j = 0; j < inst.items(); ++j) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (capped.value(i, j) > capped.value(best, j)) best = i;
      owner[j] = best;
    }
    Certificate& cert = out.certificate;
    cert.opt_zero = true;
    cert.allocation = Allocation::from_owners(n, owner);
    cert.nsw = nsw_value(inst, cert.allocation);
    cert.upper_bound = 0;
    cert.epsilon_prime = eps_prime;
    cert.ratio_pass = true;
    return out;
  }

  LinearMarket perturbed = pipeline_market(mk, eps_prime);
  EquilibriumResult eq = solve_market(perturbed, hooks);
  PipelineResult out =
      round_equilibrium(inst, perturbed, eq.state.price, eq.allocation, eps_prime);
  out.equilibrium = std::move(eq);
  return out;
}

void write_certificate(std::ostream& out, const Certificate& cert, std::size_t agents) {
  out << "nsw_product " << format_rational(cert.nsw.product) << '\n';
  out << "upper_bound_product " << format_rational(cert.upper_bound) << '\n';
  out << "n " << agents << '\n';
  out << "epsilon_prime " << format_rational(cert.epsilon_prime) << '\n';
  out << "opt_zero " << (cert.opt_zero ? "yes" : "no") << '\n';
  out << "ratio_check " << (cert.ratio_pass ? "pass" : "fail") << '\n';
  const auto owner = cert.allocation.owners();
  for (std::size_t j = 0; j < owner.size(); ++j)
    if (owner[j]) out << "assign " << j + 1 << ' ' << *owner[j] + 1 << '\n';
}

}  // namespace nsw
