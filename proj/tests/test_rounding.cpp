#include "corpus.hpp"

#include "nsw/equilibrium.hpp"
#include "nsw/oracle.hpp"
#include "nsw/rounding.hpp"

#include <doctest.h>

#include <sstream>

using namespace nsw;

namespace {

// Hand-built normalized instance: every value 1, every price 1, uncapped
// agents with active budget 1.
NormalizedInstance plain(std::size_t n, std::size_t m) {
  NormalizedInstance norm;
  norm.value = Matrix<Rational>(n, m, 1);
  norm.cap.assign(n, 2);
  norm.scale.assign(n, 1);
  norm.price.assign(m, 1);
  norm.zero_price_buyer.assign(n, false);
  norm.zero_price_good.assign(m, false);
  norm.capped.assign(n, false);
  norm.equilibrium_value.assign(n, 1);
  norm.active_budget.assign(n, 1);
  return norm;
}

std::size_t support_edges(const Matrix<Rational>& x) {
  std::size_t edges = 0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) edges += x(i, j) > 0;
  return edges;
}

// Acyclic iff edges = nodes - components (nodes with an edge only).
bool is_forest(const Matrix<Rational>& x) {
  const std::size_t n = x.rows(), m = x.cols();
  std::vector<std::size_t> parent(n + m);
  for (std::size_t v = 0; v < n + m; ++v) parent[v] = v;
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (x(i, j) <= 0) continue;
      std::size_t a = find(i), b = find(n + j);
      if (a == b) return false;
      parent[a] = b;
    }
  return true;
}

std::vector<Rational> utilities(const LinearMarket& mk, const Allocation& a) {
  std::vector<Rational> out(mk.buyers(), 0);
  for (std::size_t i = 0; i < mk.buyers(); ++i)
    for (std::size_t j = 0; j < mk.goods(); ++j) out[i] += mk.utility(i, j) * a.share(i, j);
  return out;
}

std::vector<Rational> sales(const Allocation& a) {
  std::vector<Rational> out(a.goods(), 0);
  for (std::size_t i = 0; i < a.buyers(); ++i)
    for (std::size_t j = 0; j < a.goods(); ++j) out[j] += a.share(i, j);
  return out;
}

LinearMarket square_market(std::vector<Rational> utility, std::vector<Rational> caps) {
  LinearMarket mk;
  mk.budget = {1, 1};
  mk.utility_cap = std::move(caps);
  mk.earning_cap = {1, 1};
  mk.utility = Matrix<Rational>(2, 2);
  for (std::size_t k = 0; k < 4; ++k) mk.utility(k / 2, k % 2) = utility[k];
  return mk;
}

}  // namespace

TEST_SUITE("rounding") {

TEST_CASE("normalization scales by the MBB ratio") {
  LinearMarket mk;
  mk.budget = {1};
  mk.utility_cap = {10};
  mk.earning_cap = {1};
  mk.utility = Matrix<Rational>(1, 1, 4);
  std::vector<Rational> price{2};
  Allocation a{Matrix<Rational>(1, 1, Rational(1, 2)), false};
  NormalizedInstance norm = normalize(mk, price, a);
  CHECK(norm.value(0, 0) == 2);  // alpha = 2
  CHECK(norm.value(0, 0) == norm.price[0]);
  CHECK(norm.cap[0] == 5);
  CHECK_FALSE(norm.capped[0]);
  CHECK(norm.equilibrium_value[0] == 1);
  CHECK(norm.active_budget[0] == 1);
}

TEST_CASE("normalized corpus equilibria satisfy v' <= min(p, c') with equality on MBB goods") {
  for (const auto& e : testing::nsw_corpus(120)) {
    LinearMarket mk = pipeline_market(e.market, e.epsilon / e.instance.agents());
    EquilibriumResult r = solve_market(mk);
    NormalizedInstance norm = normalize(mk, r.state.price, r.allocation);
    PricedMarket pm(mk, r.state.price);
    for (std::size_t i = 0; i < norm.agents(); ++i) {
      if (norm.zero_price_buyer[i]) {
        CHECK(norm.capped[i]);
        CHECK(norm.equilibrium_value[i] == norm.cap[i]);
        continue;
      }
      for (std::size_t j = 0; j < norm.items(); ++j) {
        CHECK(norm.value(i, j) <= norm.price[j]);
        CHECK(norm.value(i, j) <= norm.cap[i]);
        if (pm.mbb(i, j)) CHECK(norm.value(i, j) == norm.price[j]);
      }
      if (norm.capped[i]) {
        CHECK(norm.cap[i] == norm.active_budget[i]);
        CHECK(norm.cap[i] <= 1);
      } else {
        CHECK(norm.equilibrium_value[i] == 1);
      }
    }
  }
}

TEST_CASE("upper bound products") {
  NormalizedInstance norm = plain(2, 3);
  norm.price = {1, Rational(1, 2), Rational(1, 3)};
  CHECK(upper_bound(norm).product == 1);
  norm.capped[1] = true;
  norm.cap[1] = Rational(1, 2);
  CHECK(upper_bound(norm).product == Rational(1, 2));
  norm.price[0] = 3;
  CHECK(upper_bound(norm).product == Rational(3, 2));
  CHECK(upper_bound(norm).agents == 2);
}

TEST_CASE("brute-force optimum stays below the upper bound") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    NswInstance inst = gen_random(3, 4, 8, 8, seed);
    PipelineResult r = pipeline(inst, Rational(1, 4));
    CHECK(oracle::brute_nsw(inst).optimum.product <= r.certificate.upper_bound);
  }
}

TEST_CASE("cycle cancellation on a 2x2 allocation") {
  LinearMarket mk = square_market({1, 1, 1, 1}, {10, 10});
  std::vector<Rational> price{1, 1};
  Allocation a{Matrix<Rational>(2, 2, Rational(1, 2)), false};
  REQUIRE(verify_equilibrium(mk, price, a));
  Allocation f = flow_to_forest(mk, price, a);
  CHECK(support_edges(f.share) < 4);
  CHECK(is_forest(f.share));
  CHECK(utilities(mk, f) == utilities(mk, a));
  CHECK(sales(f) == sales(a));
  CHECK(verify_equilibrium(mk, price, f));
}

TEST_CASE("cycle cancellation on free goods keeps utilities and releases supply") {
  LinearMarket mk = square_market({1, 2, 3, 1}, {Rational(3, 2), 2});
  std::vector<Rational> price{0, 0};
  Allocation a{Matrix<Rational>(2, 2, Rational(1, 2)), false};
  Allocation f = flow_to_forest(mk, price, a);
  CHECK(is_forest(f.share));
  CHECK(utilities(mk, f) == utilities(mk, a));
  auto before = sales(a), after = sales(f);
  CHECK(after[0] <= before[0]);
  CHECK(after[1] <= before[1]);
  CHECK(verify_equilibrium(mk, price, f));
}

TEST_CASE("acyclic allocations are left alone") {
  LinearMarket mk = square_market({1, 1, 1, 1}, {10, 10});
  std::vector<Rational> price{1, 1};
  Allocation a{Matrix<Rational>(2, 2), false};
  a.share(0, 0) = 1;
  a.share(1, 1) = 1;
  CHECK(flow_to_forest(mk, price, a).share == a.share);
}

TEST_CASE("forests of corpus equilibria are still equilibria") {
  for (const auto& e : testing::nsw_corpus(150)) {
    LinearMarket mk = perturb(e.market, e.epsilon).market();
    EquilibriumResult r = solve_market(mk);
    Allocation f = flow_to_forest(mk, r.state.price, r.allocation);
    CHECK(is_forest(f.share));
    CHECK(verify_equilibrium(mk, r.state.price, f));
    CHECK(utilities(mk, f) == utilities(mk, r.allocation));
  }
}

TEST_CASE("preprocessing keeps the largest child of a good") {
  NormalizedInstance norm = plain(4, 4);
  Allocation a{Matrix<Rational>(4, 4), false};
  a.share(0, 0) = Rational(1, 10);
  a.share(1, 0) = Rational(9, 20);
  a.share(2, 0) = Rational(27, 100);
  a.share(3, 0) = Rational(9, 50);
  for (std::size_t i = 1; i < 4; ++i) a.share(i, i) = 1;
  RoundingForest f = preprocess(norm, a);
  CHECK(f.good_parent[0] == 0u);
  CHECK(f.good_child[0] == 1u);
  CHECK(f.kept_good[0]);
  CHECK(f.root_agent[0]);
  CHECK_FALSE(f.root_agent[1]);
  CHECK(f.root_agent[2]);
  CHECK(f.root_agent[3]);
  for (std::size_t j = 1; j < 4; ++j) CHECK(f.preassigned[j] == j);  // childless goods
  CHECK(f.trees.size() == 3);
}

TEST_CASE("a cheap good goes to its parent") {
  NormalizedInstance norm = plain(2, 2);
  norm.price[0] = Rational(1, 4);  // m^a / 4 for the child
  norm.value(0, 0) = norm.value(1, 0) = Rational(1, 4);
  Allocation a{Matrix<Rational>(2, 2), false};
  a.share(0, 0) = Rational(3, 5);
  a.share(1, 0) = Rational(2, 5);
  a.share(1, 1) = 1;
  RoundingForest f = preprocess(norm, a);
  CHECK(f.preassigned[0] == 0u);
  CHECK_FALSE(f.kept_good[0]);
  CHECK(f.root_agent[1]);
  CHECK(f.trees.size() == 2);
}

TEST_CASE("free goods use the half-utility rule") {
  NormalizedInstance norm = plain(2, 2);
  norm.price = {0, 0};
  norm.zero_price_good = {true, true};
  norm.zero_price_buyer = {true, true};
  norm.capped = {true, true};
  norm.cap = {2, 2};
  norm.equilibrium_value = {2, 2};
  norm.value = Matrix<Rational>(2, 2, 2);
  Allocation a{Matrix<Rational>(2, 2), false};
  a.share(0, 0) = 1;
  a.share(0, 1) = Rational(1, 2);
  a.share(1, 1) = Rational(1, 2);  // child gets exactly half of its cap
  RoundingForest f = preprocess(norm, a);
  CHECK(f.preassigned[1] == 0u);
  CHECK(f.root_agent[1]);

  a.share(1, 1) = Rational(3, 5);
  a.share(0, 1) = Rational(2, 5);
  a.share(1, 0) = 0;
  f = preprocess(norm, a);
  CHECK(f.kept_good[1]);
  CHECK(f.trees.size() == 1);
  CHECK(f.trees[0].zero_price);
}

TEST_CASE("the root takes its most valuable child good") {
  NormalizedInstance norm = plain(3, 2);
  norm.price = {6, 2};
  norm.cap = {10, 10, 10};
  norm.value(0, 0) = 6;
  norm.value(0, 1) = 2;
  norm.value(1, 0) = 6;
  norm.value(2, 1) = 2;
  Allocation a{Matrix<Rational>(3, 2), false};
  a.share(0, 0) = a.share(1, 0) = Rational(1, 2);  // fractional value 3 for the root
  a.share(0, 1) = a.share(2, 1) = Rational(1, 2);  // fractional value 1
  RoundingForest f = preprocess(norm, a);
  Allocation r = round(f, norm);
  CHECK(r.share(0, 0) == 1);
  CHECK(r.share(2, 1) == 1);
  REQUIRE(f.trees.size() == 1);
  CHECK(f.trees[0].path_agents == std::vector<std::size_t>{0, 1});
  CHECK(f.trees[0].path_goods == std::vector<std::size_t>{0});
  CHECK(f.trees[0].path_children == std::vector<std::size_t>{2});
}

TEST_CASE("rounding lemmas on the corpus") {
  std::size_t runs = 0, treeb_runs = 0, zero_trees = 0;
  for (const auto& e : testing::nsw_corpus(300)) {
    CAPTURE(e.seed);
    PipelineResult r = pipeline(e.instance, Rational(1, 4));
    REQUIRE(r.lemmas.has_value());
    const LemmaAudit& L = *r.lemmas;
    ++runs;
    CHECK(L.tree_ok);
    CHECK(L.half_ok);
    CHECK(L.degree_ok);
    CHECK(L.positive_values);
    CHECK(L.treeb_failures_unexplained == 0);
    treeb_runs += L.treeb_ok;
    for (const auto& t : r.forest->trees) zero_trees += t.zero_price;

    // Every item assigned exactly once.
    for (std::size_t j = 0; j < e.instance.items(); ++j) {
      Rational total = 0;
      for (std::size_t i = 0; i < e.instance.agents(); ++i) total += r.certificate.allocation.share(i, j);
      CHECK(total == 1);
    }
  }
  MESSAGE("product bound held on " << treeb_runs << " of " << runs << " runs; zero-price trees " << zero_trees);
  CHECK(zero_trees > 0);
}

TEST_CASE("pipeline: instances without a positive allocation certify OPT = 0") {
  NswInstance inst{Matrix<Integer>(3, 3), {5, 5, 5}};
  inst.value(0, 0) = inst.value(0, 1) = inst.value(0, 2) = 2;
  inst.value(1, 0) = 3;
  inst.value(2, 0) = 1;
  PipelineResult r = pipeline(inst, Rational(1, 4));
  CHECK(r.certificate.opt_zero);
  CHECK(r.certificate.ratio_pass);
  CHECK(oracle::brute_nsw(inst).optimum.product == 0);
  CHECK(r.certificate.allocation.share(1, 0) == 1);  // item 1 to its most eager agent
}

TEST_CASE("pipeline: a single agent takes everything") {
  NswInstance inst{Matrix<Integer>(1, 3), {7}};
  inst.value(0, 0) = 2;
  inst.value(0, 1) = 3;
  inst.value(0, 2) = 4;
  PipelineResult r = pipeline(inst, Rational(1, 4));
  CHECK(r.certificate.nsw.product == 7);
  CHECK(r.certificate.ratio_pass);
  for (std::size_t j = 0; j < 3; ++j) CHECK(r.certificate.allocation.share(0, j) == 1);
}

TEST_CASE("pipeline ratio against brute force on 3x5 instances") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    NswInstance inst = gen_random(3, 5, 8, 8, seed);
    PipelineResult r = pipeline(inst, Rational(1, 4));
    Rational opt = oracle::brute_nsw(inst).optimum.product;
    Rational slack = pow(Rational(2404, 1000), 3) * pow(1 + r.certificate.epsilon_prime, 3);
    CHECK(r.certificate.nsw.product * slack >= opt);
    CHECK(r.certificate.ratio_pass);
    CHECK(r.certificate.epsilon_prime == Rational(1, 12));
  }
}

TEST_CASE("scaling one agent keeps the certificate valid") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    NswInstance inst = gen_random(3, 5, 8, 8, seed);
    NswInstance scaled = inst;
    for (std::size_t j = 0; j < inst.items(); ++j) scaled.value(1, j) *= 3;
    scaled.cap[1] *= 3;
    CHECK(pipeline(inst, Rational(1, 4)).certificate.ratio_pass);
    CHECK(pipeline(scaled, Rational(1, 4)).certificate.ratio_pass);
  }
}

TEST_CASE("certificate text") {
  NswInstance inst = gen_random(2, 3, 8, 8, 4);
  PipelineResult r = pipeline(inst, Rational(1, 2));
  std::ostringstream out;
  write_certificate(out, r.certificate, 2);
  std::string text = out.str();
  CHECK(text.find("nsw_product ") == 0);
  CHECK(text.find("\nupper_bound_product ") != std::string::npos);
  CHECK(text.find("\nn 2\n") != std::string::npos);
  CHECK(text.find("\nepsilon_prime 1/4\n") != std::string::npos);
  CHECK(text.find("\nratio_check pass\n") != std::string::npos);
  std::size_t assigns = 0;
  for (std::size_t pos = text.find("assign "); pos != std::string::npos; pos = text.find("assign ", pos + 1)) ++assigns;
  CHECK(assigns == 3);
}

}  // TEST_SUITE
